//! Acceptance suite. Every criterion is evaluated at its stated tolerance and
//! reported as one PASS/FAIL line; the test fails if any criterion fails.
//!
//! Run with `cargo test -p mereology-cli --test acceptance -- --nocapture`
//! to see the report.

use std::process::Command;

use mereology::bitstate::{overlap_standard, random_ontic};
use mereology::entropy::{collision_entropy, renyi_entropy, von_neumann_entropy, Spectrum};
use mereology::experiment::{
    run_cycle_census, run_sweep, summarize_by_size, SweepConfig, SweepRecord,
};
use mereology::indexing::{proper_masks, FactorizationShape};
use mereology::permrep::{random_permutation, EnergyBasis};
use mereology::reduction::{purity, reduced_density, reduced_density_bruteforce};
use mereology::states::{density_full, project_standard, state_from_ontic};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: usize, name: &'static str, pass: bool, detail: String) -> Outcome {
    let o = Outcome {
        id,
        name,
        pass,
        detail,
    };
    println!(
        "{} [{:>2}] {}: {}",
        if o.pass { "PASS" } else { "FAIL" },
        o.id,
        o.name,
        o.detail
    );
    o
}

fn full_scale_sweep() -> (Vec<SweepRecord>, usize) {
    let shape = FactorizationShape::uniform(2, 12).unwrap();
    let config = SweepConfig::new(shape, 10, 0);
    let sweep = run_sweep(&config).unwrap();
    (sweep.records, 12)
}

fn schmidt_symmetry(records: &[SweepRecord], k: usize) -> Outcome {
    let full = (1u64 << k) - 1;
    let mut pairs = 0;
    let mut worst = 0.0f64;
    for r in records.iter().filter(|r| r.subset_mask & 1 == 1) {
        let other = records
            .iter()
            .find(|o| o.state_id == r.state_id && o.subset_mask == !r.subset_mask & full)
            .expect("complement present");
        worst = worst.max((r.s2_bits - other.s2_bits).abs());
        pairs += 1;
    }
    outcome(
        1,
        "Schmidt symmetry on 2^12, 10 states",
        pairs == 10 * 2047 && worst < 1e-9,
        format!("{pairs} complementary pairs, max |S2(A) - S2(X\\A)| = {worst:.3e} bits (< 1e-9)"),
    )
}

fn plateau(records: &[SweepRecord], k: usize) -> Outcome {
    let summary = summarize_by_size(records, k).unwrap();
    let limits = [(1, 0.2), (2, 0.35), (3, 0.5)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (size, tol) in limits {
        let mean = summary.row(size).unwrap().mean;
        let dev = (mean - size as f64).abs();
        pass &= dev < tol;
        parts.push(format!(
            "|A|={size}: mean {mean:.6} (dev {dev:.2e} < {tol})"
        ));
    }
    outcome(2, "maximally mixed plateau", pass, parts.join("; "))
}

fn state_independence(records: &[SweepRecord], k: usize) -> Outcome {
    let summary = summarize_by_size(records, k).unwrap();
    let spreads: Vec<String> = summary
        .rows
        .iter()
        .map(|r| format!("{}:{:.1e}", r.subset_size, r.state_spread))
        .collect();
    let worst = summary
        .rows
        .iter()
        .map(|r| r.state_spread)
        .fold(0.0, f64::max);
    outcome(
        3,
        "weak state dependence",
        worst < 0.1,
        format!(
            "max across-state std of mean S2 = {worst:.3e} bits (< 0.1); per |A| {}",
            spreads.join(" ")
        ),
    )
}

fn oracle_instances() -> Vec<(FactorizationShape, u64)> {
    let shapes = [vec![2, 2, 2], vec![2, 3, 2], vec![2, 2, 2, 2]];
    shapes
        .iter()
        .enumerate()
        .flat_map(|(i, dims)| {
            let shape = FactorizationShape::new(dims.clone()).unwrap();
            (0..20u64).map(move |s| (shape.clone(), 1000 * i as u64 + s))
        })
        .collect()
}

fn oracle_equivalence_and_dual_purity() -> (Outcome, Outcome) {
    let mut worst_rho = 0.0f64;
    let mut worst_purity = 0.0f64;
    let mut cases = 0;
    for (shape, seed) in oracle_instances() {
        let q = random_ontic(shape.total(), seed).unwrap();
        let psi = state_from_ontic(&q, &shape).unwrap();
        for mask in proper_masks(shape.num_factors()).unwrap() {
            let fast = reduced_density(&psi, mask, 4096).unwrap();
            let brute = reduced_density_bruteforce(&psi, mask).unwrap();
            worst_rho = worst_rho.max(fast.max_abs_diff(&brute));
            let gram = purity(&psi, mask).unwrap();
            worst_purity = worst_purity.max((gram - fast.purity_sum_formula()).abs());
            cases += 1;
        }
    }
    (
        outcome(
            4,
            "reduced density vs brute-force partial trace",
            worst_rho < 1e-12,
            format!(
                "{cases} (state, subset) cases, max elementwise diff {worst_rho:.3e} (< 1e-12)"
            ),
        ),
        outcome(
            5,
            "purity: Gram path vs explicit sum formula",
            worst_purity < 1e-12,
            format!("{cases} cases, max diff {worst_purity:.3e} (< 1e-12)"),
        ),
    )
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn diagonalization() -> Outcome {
    let n = 24;
    let (mut off, mut diag, mut unit, mut phases) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for seed in 0..50u64 {
        let g = random_permutation(n, 7_000 + seed);
        let basis = EnergyBasis::new(&g);
        let f = basis.dense_matrix(n).unwrap();
        let f_inv = f.clone().try_inverse().expect("F invertible");
        let p = g.matrix().map(|x| Complex64::new(x, 0.0));
        let d = &f * p * &f_inv;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    diag = diag.max((d[(i, i)] - basis.eigenvalue(i)).norm());
                } else {
                    off = off.max(d[(i, j)].norm());
                }
            }
        }
        unit = unit.max(max_abs(&(&f * f.adjoint() - DMatrix::identity(n, n))));
        // the eigenphase list derived from the cycle type alone, as a multiset
        let mut expected: Vec<Complex64> = g
            .cycles()
            .iter()
            .flat_map(|c| {
                let l = c.len();
                (0..l).map(move |k| {
                    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / l as f64)
                })
            })
            .collect();
        let mut got: Vec<Complex64> = (0..n).map(|i| d[(i, i)]).collect();
        let key =
            |z: &Complex64| (z.re * 1e6).round() as i64 * 10_000_000 + (z.im * 1e6).round() as i64;
        expected.sort_by_key(key);
        got.sort_by_key(key);
        for (a, b) in expected.iter().zip(&got) {
            phases = phases.max((a - b).norm());
        }
    }
    outcome(
        6,
        "block Fourier diagonalization, 50 permutations of 24 points",
        off < 1e-10 && diag < 1e-10 && phases < 1e-10 && unit < 1e-12,
        format!(
            "max off-diagonal {off:.2e}, eigenphase mismatch {diag:.2e} (multiset {phases:.2e}) (< 1e-10); max |FF^† - I| {unit:.2e} (< 1e-12)"
        ),
    )
}

fn cycle_census() -> Outcome {
    let census = run_cycle_census(20, 100_000, 2024).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for r in census.rows.iter().take(8) {
        let z = (r.mean - r.expected) / r.std_error;
        pass &= z.abs() <= 3.0 && !r.flagged;
        parts.push(format!("l={}: {:.4} ({:+.2} SE)", r.length, r.mean, z));
    }
    outcome(
        7,
        "cycle census of S_20, 1e5 samples",
        pass,
        parts.join(", "),
    )
}

fn structural_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut complement_exact = true;
    let mut duality = 0.0f64;
    let mut rational = true;
    let (mut idempotence, mut kernel) = (0.0f64, 0.0f64);
    let mut inner = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(2..=64usize);
        let q = random_ontic(n, rng.random()).unwrap();
        let r = random_ontic(n, rng.random()).unwrap();
        let s = overlap_standard(&q, &r).unwrap();
        complement_exact &= overlap_standard(&q.complement(), &r.complement()).unwrap() == s;
        complement_exact &= overlap_standard(&q.complement(), &r).unwrap() == -s;
        complement_exact &= overlap_standard(&q, &r.complement()).unwrap() == -s;

        let line = FactorizationShape::new(vec![n]).unwrap();
        let rho = density_full(&state_from_ontic(&q, &line).unwrap(), 256).unwrap();
        let rho_c = density_full(&state_from_ontic(&q.complement(), &line).unwrap(), 256).unwrap();
        duality = duality.max(rho.max_abs_diff(&rho_c));

        // |q - alpha omega|^2 = N alpha (1 - alpha), scaled by N^2 to integers
        let (nn, p) = (n as i128, q.popcount() as i128);
        let lhs: i128 = q.iter().map(|b| (nn * b as i128 - p).pow(2)).sum();
        rational &= lhs == nn * p * (nn - p);

        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let once = project_standard(&v);
        let twice = project_standard(&once);
        for (a, b) in once.iter().zip(&twice) {
            idempotence = idempotence.max((a - b).norm());
        }
        let omega = vec![Complex64::new(1.0, 0.0); n];
        for z in project_standard(&omega) {
            kernel = kernel.max(z.norm());
        }

        let pq = state_from_ontic(&q, &line).unwrap();
        let pr = state_from_ontic(&r, &line).unwrap();
        inner = inner.max((pq.inner(&pr).unwrap() - Complex64::new(s, 0.0)).norm());
    }
    let pass = complement_exact
        && rational
        && duality < 1e-12
        && idempotence < 1e-12
        && kernel < 1e-12
        && inner < 1e-12;
    outcome(
        8,
        "structural identities",
        pass,
        format!(
            "overlap complement symmetries exact: {complement_exact}; rho(!q) = rho(q) within {duality:.1e}; rational normalization exact: {rational}; projector idempotence {idempotence:.1e}, kernel {kernel:.1e}; state inner product vs overlap {inner:.1e} (all < 1e-12)"
        ),
    )
}

fn entropy_functionals() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let alphas = [0.0, 0.25, 0.5, 0.75, 0.999, 1.001, 1.5, 2.0, 3.0, 5.0, 10.0];
    let mut monotone = true;
    let mut vn_ge_s2 = true;
    for _ in 0..100 {
        let d = rng.random_range(2..=32usize);
        let raw: Vec<f64> = (0..d).map(|_| rng.random::<f64>().powi(3)).collect();
        let total: f64 = raw.iter().sum();
        let spec = Spectrum::new(raw.iter().map(|x| x / total).collect()).unwrap();
        let values: Vec<f64> = alphas
            .iter()
            .map(|&a| renyi_entropy(&spec, a).unwrap())
            .collect();
        monotone &= values.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        let s2 = collision_entropy(spec.purity()).unwrap();
        vn_ge_s2 &= von_neumann_entropy(&spec) >= s2 - 1e-12;
    }
    let mut uniform = 0.0f64;
    for d in 1..=64usize {
        let spec = Spectrum::uniform(d).unwrap();
        let want = (d as f64).log2();
        for a in [0.0, 0.5, 2.0, 3.0] {
            uniform = uniform.max((renyi_entropy(&spec, a).unwrap() - want).abs());
        }
        uniform = uniform.max((von_neumann_entropy(&spec) - want).abs());
        uniform = uniform.max((collision_entropy(spec.purity()).unwrap() - want).abs());
    }
    outcome(
        9,
        "entropy functionals",
        monotone && vn_ge_s2 && uniform < 1e-12,
        format!(
            "Renyi non-increasing in alpha on 100 spectra: {monotone}; S_vN >= S_2: {vn_ge_s2}; uniform spectrum vs log2 d max error {uniform:.1e} (< 1e-12)"
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_mereology"))
            .args([
                "sweep", "--shape", "2^12", "--states", "10", "--seed", "0", "--out",
            ])
            .arg(&path)
            .output()
            .unwrap();
        assert!(
            status.status.success(),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        std::fs::read(path).unwrap()
    };
    let a = run("a.csv");
    let b = run("b.csv");
    outcome(
        10,
        "byte-identical CSV for identical sweep configs",
        a == b,
        format!(
            "{} bytes vs {} bytes, identical: {}",
            a.len(),
            b.len(),
            a == b
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let (records, k) = full_scale_sweep();
    let mut results = vec![
        schmidt_symmetry(&records, k),
        plateau(&records, k),
        state_independence(&records, k),
    ];
    let (c4, c5) = oracle_equivalence_and_dual_purity();
    results.extend([
        c4,
        c5,
        diagonalization(),
        cycle_census(),
        structural_identities(),
        entropy_functionals(),
        determinism(),
    ]);
    let failed: Vec<String> = results
        .iter()
        .filter(|o| !o.pass)
        .map(|o| format!("[{}] {}", o.id, o.name))
        .collect();
    println!(
        "{} of {} criteria passed",
        results.len() - failed.len(),
        results.len()
    );
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
