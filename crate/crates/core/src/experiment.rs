//! Subsystem entropy sweeps, time series under a permutation generator and
//! cycle statistics of random permutations, with CSV and plot-data output.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, Write};
use std::ops::Range;

use num_bigint::BigUint;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitstate::{random_ontic_weighted, random_ontic_with, OnticVector};
use crate::entropy::collision_entropy;
use crate::error::{Error, Result};
use crate::indexing::{
    masks_of_size, proper_masks, Bipartition, FactorizationShape, SubsystemMask,
};
use crate::permrep::{
    apply_permutation, random_permutation_with, to_energy_basis, EnergyBasis, Permutation,
};
use crate::reduction::purity_with;
use crate::states::{state_from_ontic, PureState};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Default limit on the smaller-side Gram dimension `min(d_A, d_B)`.
pub const DEFAULT_GRAM_CAP: usize = 4096;

/// Largest `K` for which every proper subset is enumerated by default.
pub const ALL_PROPER_MAX_FACTORS: usize = 14;

const SIGN_TOL: f64 = 1e-12;
const BOUND_TOL: f64 = 1e-9;
const SCHMIDT_TOL: f64 = 1e-9;

/// Basis in which reduced states are computed.
#[derive(Clone, Debug)]
pub enum SweepBasis {
    Ontic,
    /// Eigenbasis of `generator`; `label` describes where it came from.
    Energy {
        generator: Permutation,
        label: String,
    },
}

impl SweepBasis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepBasis::Ontic => "ontic",
            SweepBasis::Energy { .. } => "energy",
        }
    }
}

/// Which subsystems a sweep visits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubsetPolicy {
    /// All `2^K - 2` proper subsets.
    AllProper,
    /// Every subset of each listed size.
    Sizes(Vec<usize>),
    /// Up to `per_size` distinct subsets of each size `1..K`, drawn once from
    /// the sweep seed and shared by all states.
    Sampled { per_size: usize },
}

impl SubsetPolicy {
    pub fn default_for(num_factors: usize) -> Self {
        if num_factors <= ALL_PROPER_MAX_FACTORS {
            SubsetPolicy::AllProper
        } else {
            SubsetPolicy::Sampled { per_size: 64 }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SubsetPolicy::AllProper => "all-proper".into(),
            SubsetPolicy::Sizes(s) => {
                let parts: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                format!("sizes:{}", parts.join(","))
            }
            SubsetPolicy::Sampled { per_size } => format!("sampled:{per_size}"),
        }
    }

    /// Parses `all-proper`, `sizes:1,2,3` or `sampled:K`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "all-proper" || text == "all" {
            return Ok(SubsetPolicy::AllProper);
        }
        if let Some(list) = text.strip_prefix("sizes:") {
            let sizes = list
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::Parse(format!("bad subset size {t:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(SubsetPolicy::Sizes(sizes));
        }
        if let Some(k) = text.strip_prefix("sampled:") {
            let per_size = k
                .trim()
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad per-size count {k:?}: {e}")))?;
            return Ok(SubsetPolicy::Sampled { per_size });
        }
        Err(Error::Parse(format!(
            "unknown subset policy {text:?} (expected all-proper, sizes:LIST or sampled:K)"
        )))
    }
}

/// How random ontic vectors are drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SamplingLaw {
    /// Uniform over nontrivial subsets: i.i.d. fair bits, trivial patterns rejected.
    Uniform,
    /// Uniform over subsets with `round(density * N)` elements.
    FixedDensity(f64),
}

impl SamplingLaw {
    pub fn describe(&self) -> String {
        match self {
            SamplingLaw::Uniform => {
                "uniform-nontrivial (iid fair bits, empty and full sets rejected)".into()
            }
            SamplingLaw::FixedDensity(d) => format!("fixed-weight (density {d})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub shape: FactorizationShape,
    pub num_states: usize,
    pub seed: u64,
    pub basis: SweepBasis,
    pub policy: SubsetPolicy,
    pub sampling: SamplingLaw,
    pub gram_cap: usize,
}

impl SweepConfig {
    pub fn new(shape: FactorizationShape, num_states: usize, seed: u64) -> Self {
        let policy = SubsetPolicy::default_for(shape.num_factors());
        Self {
            shape,
            num_states,
            seed,
            basis: SweepBasis::Ontic,
            policy,
            sampling: SamplingLaw::Uniform,
            gram_cap: DEFAULT_GRAM_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_states == 0 {
            return Err(Error::InvalidConfig(
                "at least one state is required".into(),
            ));
        }
        if self.shape.num_factors() < 2 {
            return Err(Error::InvalidConfig(
                "a sweep needs at least two factors".into(),
            ));
        }
        match &self.policy {
            SubsetPolicy::Sampled { per_size: 0 } => {
                return Err(Error::InvalidConfig(
                    "sampled policy needs a per-size count >= 1".into(),
                ))
            }
            SubsetPolicy::Sizes(sizes) => {
                if sizes.is_empty() {
                    return Err(Error::InvalidConfig("empty size list".into()));
                }
                let k = self.shape.num_factors();
                if let Some(s) = sizes.iter().find(|&&s| s == 0 || s >= k) {
                    return Err(Error::InvalidConfig(format!(
                        "subset size {s} outside 1..{k}"
                    )));
                }
            }
            _ => {}
        }
        if let SamplingLaw::FixedDensity(d) = self.sampling {
            if !(d > 0.0 && d < 1.0) {
                return Err(Error::InvalidConfig(format!("density {d} outside (0, 1)")));
            }
        }
        if let SweepBasis::Energy { generator, .. } = &self.basis {
            if generator.len() != self.shape.total() {
                return Err(Error::InvalidConfig(format!(
                    "generator acts on {} points but the shape has {}",
                    generator.len(),
                    self.shape.total()
                )));
            }
        }
        Ok(())
    }

    /// The subsets visited, ordered by size then mask value.
    pub fn masks(&self) -> Result<Vec<SubsystemMask>> {
        let k = self.shape.num_factors();
        let mut masks = match &self.policy {
            SubsetPolicy::AllProper => proper_masks(k)?,
            SubsetPolicy::Sizes(sizes) => {
                let mut sizes = sizes.clone();
                sizes.sort_unstable();
                sizes.dedup();
                let mut out = Vec::new();
                for s in sizes {
                    out.extend(masks_of_size(k, s)?);
                }
                out
            }
            SubsetPolicy::Sampled { per_size } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x5eed_5a3b_1e5e_7000);
                let mut out = Vec::new();
                for size in 1..k {
                    out.extend(sample_masks(k, size, *per_size, &mut rng)?);
                }
                out
            }
        };
        masks.sort_by_key(|m| (m.size(), m.bits()));
        Ok(masks)
    }

    /// The ontic vectors of the sweep, one per state id.
    pub fn states(&self) -> Result<Vec<OnticVector>> {
        let n = self.shape.total();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.num_states)
            .map(|_| match self.sampling {
                SamplingLaw::Uniform => random_ontic_with(n, &mut rng),
                SamplingLaw::FixedDensity(d) => {
                    let weight = ((d * n as f64).round() as usize).clamp(1, n - 1);
                    random_ontic_weighted(n, weight, rng.random())
                }
            })
            .collect()
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn sample_masks(
    k: usize,
    size: usize,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<SubsystemMask>> {
    if binomial(k, size) <= count as u128 {
        return masks_of_size(k, size);
    }
    let mut seen = std::collections::BTreeSet::new();
    while seen.len() < count {
        let positions: Vec<usize> = index::sample(rng, k, size).into_vec();
        seen.insert(SubsystemMask::from_positions(&positions, k)?);
    }
    Ok(seen.into_iter().collect())
}

/// One subsystem of one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub state_id: usize,
    pub subset_mask: u64,
    pub subset_size: usize,
    pub purity: f64,
    pub s2_bits: f64,
}

/// Records of a sweep together with the states that produced them.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub states: Vec<OnticVector>,
    pub records: Vec<SweepRecord>,
}

/// Computes `S_2(rho_A)` for every state and subset of the configuration.
///
/// Work is spread over the rayon pool by `(state, subset)` pairs; the output
/// order is `(state_id, |A|, mask)` regardless of scheduling.
pub fn run_sweep(config: &SweepConfig) -> Result<Sweep> {
    config.validate()?;
    let shape = &config.shape;
    let k = shape.num_factors();
    let masks = config.masks()?;
    let parts = masks
        .iter()
        .map(|&m| Bipartition::new(shape, m))
        .collect::<Result<Vec<_>>>()?;
    if let Some(worst) = parts.iter().map(|bp| bp.dim_a().min(bp.dim_b())).max() {
        if worst > config.gram_cap {
            return Err(Error::InvalidConfig(format!(
                "smaller-side Gram dimension {worst} exceeds the budget {}",
                config.gram_cap
            )));
        }
    }
    let ontic = config.states()?;
    let energy = match &config.basis {
        SweepBasis::Energy { generator, .. } => Some(EnergyBasis::new(generator)),
        SweepBasis::Ontic => None,
    };
    let states: Vec<PureState> = ontic
        .par_iter()
        .map(|q| {
            let psi = state_from_ontic(q, shape)?;
            match &energy {
                Some(b) => to_energy_basis(b, &psi),
                None => Ok(psi),
            }
        })
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..states.len())
        .flat_map(|s| (0..parts.len()).map(move |m| (s, m)))
        .collect();
    let mut records: Vec<SweepRecord> = jobs
        .par_iter()
        .map(|&(s, m)| {
            let p = purity_with(&states[s], &parts[m])?;
            let mask = masks[m];
            Ok(SweepRecord {
                state_id: s,
                subset_mask: mask.bits(),
                subset_size: mask.size(),
                purity: p,
                s2_bits: collision_entropy(p)?,
            })
        })
        .collect::<Result<_>>()?;
    records.sort_by_key(|r| (r.state_id, r.subset_size, r.subset_mask));
    check_records(shape, &records, k)?;
    Ok(Sweep {
        states: ontic,
        records,
    })
}

fn check_records(shape: &FactorizationShape, records: &[SweepRecord], k: usize) -> Result<()> {
    for r in records {
        let mask = SubsystemMask::new(r.subset_mask, k)?;
        let small = shape
            .subsystem_dim(mask)
            .min(shape.subsystem_dim(mask.complement()));
        let bound = (small as f64).log2();
        if r.s2_bits < -SIGN_TOL || r.s2_bits > bound + BOUND_TOL {
            return Err(Error::InvariantViolation(format!(
                "S2 = {} for state {} subset {mask} outside [0, {bound}]",
                r.s2_bits, r.state_id
            )));
        }
    }
    let worst = schmidt_deviation(records, k);
    if worst > SCHMIDT_TOL {
        return Err(Error::InvariantViolation(format!(
            "complementary subsystems differ by {worst:e} bits"
        )));
    }
    Ok(())
}

/// Largest `|S_2(A) - S_2(X \ A)|` over record pairs present in the input.
pub fn schmidt_deviation(records: &[SweepRecord], k: usize) -> f64 {
    let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let lookup: HashMap<(usize, u64), f64> = records
        .iter()
        .map(|r| ((r.state_id, r.subset_mask), r.s2_bits))
        .collect();
    records
        .iter()
        .filter_map(|r| {
            lookup
                .get(&(r.state_id, !r.subset_mask & full))
                .map(|other| (r.s2_bits - other).abs())
        })
        .fold(0.0, f64::max)
}

/// Statistics of `S_2` over all states and subsets of one size.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeStats {
    pub subset_size: usize,
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
    /// Standard deviation across states of each state's mean at this size.
    pub state_spread: f64,
    pub per_state_mean: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeSummary {
    pub num_factors: usize,
    pub rows: Vec<SizeStats>,
    /// Largest `|S_2(A) - S_2(X \ A)|` over individual record pairs.
    pub max_pair_asymmetry: f64,
    /// Largest difference of min, max or mean between sizes `s` and `K - s`.
    pub max_size_asymmetry: f64,
}

impl SizeSummary {
    pub fn row(&self, size: usize) -> Option<&SizeStats> {
        self.rows.iter().find(|r| r.subset_size == size)
    }
}

fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    var.sqrt()
}

/// Per-size aggregation of sweep records. Sizes without records are omitted.
pub fn summarize_by_size(records: &[SweepRecord], num_factors: usize) -> Result<SizeSummary> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut by_size: BTreeMap<usize, BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for r in records {
        by_size
            .entry(r.subset_size)
            .or_default()
            .entry(r.state_id)
            .or_default()
            .push(r.s2_bits);
    }
    let rows: Vec<SizeStats> = by_size
        .into_iter()
        .map(|(size, per_state)| {
            let all: Vec<f64> = per_state.values().flatten().copied().collect();
            let per_state_mean: Vec<f64> = per_state
                .values()
                .map(|v| v.iter().sum::<f64>() / v.len() as f64)
                .collect();
            SizeStats {
                subset_size: size,
                count: all.len(),
                min: all.iter().copied().fold(f64::INFINITY, f64::min),
                max: all.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                mean: all.iter().sum::<f64>() / all.len() as f64,
                std: sample_std(&all),
                state_spread: sample_std(&per_state_mean),
                per_state_mean,
            }
        })
        .collect();
    let mut max_size_asymmetry = 0.0f64;
    for row in &rows {
        if let Some(mirror) = rows
            .iter()
            .find(|r| r.subset_size + row.subset_size == num_factors)
        {
            for (a, b) in [
                (row.min, mirror.min),
                (row.max, mirror.max),
                (row.mean, mirror.mean),
            ] {
                max_size_asymmetry = max_size_asymmetry.max((a - b).abs());
            }
        }
    }
    Ok(SizeSummary {
        num_factors,
        rows,
        max_pair_asymmetry: schmidt_deviation(records, num_factors),
        max_size_asymmetry,
    })
}

/// `S_2(rho_A(t))` for `psi(t) = g^t psi(0)`, with `psi(0)` built from `q`.
///
/// Without `allow_wrap` the range must lie inside `[0, order(g)]`.
pub fn run_time_series(
    shape: &FactorizationShape,
    q: &OnticVector,
    g: &Permutation,
    mask: SubsystemMask,
    t_range: Range<i64>,
    allow_wrap: bool,
) -> Result<Vec<(i64, f64)>> {
    if !allow_wrap {
        let within = t_range.start >= 0 && BigUint::from(t_range.end.max(0) as u64) <= g.order();
        if !within {
            return Err(Error::WrapNotAllowed);
        }
    }
    let psi0 = state_from_ontic(q, shape)?;
    mask.require_proper()?;
    let bp = Bipartition::new(shape, mask)?;
    t_range
        .map(|t| {
            let psi = apply_permutation(g, &psi0, t)?;
            Ok((t, collision_entropy(purity_with(&psi, &bp)?)?))
        })
        .collect()
}

/// Mean number of `l`-cycles per sampled permutation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusRow {
    pub length: usize,
    pub mean: f64,
    pub std_error: f64,
    pub expected: f64,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleCensus {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub rows: Vec<CensusRow>,
}

impl CycleCensus {
    pub fn flagged(&self) -> impl Iterator<Item = &CensusRow> {
        self.rows.iter().filter(|r| r.flagged)
    }
}

/// Lengths checked against the `1/l` expectation.
pub const CENSUS_CHECKED_LENGTHS: usize = 8;

/// Samples `samples` uniform permutations of `n` points and tallies cycle
/// counts. Rows with `l <= 8` whose mean is more than three standard errors
/// from `1/l` are flagged.
pub fn run_cycle_census(n: usize, samples: usize, seed: u64) -> Result<CycleCensus> {
    if samples == 0 {
        return Err(Error::InvalidConfig(
            "census needs at least one sample".into(),
        ));
    }
    if n == 0 {
        return Err(Error::InvalidConfig("census needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = vec![0u64; n + 1];
    let mut sum_sq = vec![0u64; n + 1];
    for _ in 0..samples {
        let counts = random_permutation_with(n, &mut rng).cycle_counts();
        for l in 1..=n {
            let c = counts[l] as u64;
            sum[l] += c;
            sum_sq[l] += c * c;
        }
    }
    let m = samples as f64;
    let rows = (1..=n)
        .map(|l| {
            let mean = sum[l] as f64 / m;
            let var = if samples > 1 {
                ((sum_sq[l] as f64 - m * mean * mean) / (m - 1.0)).max(0.0)
            } else {
                0.0
            };
            let std_error = (var / m).sqrt();
            let expected = 1.0 / l as f64;
            let dev = (mean - expected).abs();
            let flagged = l <= CENSUS_CHECKED_LENGTHS
                && if std_error > 0.0 {
                    dev > 3.0 * std_error
                } else {
                    dev > 1e-12
                };
            CensusRow {
                length: l,
                mean,
                std_error,
                expected,
                flagged,
            }
        })
        .collect();
    Ok(CycleCensus {
        n,
        samples,
        seed,
        rows,
    })
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}

/// Metadata lines and the records of a sweep as CSV.
pub fn write_sweep_csv<W: Write>(
    mut out: W,
    config: &SweepConfig,
    sweep: &Sweep,
) -> io::Result<()> {
    writeln!(out, "# tool: {TOOL_VERSION}")?;
    writeln!(out, "# shape: {}", config.shape)?;
    let dims: Vec<String> = config.shape.dims().iter().map(|d| d.to_string()).collect();
    writeln!(out, "# dims: {}", dims.join("x"))?;
    writeln!(out, "# states: {}", config.num_states)?;
    writeln!(out, "# seed: {}", config.seed)?;
    match &config.basis {
        SweepBasis::Ontic => writeln!(out, "# basis: ontic")?,
        SweepBasis::Energy { generator, label } => {
            writeln!(out, "# basis: energy")?;
            writeln!(out, "# generator: {label}")?;
            let mut ty = generator.cycle_type();
            ty.sort_unstable_by(|a, b| b.cmp(a));
            let parts: Vec<String> = ty.iter().map(|l| l.to_string()).collect();
            writeln!(out, "# generator_cycle_type: {}", parts.join(","))?;
        }
    }
    writeln!(out, "# subset_policy: {}", config.policy.describe())?;
    writeln!(out, "# sampling_law: {}", config.sampling.describe())?;
    writeln!(out, "# log_base: 2")?;
    writeln!(
        out,
        "# subset_mask: bit k-1 set means point k of 1..K belongs to A"
    )?;
    for (i, q) in sweep.states.iter().enumerate() {
        writeln!(out, "# state {i}: {q}")?;
    }
    writeln!(out, "state_id,subset_mask,subset_size,purity,s2_bits")?;
    for r in &sweep.records {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.state_id,
            r.subset_mask,
            r.subset_size,
            fmt_f64(r.purity),
            fmt_f64(r.s2_bits)
        )?;
    }
    Ok(())
}

/// Per-size min/mean/max data file accompanying a sweep CSV.
pub fn write_summary_csv<W: Write>(mut out: W, summary: &SizeSummary) -> io::Result<()> {
    writeln!(out, "# tool: {TOOL_VERSION}")?;
    writeln!(out, "# log_base: 2")?;
    writeln!(
        out,
        "# max_pair_asymmetry: {}",
        fmt_f64(summary.max_pair_asymmetry)
    )?;
    writeln!(
        out,
        "# max_size_asymmetry: {}",
        fmt_f64(summary.max_size_asymmetry)
    )?;
    writeln!(out, "subset_size,count,min,mean,max,std,state_spread")?;
    for r in &summary.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.subset_size,
            r.count,
            fmt_f64(r.min),
            fmt_f64(r.mean),
            fmt_f64(r.max),
            fmt_f64(r.std),
            fmt_f64(r.state_spread)
        )?;
    }
    Ok(())
}

/// Declarative description of the entropy-versus-subsystem figure: one
/// series per state, points ordered by subsystem size then mask, with the
/// maximal-mixing line `S_2 = min(|A|, K - |A|) log2 d` as reference.
pub fn plot_spec(config: &SweepConfig, data_file: &str, summary_file: &str) -> serde_json::Value {
    let k = config.shape.num_factors();
    let d = config.shape.max_dim() as f64;
    let reference: Vec<serde_json::Value> = (1..k)
        .map(|s| serde_json::json!({ "subset_size": s, "s2_bits": (s.min(k - s) as f64) * d.log2() }))
        .collect();
    serde_json::json!({
        "format": "mereology-plot/1",
        "title": format!("Collision entropy of subsystems, shape {}", config.shape),
        "data": {
            "file": data_file,
            "comment_prefix": "#",
            "columns": ["state_id", "subset_mask", "subset_size", "purity", "s2_bits"]
        },
        "summary": { "file": summary_file, "columns": ["subset_size", "count", "min", "mean", "max", "std", "state_spread"] },
        "mark": "line+point",
        "x": {
            "value": "row rank within state_id",
            "order_by": ["subset_size", "subset_mask"],
            "group_ticks_by": "subset_size",
            "label": "subsystem A (grouped by |A|)"
        },
        "y": { "field": "s2_bits", "label": "S2(rho_A) [bits]", "min": 0.0 },
        "series": { "field": "state_id" },
        "reference_lines": [{ "label": "maximally mixed", "points": reference }],
        "band": { "file": summary_file, "x": "subset_size", "low": "min", "mid": "mean", "high": "max" }
    })
}
