//! Permutations of the ontic set as evolution generators, and the block
//! Fourier transform to the basis in which a permutation matrix is diagonal.
//!
//! Points act on the right: `images[i] = i g`. The permutation matrix is
//! `P(g)[i][j] = 1` iff `i g == j`, so a cycle `(c_0 c_1 ... c_{l-1})` with
//! `c_j g = c_{j+1}` restricts to the cyclic shift `C_l` with ones on the
//! superdiagonal and in the bottom-left corner. Its diagonalizing block is
//! `F_l[j][k] = w^{-jk} / sqrt(l)` with `w = exp(2 pi i / l)`, giving
//! `F_l C_l F_l^{-1} = diag(1, w, ..., w^{l-1})`.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitstate::OnticVector;
use crate::error::{Error, Result};
use crate::states::{Basis, PureState};

/// Bijection of `{0, ..., N-1}` with its disjoint-cycle decomposition.
///
/// Cycles are canonical: each starts at its smallest point and cycles are
/// sorted by that point. Fixed points are length-1 cycles.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
    cycles: Vec<Vec<usize>>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
            cycles: (0..n).map(|i| vec![i]).collect(),
        }
    }

    /// From the image array `images[i] = i g`.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &j in &images {
            if j >= n {
                return Err(Error::InvalidCycle(format!("image {j} out of range {n}")));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidCycle(format!(
                    "point {j} is the image of two points"
                )));
            }
        }
        let cycles = canonical_cycles(&images);
        Ok(Self { images, cycles })
    }

    /// From disjoint cycles; points not mentioned are fixed.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        for cycle in cycles {
            if cycle.is_empty() {
                return Err(Error::InvalidCycle("empty cycle".into()));
            }
            for &p in cycle {
                if p >= n {
                    return Err(Error::InvalidCycle(format!("point {p} out of range {n}")));
                }
                if std::mem::replace(&mut used[p], true) {
                    return Err(Error::InvalidCycle(format!("point {p} appears twice")));
                }
            }
            for (j, &p) in cycle.iter().enumerate() {
                images[p] = cycle[(j + 1) % cycle.len()];
            }
        }
        let cycles = canonical_cycles(&images);
        Ok(Self { images, cycles })
    }

    /// Parses cycle notation such as `"(0 1 2)(3 4)"`; commas also separate.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        Self::from_cycles(n, &parse_cycles(text)?)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    /// `i g`.
    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    /// Cycle lengths in canonical cycle order.
    pub fn cycle_type(&self) -> Vec<usize> {
        self.cycles.iter().map(Vec::len).collect()
    }

    /// `counts[l]` is the number of `l`-cycles; index 0 is unused.
    pub fn cycle_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.len() + 1];
        for c in &self.cycles {
            counts[c.len()] += 1;
        }
        counts
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Order of `g` in the group: the lcm of its cycle lengths.
    pub fn order(&self) -> BigUint {
        let mut lengths: Vec<usize> = self.cycle_type();
        lengths.sort_unstable();
        lengths.dedup();
        lengths.into_iter().fold(BigUint::from(1u8), |acc, l| {
            let l = BigUint::from(l);
            let g = gcd(&acc, &l);
            acc / g * l
        })
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Self::from_images(inv).expect("inverse of a bijection")
    }

    /// Image array of `g^t`; negative `t` gives powers of the inverse.
    pub fn power_images(&self, t: i64) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for c in &self.cycles {
            let l = c.len();
            let s = t.rem_euclid(l as i64) as usize;
            for (j, &p) in c.iter().enumerate() {
                out[p] = c[(j + s) % l];
            }
        }
        out
    }

    /// Explicit permutation matrix `P(g)[i][j] = delta(i g, j)`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| if self.images[i] == j { 1.0 } else { 0.0 })
    }
}

fn gcd(a: &BigUint, b: &BigUint) -> BigUint {
    let (mut a, mut b) = (a.clone(), b.clone());
    while b != BigUint::from(0u8) {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn canonical_cycles(images: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; images.len()];
    let mut cycles = Vec::new();
    // scanning in increasing order makes each cycle start at its minimum and
    // keeps the cycle list sorted by minimum
    for start in 0..images.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut p = images[start];
        while p != start {
            seen[p] = true;
            cycle.push(p);
            p = images[p];
        }
        cycles.push(cycle);
    }
    cycles
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for c in self.cycles.iter().filter(|c| c.len() > 1) {
            any = true;
            let parts: Vec<String> = c.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]{}", self.len(), self)
    }
}

/// Splits `"(0 1 2)(3 4)"` into cycles. Does not check disjointness.
pub fn parse_cycles(text: &str) -> Result<Vec<Vec<usize>>> {
    let mut cycles = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| Error::Parse(format!("expected '(' at {rest:?}")))?;
        let close = body
            .find(')')
            .ok_or_else(|| Error::Parse("unclosed cycle".into()))?;
        let points = body[..close]
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad point {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if !points.is_empty() {
            cycles.push(points);
        }
        rest = body[close + 1..].trim_start();
    }
    Ok(cycles)
}

/// Uniform random element of `S_n` (Fisher-Yates), deterministic per seed.
pub fn random_permutation(n: usize, seed: u64) -> Permutation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_permutation_with(n, &mut rng)
}

pub fn random_permutation_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    let mut images: Vec<usize> = (0..n).collect();
    images.shuffle(rng);
    Permutation::from_images(images).expect("shuffle yields a bijection")
}

/// Relabels basis vectors `t` times: `out[i g^t] = amps[i]`.
///
/// Only defined for ontic-basis states. `t` is reduced modulo each cycle
/// length, which is the same as reducing it modulo the order of `g`.
pub fn apply_permutation(g: &Permutation, psi: &PureState, t: i64) -> Result<PureState> {
    if g.len() != psi.len() {
        return Err(Error::SizeMismatch(g.len(), psi.len()));
    }
    if psi.basis() != Basis::Ontic {
        return Err(Error::BasisMismatch { expected: "ontic" });
    }
    let amps = psi.amps();
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for c in g.cycles() {
        let l = c.len();
        let s = t.rem_euclid(l as i64) as usize;
        for (j, &p) in c.iter().enumerate() {
            out[c[(j + s) % l]] = amps[p];
        }
    }
    Ok(PureState::from_parts_unchecked(
        out,
        psi.shape().clone(),
        Basis::Ontic,
    ))
}

/// Image of the subset `q` under `g^t`: bit `i g^t` of the result is bit `i`
/// of `q`.
pub fn evolve_ontic(g: &Permutation, q: &OnticVector, t: i64) -> Result<OnticVector> {
    if g.len() != q.len() {
        return Err(Error::SizeMismatch(g.len(), q.len()));
    }
    let images = g.power_images(t);
    OnticVector::from_indices(q.len(), q.ones_indices().map(|i| images[i]))
}

/// `l`-th roots of unity `w^m = exp(2 pi i m / l)` for `m < l`.
fn roots_of_unity(l: usize) -> Vec<Complex64> {
    (0..l)
        .map(|m| {
            let (s, c) = (TAU * m as f64 / l as f64).sin_cos();
            Complex64::new(c, s)
        })
        .collect()
}

/// `exp(2 pi i k / l)`.
pub fn root_of_unity(l: usize, k: usize) -> Complex64 {
    let (s, c) = (TAU * (k % l) as f64 / l as f64).sin_cos();
    Complex64::new(c, s)
}

/// The `l x l` cyclic shift matrix with `C[i][i+1 mod l] = 1`.
pub fn cycle_matrix(l: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(l, l, |i, j| {
        if (i + 1) % l == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Fourier block `F_l[j][k] = w^{-jk} / sqrt(l)`, unitary and symmetric.
pub fn fourier_block(l: usize) -> DMatrix<Complex64> {
    assert!(l >= 1, "cycle length must be positive");
    let roots = roots_of_unity(l);
    let scale = 1.0 / (l as f64).sqrt();
    DMatrix::from_fn(l, l, |j, k| roots[(l - (j * k) % l) % l] * scale)
}

/// Transition from the ontic basis to the eigenbasis of `P(g)`.
///
/// `F = (F_{l_1} + ... + F_{l_M}) R` where `R` lists the points of each
/// canonical cycle contiguously. The eigenvalue at energy index
/// `offset_m + k` is `w_{l_m}^k`.
#[derive(Clone, Debug)]
pub struct EnergyBasis {
    generator: Permutation,
    point_order: Vec<usize>,
    blocks: Vec<usize>,
    offsets: Vec<usize>,
    eigenphases: Vec<(usize, usize)>,
    roots: HashMap<usize, Vec<Complex64>>,
}

impl EnergyBasis {
    pub fn new(g: &Permutation) -> Self {
        let mut point_order = Vec::with_capacity(g.len());
        let mut blocks = Vec::new();
        let mut offsets = Vec::new();
        let mut eigenphases = Vec::with_capacity(g.len());
        let mut roots = HashMap::new();
        for c in g.cycles() {
            let l = c.len();
            offsets.push(point_order.len());
            point_order.extend_from_slice(c);
            blocks.push(l);
            eigenphases.extend((0..l).map(|k| (l, k)));
            roots.entry(l).or_insert_with(|| roots_of_unity(l));
        }
        Self {
            generator: g.clone(),
            point_order,
            blocks,
            offsets,
            eigenphases,
            roots,
        }
    }

    pub fn generator(&self) -> &Permutation {
        &self.generator
    }

    /// Ontic points in block order.
    pub fn point_order(&self) -> &[usize] {
        &self.point_order
    }

    /// Cycle lengths `l_m`.
    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    /// `(l, k)` for each energy index; the eigenvalue is `exp(2 pi i k / l)`.
    pub fn eigenphases(&self) -> &[(usize, usize)] {
        &self.eigenphases
    }

    pub fn eigenvalue(&self, index: usize) -> Complex64 {
        let (l, k) = self.eigenphases[index];
        root_of_unity(l, k)
    }

    pub fn len(&self) -> usize {
        self.point_order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.point_order.is_empty()
    }

    /// Dense `F`; refuses `N > cap`.
    pub fn dense_matrix(&self, cap: usize) -> Result<DMatrix<Complex64>> {
        let n = self.len();
        if n > cap {
            return Err(Error::DimensionCap { dim: n, cap });
        }
        let mut f = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for (m, &l) in self.blocks.iter().enumerate() {
            let off = self.offsets[m];
            let roots = &self.roots[&l];
            let scale = 1.0 / (l as f64).sqrt();
            for k in 0..l {
                for j in 0..l {
                    let p = self.point_order[off + j];
                    f[(off + k, p)] = roots[(l - (j * k) % l) % l] * scale;
                }
            }
        }
        Ok(f)
    }

    /// `F psi` by per-block direct transforms.
    pub fn forward(&self, amps: &[Complex64]) -> Result<Vec<Complex64>> {
        self.transform(amps, false)
    }

    /// `F^{-1} phi = F^dagger phi`.
    pub fn inverse(&self, amps: &[Complex64]) -> Result<Vec<Complex64>> {
        self.transform(amps, true)
    }

    fn transform(&self, amps: &[Complex64], inverse: bool) -> Result<Vec<Complex64>> {
        if amps.len() != self.len() {
            return Err(Error::SizeMismatch(self.len(), amps.len()));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        let mut gathered = Vec::new();
        for (m, &l) in self.blocks.iter().enumerate() {
            let off = self.offsets[m];
            let points = &self.point_order[off..off + l];
            if l == 1 {
                let p = points[0];
                if inverse {
                    out[p] = amps[off];
                } else {
                    out[off] = amps[p];
                }
                continue;
            }
            let roots = &self.roots[&l];
            let scale = 1.0 / (l as f64).sqrt();
            gathered.clear();
            if inverse {
                gathered.extend_from_slice(&amps[off..off + l]);
            } else {
                gathered.extend(points.iter().map(|&p| amps[p]));
            }
            for k in 0..l {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut idx = 0usize;
                for x in &gathered {
                    // forward uses w^{-jk}, inverse w^{+jk}
                    let r = if inverse {
                        roots[idx]
                    } else {
                        roots[(l - idx) % l]
                    };
                    acc += x * r;
                    idx += k;
                    if idx >= l {
                        idx -= l;
                    }
                }
                let value = acc * scale;
                if inverse {
                    out[points[k]] = value;
                } else {
                    out[off + k] = value;
                }
            }
        }
        Ok(out)
    }
}

/// `F psi` for an ontic-basis state; the result is tagged as an energy-basis state.
pub fn to_energy_basis(basis: &EnergyBasis, psi: &PureState) -> Result<PureState> {
    if psi.basis() != Basis::Ontic {
        return Err(Error::BasisMismatch { expected: "ontic" });
    }
    let amps = basis.forward(psi.amps())?;
    Ok(PureState::from_parts_unchecked(
        amps,
        psi.shape().clone(),
        Basis::Energy,
    ))
}

/// `F^{-1} phi` for an energy-basis state.
pub fn from_energy_basis(basis: &EnergyBasis, phi: &PureState) -> Result<PureState> {
    if phi.basis() != Basis::Energy {
        return Err(Error::BasisMismatch { expected: "energy" });
    }
    let amps = basis.inverse(phi.amps())?;
    Ok(PureState::from_parts_unchecked(
        amps,
        phi.shape().clone(),
        Basis::Ontic,
    ))
}
