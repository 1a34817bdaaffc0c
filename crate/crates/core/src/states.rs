//! Pure states in the standard subspace and density matrices.

use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bitstate::OnticVector;
use crate::error::{Error, Result};
use crate::indexing::FactorizationShape;

/// Default cap on `N` for materializing a global density matrix.
pub const DEFAULT_DENSITY_CAP: usize = 256;

const NORM_TOL: f64 = 1e-12;
const STANDARD_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;

/// Basis the amplitudes of a [`PureState`] are expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    /// The permutation basis indexed by the ontic set.
    Ontic,
    /// The eigenbasis of a permutation generator.
    Energy,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::Ontic => "ontic",
            Basis::Energy => "energy",
        }
    }
}

/// Unit vector of length `N` paired with a factorization of `N`.
///
/// In the ontic basis the state is orthogonal to the all-ones vector. The
/// energy-basis image of such a state generally is not, so that check only
/// applies to ontic-basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
    shape: FactorizationShape,
    basis: Basis,
}

impl PureState {
    pub fn new(amps: Vec<Complex64>, shape: FactorizationShape, basis: Basis) -> Result<Self> {
        if amps.len() != shape.total() {
            return Err(Error::SizeMismatch(amps.len(), shape.total()));
        }
        let norm = kahan_sum(amps.iter().map(|a| a.norm_sqr()));
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        if basis == Basis::Ontic {
            let along: Complex64 = amps.iter().sum();
            if along.norm() > STANDARD_TOL {
                return Err(Error::NotStandard(along.norm()));
            }
        }
        Ok(Self { amps, shape, basis })
    }

    pub(crate) fn from_parts_unchecked(
        amps: Vec<Complex64>,
        shape: FactorizationShape,
        basis: Basis,
    ) -> Self {
        debug_assert_eq!(amps.len(), shape.total());
        Self { amps, shape, basis }
    }

    #[inline]
    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    #[inline]
    pub fn shape(&self) -> &FactorizationShape {
        &self.shape
    }

    #[inline]
    pub fn basis(&self) -> Basis {
        self.basis
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        kahan_sum(self.amps.iter().map(|a| a.norm_sqr()))
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch(self.len(), other.len()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Same amplitudes under a different factorization of the same `N`.
    pub fn with_shape(mut self, shape: FactorizationShape) -> Result<Self> {
        if shape.total() != self.amps.len() {
            return Err(Error::SizeMismatch(shape.total(), self.amps.len()));
        }
        self.shape = shape;
        Ok(self)
    }

    /// Writes `index,re,im` rows with a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "index,re,im")?;
        for (i, a) in self.amps.iter().enumerate() {
            writeln!(out, "{i},{:.16e},{:.16e}", a.re, a.im)?;
        }
        Ok(())
    }
}

/// Natural vector of order `m`: entries in `{0, ..., m}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalVector {
    entries: Vec<u64>,
    order: u64,
}

impl NaturalVector {
    pub fn new(entries: Vec<u64>, order: u64) -> Result<Self> {
        if order < 2 {
            return Err(Error::DomainError(format!("order {order} < 2")));
        }
        if entries.len() < 2 {
            return Err(Error::InvalidShape(
                "natural vectors need length >= 2".into(),
            ));
        }
        if let Some(e) = entries.iter().find(|&&e| e > order) {
            return Err(Error::DomainError(format!(
                "entry {e} exceeds order {order}"
            )));
        }
        if entries.iter().all(|&e| e == 0) {
            return Err(Error::DegenerateState {
                popcount: 0,
                len: entries.len(),
            });
        }
        Ok(Self { entries, order })
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn order(&self) -> u64 {
        self.order
    }
}

impl From<&OnticVector> for NaturalVector {
    fn from(q: &OnticVector) -> Self {
        Self {
            entries: q.iter().map(u64::from).collect(),
            order: 2,
        }
    }
}

/// `P v = v - mean(v) * omega`, the projection onto the standard subspace.
pub fn project_standard(v: &[Complex64]) -> Vec<Complex64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mean = v.iter().sum::<Complex64>() / v.len() as f64;
    v.iter().map(|x| x - mean).collect()
}

/// The normalized projection of an ontic vector,
/// `(q - alpha omega) / sqrt(N alpha (1 - alpha))` with `alpha = pop(q) / N`.
///
/// Evaluated as `(N q_i - pop(q)) / sqrt(N pop(q) (N - pop(q)))` so that the
/// numerators are exact integers and `state(!q) == -state(q)` bit for bit.
pub fn state_from_ontic(q: &OnticVector, shape: &FactorizationShape) -> Result<PureState> {
    if q.len() != shape.total() {
        return Err(Error::LengthMismatch(q.len(), shape.total()));
    }
    let n = q.len() as i64;
    let p = q.popcount() as i64;
    if p == 0 || p == n {
        return Err(Error::DegenerateState {
            popcount: p as usize,
            len: q.len(),
        });
    }
    let denom = ((n as f64) * (p as f64) * ((n - p) as f64)).sqrt();
    let hi = (n - p) as f64 / denom;
    let lo = -(p as f64) / denom;
    let amps = q
        .iter()
        .map(|b| Complex64::new(if b { hi } else { lo }, 0.0))
        .collect();
    Ok(PureState::from_parts_unchecked(
        amps,
        shape.clone(),
        Basis::Ontic,
    ))
}

/// Normalized standard-subspace projection of a natural vector.
pub fn state_from_natural(v: &NaturalVector, shape: &FactorizationShape) -> Result<PureState> {
    if v.entries.len() != shape.total() {
        return Err(Error::LengthMismatch(v.entries.len(), shape.total()));
    }
    let n = v.entries.len() as i128;
    let sum: i128 = v.entries.iter().map(|&e| e as i128).sum();
    // N * (P v), exact
    let scaled: Vec<i128> = v.entries.iter().map(|&e| n * e as i128 - sum).collect();
    let norm_sq: u128 = scaled.iter().map(|&x| (x * x) as u128).sum();
    if norm_sq == 0 {
        return Err(Error::DegenerateState {
            popcount: v.entries.iter().filter(|&&e| e != 0).count(),
            len: v.entries.len(),
        });
    }
    let norm = (norm_sq as f64).sqrt();
    let amps = scaled
        .iter()
        .map(|&x| Complex64::new(x as f64 / norm, 0.0))
        .collect();
    Ok(PureState::from_parts_unchecked(
        amps,
        shape.clone(),
        Basis::Ontic,
    ))
}

/// `|psi><psi|` as a dense matrix; refuses `N > cap`.
pub fn density_full(psi: &PureState, cap: usize) -> Result<DensityMatrix> {
    let n = psi.len();
    if n > cap {
        return Err(Error::DimensionCap { dim: n, cap });
    }
    let a = psi.amps();
    let m = DMatrix::from_fn(n, n, |i, j| a[i] * a[j].conj());
    Ok(DensityMatrix { matrix: m })
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates all three density-matrix conditions; the PSD check costs an
    /// eigendecomposition.
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::SizeMismatch(matrix.nrows(), matrix.ncols()));
        }
        let asym = hermitian_defect(&matrix);
        if asym > HERMITIAN_TOL {
            return Err(Error::NotHermitian(asym));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min = matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { matrix })
    }

    /// For matrices that are Gram matrices of a unit-norm factor.
    pub(crate) fn from_gram_unchecked(matrix: DMatrix<Complex64>) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    /// Largest `|rho_ij - conj(rho_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.matrix)
    }

    /// `tr(rho^2)` from the explicit sum
    /// `sum_i rho_ii^2 + 2 sum_{i<j} |rho_ij|^2`.
    pub fn purity_sum_formula(&self) -> f64 {
        let n = self.dim();
        let diag: f64 = (0..n).map(|i| self.matrix[(i, i)].re.powi(2)).sum();
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += self.matrix[(i, j)].norm_sqr();
            }
        }
        diag + 2.0 * off
    }

    /// Squared Frobenius norm, which equals `tr(rho^2)` for Hermitian `rho`.
    pub fn frobenius_sqr(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Compensated (Kahan) summation.
pub(crate) fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}
