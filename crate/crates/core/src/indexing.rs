//! Tensor factorizations of the global space and the mixed-radix bijection
//! between global basis indices and tuples of local indices.
//!
//! Local index `i_1` is the most significant digit:
//! `i = i_1 d_2 ... d_K + ... + i_{K-1} d_K + i_K`.
//! Points of the factorization are numbered `1..=K` in text and `0..K` in code.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Maximum number of tensor factors; subsystem masks are stored in a `u64`.
pub const MAX_FACTORS: usize = 64;

/// Ordered local dimensions `(d_1, ..., d_K)` with product `N`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FactorizationShape {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl FactorizationShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidShape(
                "at least one factor is required".into(),
            ));
        }
        if dims.len() > MAX_FACTORS {
            return Err(Error::InvalidShape(format!(
                "{} factors exceeds the maximum of {MAX_FACTORS}",
                dims.len()
            )));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidShape(format!("local dimension {d} < 2")));
        }
        let mut strides = vec![1usize; dims.len()];
        for k in (0..dims.len() - 1).rev() {
            strides[k] = strides[k + 1]
                .checked_mul(dims[k + 1])
                .ok_or_else(|| Error::InvalidShape("dimension overflows usize".into()))?;
        }
        let total = strides[0]
            .checked_mul(dims[0])
            .ok_or_else(|| Error::InvalidShape("dimension overflows usize".into()))?;
        Ok(Self {
            dims,
            strides,
            total,
        })
    }

    /// `d^k`, e.g. `uniform(2, 12)` for twelve qubits.
    pub fn uniform(d: usize, k: usize) -> Result<Self> {
        Self::new(vec![d; k])
    }

    #[inline]
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    #[inline]
    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Number of factors `K`.
    #[inline]
    pub fn num_factors(&self) -> usize {
        self.dims.len()
    }

    /// Global dimension `N`.
    #[inline]
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn is_uniform(&self) -> bool {
        self.dims.iter().all(|&d| d == self.dims[0])
    }

    pub fn max_dim(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(1)
    }

    /// Product of the local dimensions selected by `mask`.
    pub fn subsystem_dim(&self, mask: SubsystemMask) -> usize {
        mask.positions().map(|k| self.dims[k]).product()
    }

    pub fn encode(&self, locals: &[usize]) -> Result<usize> {
        if locals.len() != self.dims.len() {
            return Err(Error::SizeMismatch(locals.len(), self.dims.len()));
        }
        let mut i = 0;
        for ((&l, &d), &s) in locals.iter().zip(&self.dims).zip(&self.strides) {
            if l >= d {
                return Err(Error::IndexOutOfRange { index: l, bound: d });
            }
            i += l * s;
        }
        Ok(i)
    }

    pub fn decode(&self, i: usize) -> Result<Vec<usize>> {
        self.check_index(i)?;
        Ok(self
            .strides
            .iter()
            .zip(&self.dims)
            .map(|(&s, &d)| (i / s) % d)
            .collect())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.total {
            return Err(Error::IndexOutOfRange {
                index: i,
                bound: self.total,
            });
        }
        Ok(())
    }

    /// Row index into subsystem `mask` and column index into its complement
    /// for global index `i`. See [`Bipartition`] for the repeated-use form.
    pub fn split_index(&self, mask: SubsystemMask, i: usize) -> Result<(usize, usize)> {
        let bp = Bipartition::new(self, mask)?;
        self.check_index(i)?;
        Ok(bp.split(i))
    }

    pub fn check_mask(&self, mask: SubsystemMask) -> Result<()> {
        if mask.num_points() != self.num_factors() {
            return Err(Error::InvalidMask(format!(
                "mask over {} points used with a {}-factor shape",
                mask.num_points(),
                self.num_factors()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for FactorizationShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_uniform() && self.dims.len() > 1 {
            return write!(f, "{}^{}", self.dims[0], self.dims.len());
        }
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl fmt::Debug for FactorizationShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FactorizationShape({self})")
    }
}

/// Accepts `"2x3x2"`, `"2^12"` and mixtures such as `"3x2^4"`.
impl FromStr for FactorizationShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut dims = Vec::new();
        for part in s.trim().split(['x', 'X', '*']) {
            let part = part.trim();
            let parse = |t: &str| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad shape component {t:?}: {e}")))
            };
            match part.split_once('^') {
                Some((base, exp)) => {
                    let base = parse(base)?;
                    let exp = parse(exp)?;
                    if exp > MAX_FACTORS {
                        return Err(Error::InvalidShape(format!("exponent {exp} too large")));
                    }
                    dims.extend(std::iter::repeat_n(base, exp));
                }
                None => dims.push(parse(part)?),
            }
        }
        Self::new(dims)
    }
}

/// A subset `A` of the points `{0, ..., K-1}` of a factorization.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsystemMask {
    bits: u64,
    points: u8,
}

impl SubsystemMask {
    pub fn new(bits: u64, num_points: usize) -> Result<Self> {
        if num_points == 0 || num_points > MAX_FACTORS {
            return Err(Error::InvalidMask(format!("{num_points} points")));
        }
        if num_points < 64 && bits >> num_points != 0 {
            return Err(Error::InvalidMask(format!(
                "mask {bits:#x} has points beyond {num_points}"
            )));
        }
        Ok(Self {
            bits,
            points: num_points as u8,
        })
    }

    /// From zero-based positions.
    pub fn from_positions(positions: &[usize], num_points: usize) -> Result<Self> {
        let mut bits = 0u64;
        for &p in positions {
            if p >= num_points {
                return Err(Error::InvalidMask(format!(
                    "position {} outside 1..={num_points}",
                    p + 1
                )));
            }
            bits |= 1 << p;
        }
        Self::new(bits, num_points)
    }

    /// Parses a one-based comma list such as `"1,3,5"`.
    pub fn parse(s: &str, num_points: usize) -> Result<Self> {
        let positions = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                let p: usize = t
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad subsystem point {t:?}: {e}")))?;
                if p == 0 {
                    return Err(Error::InvalidMask("points are numbered from 1".into()));
                }
                Ok(p - 1)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_positions(&positions, num_points)
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn num_points(self) -> usize {
        self.points as usize
    }

    /// `|A|`.
    #[inline]
    pub fn size(self) -> usize {
        self.bits.count_ones() as usize
    }

    fn full_bits(self) -> u64 {
        if self.points == 64 {
            u64::MAX
        } else {
            (1u64 << self.points) - 1
        }
    }

    /// `X \ A`.
    pub fn complement(self) -> Self {
        Self {
            bits: !self.bits & self.full_bits(),
            points: self.points,
        }
    }

    pub fn contains(self, position: usize) -> bool {
        position < self.num_points() && self.bits >> position & 1 == 1
    }

    /// Neither empty nor the whole point set.
    pub fn is_proper(self) -> bool {
        self.bits != 0 && self.bits != self.full_bits()
    }

    /// Zero-based positions in ascending order.
    pub fn positions(self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (0..self.num_points()).filter(move |&p| bits >> p & 1 == 1)
    }

    pub fn require_proper(self) -> Result<Self> {
        if self.is_proper() {
            Ok(self)
        } else {
            Err(Error::TrivialSubsystem)
        }
    }
}

impl fmt::Display for SubsystemMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.positions().map(|p| (p + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for SubsystemMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubsystemMask({self} of {})", self.points)
    }
}

/// All proper nonempty subsets of `k` points with `|A| = size`, in increasing
/// mask value.
pub fn masks_of_size(k: usize, size: usize) -> Result<Vec<SubsystemMask>> {
    if k == 0 || k > 30 {
        return Err(Error::InvalidConfig(format!(
            "enumerating subsets of {k} points is not supported"
        )));
    }
    Ok((0u64..1 << k)
        .filter(|b| b.count_ones() as usize == size)
        .map(|b| SubsystemMask {
            bits: b,
            points: k as u8,
        })
        .collect())
}

/// Every proper subset, ordered by increasing size and increasing mask value
/// within a size.
pub fn proper_masks(k: usize) -> Result<Vec<SubsystemMask>> {
    let mut out = Vec::new();
    for size in 1..k {
        out.extend(masks_of_size(k, size)?);
    }
    Ok(out)
}

/// Precomputed view of a bipartition `A | X \ A` of a shape.
///
/// Row indices are the mixed-radix encoding of the local indices at the
/// positions of `A` in ascending order, columns likewise for the complement.
#[derive(Clone, Debug)]
pub struct Bipartition {
    mask: SubsystemMask,
    dims: Vec<usize>,
    strides: Vec<usize>,
    // for each position: weight in the row (A) or column (complement) index
    weights: Vec<usize>,
    in_a: Vec<bool>,
    dim_a: usize,
    dim_b: usize,
}

impl Bipartition {
    pub fn new(shape: &FactorizationShape, mask: SubsystemMask) -> Result<Self> {
        shape.check_mask(mask)?;
        let k = shape.num_factors();
        let in_a: Vec<bool> = (0..k).map(|p| mask.contains(p)).collect();
        let mut weights = vec![0; k];
        let (mut wa, mut wb) = (1usize, 1usize);
        for p in (0..k).rev() {
            if in_a[p] {
                weights[p] = wa;
                wa *= shape.dims[p];
            } else {
                weights[p] = wb;
                wb *= shape.dims[p];
            }
        }
        Ok(Self {
            mask,
            dims: shape.dims.clone(),
            strides: shape.strides.clone(),
            weights,
            in_a,
            dim_a: wa,
            dim_b: wb,
        })
    }

    pub fn mask(&self) -> SubsystemMask {
        self.mask
    }

    /// `d_A`.
    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    /// `d_B`, the complement dimension.
    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// `(row, col)` for a global index `i < N`.
    #[inline]
    pub fn split(&self, i: usize) -> (usize, usize) {
        let (mut row, mut col) = (0, 0);
        for p in 0..self.dims.len() {
            let digit = (i / self.strides[p]) % self.dims[p];
            if self.in_a[p] {
                row += digit * self.weights[p];
            } else {
                col += digit * self.weights[p];
            }
        }
        (row, col)
    }

    /// Row and column for every global index in order, computed with an
    /// odometer rather than repeated division.
    pub fn split_all(&self) -> Vec<(usize, usize)> {
        let total = self.dim_a * self.dim_b;
        let k = self.dims.len();
        let mut digits = vec![0usize; k];
        let (mut row, mut col) = (0usize, 0usize);
        let mut out = Vec::with_capacity(total);
        for _ in 0..total {
            out.push((row, col));
            for p in (0..k).rev() {
                let w = self.weights[p];
                if digits[p] + 1 < self.dims[p] {
                    digits[p] += 1;
                    if self.in_a[p] {
                        row += w
                    } else {
                        col += w
                    }
                    break;
                }
                let back = digits[p] * w;
                digits[p] = 0;
                if self.in_a[p] {
                    row -= back
                } else {
                    col -= back
                }
            }
        }
        out
    }
}

/// Lower bound `2^n - 2` on the number of quantum states given by natural
/// vectors of any order `m >= 2` in dimension `n` (the count of ontic vectors).
pub fn natural_state_lower_bound(n: usize) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::DomainError(format!("dimension {n} < 2")));
    }
    Ok((BigUint::from(1u8) << n) - 2u8)
}

/// Natural log of the area of the unit sphere `S^{n-1}` inside the nonnegative
/// orthant, `n pi^{n/2} / (2^n Gamma(n/2 + 1))`.
pub fn orthant_sphere_log_area(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::DomainError("dimension must be >= 1".into()));
    }
    let nf = n as f64;
    Ok(nf.ln() + 0.5 * nf * std::f64::consts::PI.ln()
        - nf * std::f64::consts::LN_2
        - ln_gamma(0.5 * nf + 1.0))
}

/// Area of the unit sphere portion in the nonnegative orthant of `R^n`.
/// Underflows to zero for large `n`; use [`orthant_sphere_log_area`] there.
pub fn orthant_sphere_area(n: usize) -> Result<f64> {
    orthant_sphere_log_area(n).map(f64::exp)
}
