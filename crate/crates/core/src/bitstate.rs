//! Ontic vectors: subsets of the ontic set stored as packed bit strings.
//!
//! Element `i` of the ontic set lives in word `i / 64`, bit `i % 64`. Bits past
//! the length in the last word are always zero, so hardware population counts
//! over the word slice are exact.
//!
//! The textual form is `"N:0xHEX"`, reading the bit string with element 0 as
//! the most significant bit: the bit string `1100` is `"4:0xC"`.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// A bit string of length `N >= 2`, identified with a subset of the ontic set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OnticVector {
    words: Vec<u64>,
    len: usize,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

fn tail_mask(len: usize) -> u64 {
    match len % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl OnticVector {
    /// The empty subset of an `len`-element ontic set.
    pub fn zeros(len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::InvalidShape(format!(
                "ontic vectors need length >= 2, got {len}"
            )));
        }
        Ok(Self {
            words: vec![0; word_count(len)],
            len,
        })
    }

    /// The all-ones pattern, i.e. the whole ontic set.
    pub fn ones(len: usize) -> Result<Self> {
        let mut v = Self::zeros(len)?;
        v.words.iter_mut().for_each(|w| *w = u64::MAX);
        v.clear_tail();
        Ok(v)
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        let mut v = Self::zeros(bits.len())?;
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        Ok(v)
    }

    /// Parses a literal bit string such as `"1100"` (element 0 first).
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!(
                    "unexpected character {other:?} in bit string"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bools(&bits)
    }

    /// Builds the subset containing exactly the listed elements.
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v = Self::zeros(len)?;
        for i in indices {
            if i >= len {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    bound: len,
                });
            }
            v.set(i, true);
        }
        Ok(v)
    }

    fn clear_tail(&mut self) {
        let mask = tail_mask(self.len);
        if let Some(last) = self.words.last_mut() {
            *last &= mask;
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; ontic vectors have at least two elements.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let bit = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= bit;
        } else {
            self.words[i / WORD_BITS] &= !bit;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Elements of the subset in ascending order.
    pub fn ones_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD_BITS + tz)
            })
        })
    }

    /// Hamming weight.
    #[inline]
    pub fn popcount(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Population density `popcount / N`.
    pub fn density(&self) -> f64 {
        self.popcount() as f64 / self.len as f64
    }

    /// True when the vector is a state: neither the empty set nor the whole set.
    pub fn is_nontrivial(&self) -> bool {
        let p = self.popcount();
        p > 0 && p < self.len
    }

    /// Bitwise inversion within the `N`-bit width.
    pub fn complement(&self) -> Self {
        let mut out = Self {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        out.clear_tail();
        out
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch(self.len, other.len));
        }
        Ok(())
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(Self {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
            len: self.len,
        })
    }

    pub fn and_not(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(Self {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
            len: self.len,
        })
    }

    /// Popcount of the intersection, without allocating it.
    fn and_popcount(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn ensure_state(&self) -> Result<usize> {
        let p = self.popcount();
        if p == 0 || p == self.len {
            return Err(Error::DegenerateState {
                popcount: p,
                len: self.len,
            });
        }
        Ok(p)
    }
}

/// Inner product of two ontic vectors in the permutation space: `pop(q & r)`.
pub fn inner_ontic(q: &OnticVector, r: &OnticVector) -> Result<usize> {
    q.check_len(r)?;
    Ok(q.and_popcount(r))
}

/// Overlap of the normalized projections of `q` and `r` onto the standard
/// subspace:
///
/// `S(q, r) = (N pop(q & r) - pop(q) pop(r)) / sqrt(pop(q) pop(!q) pop(r) pop(!r))`.
///
/// Numerator and radicand are exact integers; only the final sqrt and division
/// are floating point, so `S(!q, r) == -S(q, r)` holds bit for bit.
pub fn overlap_standard(q: &OnticVector, r: &OnticVector) -> Result<f64> {
    q.check_len(r)?;
    let pq = q.ensure_state()? as i128;
    let pr = r.ensure_state()? as i128;
    let n = q.len as i128;
    let both = q.and_popcount(r) as i128;
    let numerator = n * both - pq * pr;
    let radicand = (pq * (n - pq)) as u128 * (pr * (n - pr)) as u128;
    Ok(numerator as f64 / (radicand as f64).sqrt())
}

/// A uniformly random nontrivial subset of an `n`-element set: i.i.d. fair
/// bits, resampled while the result is empty or full.
pub fn random_ontic(n: usize, seed: u64) -> Result<OnticVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_ontic_with(n, &mut rng)
}

pub fn random_ontic_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<OnticVector> {
    let mut v = OnticVector::zeros(n)?;
    loop {
        v.words.iter_mut().for_each(|w| *w = rng.random());
        v.clear_tail();
        if v.is_nontrivial() {
            return Ok(v);
        }
    }
}

/// A uniformly random subset with exactly `weight` elements.
pub fn random_ontic_weighted(n: usize, weight: usize, seed: u64) -> Result<OnticVector> {
    if weight == 0 || weight >= n {
        return Err(Error::DegenerateState {
            popcount: weight,
            len: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    OnticVector::from_indices(n, index::sample(&mut rng, n, weight))
}

impl fmt::Display for OnticVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.len.div_ceil(4);
        write!(f, "{}:0x", self.len)?;
        for d in 0..digits {
            let mut nibble = 0u32;
            for b in 0..4 {
                // p counts from the least significant end of the N-bit integer
                let p = 4 * (digits - 1 - d) + b;
                if p < self.len && self.get(self.len - 1 - p) {
                    nibble |= 1 << b;
                }
            }
            write!(
                f,
                "{}",
                std::char::from_digit(nibble, 16)
                    .unwrap()
                    .to_ascii_uppercase()
            )?;
        }
        Ok(())
    }
}

impl fmt::Debug for OnticVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OnticVector(")?;
        for b in self.iter() {
            write!(f, "{}", b as u8)?;
        }
        write!(f, ")")
    }
}

impl FromStr for OnticVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (len, hex) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected N:0xHEX, got {s:?}")))?;
        let len: usize = len
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad length {len:?}: {e}")))?;
        let hex = hex.trim();
        let hex = hex
            .strip_prefix("0x")
            .or_else(|| hex.strip_prefix("0X"))
            .unwrap_or(hex);
        if hex.is_empty() {
            return Err(Error::Parse("empty hex payload".into()));
        }
        let mut v = Self::zeros(len)?;
        for (j, c) in hex.chars().rev().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("bad hex digit {c:?}")))?;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let p = 4 * j + b;
                    if p >= len {
                        return Err(Error::Parse(format!("value does not fit in {len} bits")));
                    }
                    v.set(len - 1 - p, true);
                }
            }
        }
        Ok(v)
    }
}
