//! Reduced density matrices and purities of subsystems of a pure state.
//!
//! For a pure global state the amplitudes reshape into a `d_A x d_B` matrix
//! `Psi`, and `rho_A = Psi Psi^dagger`. The purity `tr(rho_A^2)` only needs
//! the Gram matrix on the smaller side of the bipartition, since
//! `Psi Psi^dagger` and `Psi^dagger Psi` share their nonzero spectrum.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::indexing::{Bipartition, SubsystemMask};
use crate::states::{density_full, kahan_sum, DensityMatrix, PureState};

/// Default cap on `d_A` for materializing a reduced density matrix.
pub const DEFAULT_REDUCED_CAP: usize = 4096;

/// Largest `N` accepted by the brute-force partial trace.
pub const BRUTEFORCE_CAP: usize = 256;

/// The state reshaped as `Psi[row, col] = psi[i]` with `(row, col)` the split
/// of `i` into subsystem and complement indices.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteView {
    matrix: Vec<Complex64>,
    dim_a: usize,
    dim_b: usize,
}

impl BipartiteView {
    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Row-major `d_A x d_B` entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.dim_b + col]
    }

    pub fn frobenius_sqr(&self) -> f64 {
        kahan_sum(self.matrix.iter().map(|z| z.norm_sqr()))
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim_a, self.dim_b, &self.matrix)
    }
}

pub fn bipartite_view(psi: &PureState, mask: SubsystemMask) -> Result<BipartiteView> {
    mask.require_proper()?;
    let bp = Bipartition::new(psi.shape(), mask)?;
    let (dim_a, dim_b) = (bp.dim_a(), bp.dim_b());
    let mut matrix = vec![Complex64::new(0.0, 0.0); dim_a * dim_b];
    for (&amp, (r, c)) in psi.amps().iter().zip(bp.split_all()) {
        matrix[r * dim_b + c] = amp;
    }
    Ok(BipartiteView {
        matrix,
        dim_a,
        dim_b,
    })
}

/// `rho_A = Psi Psi^dagger`; refuses `d_A > cap`.
pub fn reduced_density(psi: &PureState, mask: SubsystemMask, cap: usize) -> Result<DensityMatrix> {
    mask.require_proper()?;
    psi.shape().check_mask(mask)?;
    let dim_a = psi.shape().subsystem_dim(mask);
    if dim_a > cap {
        return Err(Error::DimensionCap { dim: dim_a, cap });
    }
    let view = bipartite_view(psi, mask)?;
    let rows = SplitRows::from_view(&view, false);
    Ok(DensityMatrix::from_gram_unchecked(rows.gram()))
}

/// Partial trace of the explicit `psi psi^dagger`, summing entries whose
/// complement digits agree. Reference implementation for small `N`.
pub fn reduced_density_bruteforce(psi: &PureState, mask: SubsystemMask) -> Result<DensityMatrix> {
    mask.require_proper()?;
    let shape = psi.shape();
    shape.check_mask(mask)?;
    let n = shape.total();
    if n > BRUTEFORCE_CAP {
        return Err(Error::DimensionCap {
            dim: n,
            cap: BRUTEFORCE_CAP,
        });
    }
    let rho = density_full(psi, BRUTEFORCE_CAP)?;
    let a_pos: Vec<usize> = mask.positions().collect();
    let b_pos: Vec<usize> = mask.complement().positions().collect();
    let digits: Vec<Vec<usize>> = (0..n).map(|i| shape.decode(i)).collect::<Result<_>>()?;
    let local = |locals: &[usize], positions: &[usize]| -> usize {
        positions
            .iter()
            .fold(0, |acc, &p| acc * shape.dims()[p] + locals[p])
    };
    let dim_a = shape.subsystem_dim(mask);
    let dim_b = n / dim_a;
    // group global indices by complement index, then sum over it
    let mut by_col: Vec<Vec<(usize, usize)>> = vec![Vec::new(); dim_b];
    for (i, d) in digits.iter().enumerate() {
        by_col[local(d, &b_pos)].push((local(d, &a_pos), i));
    }
    let mut out = DMatrix::from_element(dim_a, dim_a, Complex64::new(0.0, 0.0));
    for group in &by_col {
        for &(ra, i) in group {
            for &(rb, j) in group {
                out[(ra, rb)] += rho.get(i, j);
            }
        }
    }
    Ok(DensityMatrix::from_gram_unchecked(out))
}

/// `tr(rho_A^2)` through the Gram matrix of the smaller side.
pub fn purity(psi: &PureState, mask: SubsystemMask) -> Result<f64> {
    let view = bipartite_view(psi, mask)?;
    Ok(SplitRows::from_view(&view, true).purity())
}

/// `tr(rho_A^2)` through the Gram matrix of the smaller side, reusing a
/// precomputed bipartition (the sweep path).
pub fn purity_with(psi: &PureState, bp: &Bipartition) -> Result<f64> {
    bp.mask().require_proper()?;
    let (dim_a, dim_b) = (bp.dim_a(), bp.dim_b());
    if dim_a * dim_b != psi.len() {
        return Err(Error::SizeMismatch(dim_a * dim_b, psi.len()));
    }
    let transpose = dim_a > dim_b;
    let (rows, cols) = if transpose {
        (dim_b, dim_a)
    } else {
        (dim_a, dim_b)
    };
    let real = psi.amps().iter().all(|z| z.im == 0.0);
    let mut re = vec![0.0; rows * cols];
    let mut im = if real {
        Vec::new()
    } else {
        vec![0.0; rows * cols]
    };
    for (&amp, (r, c)) in psi.amps().iter().zip(bp.split_all()) {
        let at = if transpose {
            c * cols + r
        } else {
            r * cols + c
        };
        re[at] = amp.re;
        if !real {
            im[at] = amp.im;
        }
    }
    Ok(SplitRows { re, im, rows, cols }.purity())
}

/// Rows of `Psi` (or of its transpose) in split real/imaginary storage.
/// `im` is empty for real states.
struct SplitRows {
    re: Vec<f64>,
    im: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl SplitRows {
    fn from_view(view: &BipartiteView, smaller_side: bool) -> Self {
        let transpose = smaller_side && view.dim_a > view.dim_b;
        let (rows, cols) = if transpose {
            (view.dim_b, view.dim_a)
        } else {
            (view.dim_a, view.dim_b)
        };
        let real = view.matrix.iter().all(|z| z.im == 0.0);
        let mut re = vec![0.0; rows * cols];
        let mut im = if real {
            Vec::new()
        } else {
            vec![0.0; rows * cols]
        };
        for a in 0..view.dim_a {
            for b in 0..view.dim_b {
                let z = view.matrix[a * view.dim_b + b];
                let at = if transpose {
                    b * cols + a
                } else {
                    a * cols + b
                };
                re[at] = z.re;
                if !real {
                    im[at] = z.im;
                }
            }
        }
        Self { re, im, rows, cols }
    }

    fn is_real(&self) -> bool {
        self.im.is_empty()
    }

    fn row_re(&self, i: usize) -> &[f64] {
        &self.re[i * self.cols..(i + 1) * self.cols]
    }

    fn row_im(&self, i: usize) -> &[f64] {
        &self.im[i * self.cols..(i + 1) * self.cols]
    }

    /// Compensated `sum_k |M_ik|^2`.
    fn diagonal(&self, i: usize) -> f64 {
        if self.is_real() {
            kahan_sum(self.row_re(i).iter().map(|x| x * x))
        } else {
            kahan_sum(
                self.row_re(i)
                    .iter()
                    .zip(self.row_im(i))
                    .map(|(x, y)| x * x + y * y),
            )
        }
    }

    /// `sum_k M_ik conj(M_jk)`.
    fn off_diagonal(&self, i: usize, j: usize) -> Complex64 {
        if self.is_real() {
            let dot = self
                .row_re(i)
                .iter()
                .zip(self.row_re(j))
                .map(|(a, b)| a * b)
                .sum();
            return Complex64::new(dot, 0.0);
        }
        let (ar, ai) = (self.row_re(i), self.row_im(i));
        let (br, bi) = (self.row_re(j), self.row_im(j));
        let mut re = 0.0;
        let mut im = 0.0;
        for k in 0..self.cols {
            re += ar[k] * br[k] + ai[k] * bi[k];
            im += ai[k] * br[k] - ar[k] * bi[k];
        }
        Complex64::new(re, im)
    }

    fn gram(&self) -> DMatrix<Complex64> {
        let n = self.rows;
        let mut g = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for i in 0..n {
            g[(i, i)] = Complex64::new(self.diagonal(i), 0.0);
            for j in i + 1..n {
                let z = self.off_diagonal(i, j);
                g[(i, j)] = z;
                g[(j, i)] = z.conj();
            }
        }
        g
    }

    fn purity(&self) -> f64 {
        let n = self.rows;
        let mut diag = 0.0;
        let mut off = 0.0;
        for i in 0..n {
            diag += self.diagonal(i).powi(2);
            for j in i + 1..n {
                off += self.off_diagonal(i, j).norm_sqr();
            }
        }
        diag + 2.0 * off
    }
}
