//! Entropy functionals of density matrices and purities. All logarithms are
//! base 2, so entropies are in bits.

use crate::error::{Error, Result};
use crate::states::DensityMatrix;

const NEGATIVE_TOL: f64 = 1e-10;
const SUM_TOL: f64 = 1e-9;
const PURITY_TOL: f64 = 1e-9;
const ALPHA_ONE_TOL: f64 = 1e-9;
const HERMITIAN_TOL: f64 = 1e-8;
// eigensolver noise on exactly-zero eigenvalues of a rank-deficient input
const ZERO_EIGENVALUE: f64 = 1e-13;

/// Eigenvalues of a density matrix, descending, nonnegative, summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    /// Clamps values in `[-1e-10, 0)` to zero and renormalizes; anything more
    /// negative, or a sum off by more than `1e-9`, is an error.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(&bad) = values
            .iter()
            .find(|v| !v.is_finite() || **v < -NEGATIVE_TOL)
        {
            return Err(Error::NotPositive(bad));
        }
        for v in values.iter_mut() {
            *v = v.max(0.0);
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidTrace(sum));
        }
        for v in values.iter_mut() {
            *v /= sum;
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self {
            eigenvalues: values,
        })
    }

    /// `(1/d, ..., 1/d)`.
    pub fn uniform(d: usize) -> Result<Self> {
        Self::new(vec![1.0 / d as f64; d])
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Number of strictly positive eigenvalues.
    pub fn rank(&self) -> usize {
        self.eigenvalues.iter().filter(|&&l| l > 0.0).count()
    }

    /// `sum lambda^2`.
    pub fn purity(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l * l).sum()
    }

    fn support(&self) -> impl Iterator<Item = f64> + '_ {
        self.eigenvalues.iter().copied().filter(|&l| l > 0.0)
    }
}

/// `S_2 = -log2 tr(rho^2)` from the purity.
pub fn collision_entropy(purity: f64) -> Result<f64> {
    if purity.is_nan() || purity <= 0.0 || purity > 1.0 + PURITY_TOL {
        return Err(Error::DomainError(format!(
            "purity {purity} outside (0, 1]"
        )));
    }
    // + 0.0 turns -0.0 into 0.0
    Ok(-purity.min(1.0).log2() + 0.0)
}

/// `S_alpha = log2(sum lambda^alpha) / (1 - alpha)` over the support.
/// `alpha = 0` gives the log of the rank.
pub fn renyi_entropy(spectrum: &Spectrum, alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::DomainError(format!(
            "Renyi order {alpha} must be finite and >= 0"
        )));
    }
    if (alpha - 1.0).abs() <= ALPHA_ONE_TOL {
        return Err(Error::AlphaOne(alpha));
    }
    let total: f64 = if alpha == 0.0 {
        spectrum.rank() as f64
    } else {
        spectrum.support().map(|l| l.powf(alpha)).sum()
    };
    Ok((total.log2() / (1.0 - alpha)).max(0.0))
}

/// `S_1 = -sum lambda log2 lambda`, with `0 log 0 = 0`.
pub fn von_neumann_entropy(spectrum: &Spectrum) -> f64 {
    let s: f64 = spectrum.support().map(|l| -l * l.log2()).sum();
    s.max(0.0)
}

/// Eigenvalues of a Hermitian density matrix.
pub fn spectrum_of(rho: &DensityMatrix) -> Result<Spectrum> {
    let defect = rho.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let values = rho
        .matrix()
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .map(|&l| if l.abs() < ZERO_EIGENVALUE { 0.0 } else { l })
        .collect();
    Spectrum::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitstate::{random_ontic, OnticVector};
    use crate::indexing::{proper_masks, FactorizationShape, SubsystemMask};
    use crate::reduction::{purity, reduced_density, DEFAULT_REDUCED_CAP};
    use crate::states::{density_full, state_from_ontic, Basis, PureState};
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spectrum(rng: &mut impl Rng) -> Spectrum {
        let d = rng.random_range(1..12);
        let raw: Vec<f64> = (0..d).map(|_| rng.random::<f64>().powi(3)).collect();
        let s: f64 = raw.iter().sum();
        Spectrum::new(raw.into_iter().map(|x| x / s).collect()).unwrap()
    }

    #[test]
    fn collision_examples() {
        assert_eq!(collision_entropy(1.0).unwrap(), 0.0);
        assert!(collision_entropy(1.0).unwrap().is_sign_positive());
        assert_eq!(collision_entropy(0.5).unwrap(), 1.0);
        assert_abs_diff_eq!(
            collision_entropy(7.0 / 9.0).unwrap(),
            0.362_570_079_384_11,
            epsilon = 1e-12
        );
        assert!(collision_entropy(0.0).is_err());
        assert!(collision_entropy(-0.1).is_err());
        assert!(collision_entropy(1.1).is_err());
        assert!(collision_entropy(f64::NAN).is_err());
        assert_eq!(collision_entropy(1.0 + 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn renyi_examples() {
        for d in [1usize, 2, 3, 7, 64] {
            let u = Spectrum::uniform(d).unwrap();
            for alpha in [0.0, 0.5, 2.0, 3.0, 50.0] {
                assert_abs_diff_eq!(
                    renyi_entropy(&u, alpha).unwrap(),
                    (d as f64).log2(),
                    epsilon = 1e-12
                );
            }
            assert_abs_diff_eq!(von_neumann_entropy(&u), (d as f64).log2(), epsilon = 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let s = random_spectrum(&mut rng);
            assert_abs_diff_eq!(
                renyi_entropy(&s, 2.0).unwrap(),
                collision_entropy(s.purity()).unwrap(),
                epsilon = 1e-12
            );
        }
        let u = Spectrum::uniform(3).unwrap();
        assert!(matches!(renyi_entropy(&u, 1.0), Err(Error::AlphaOne(_))));
        assert!(matches!(
            renyi_entropy(&u, 1.0 + 1e-10),
            Err(Error::AlphaOne(_))
        ));
        assert!(renyi_entropy(&u, -0.5).is_err());
    }

    #[test]
    fn spectrum_of_two_by_two() {
        // characteristic polynomial l^2 - l + 1/9 = 0, roots (3 +- sqrt 5) / 6
        let sixth = 1.0 / 6.0;
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[5.0 * sixth, -sixth, -sixth, sixth].map(|x| Complex64::new(x, 0.0)),
        );
        let rho = DensityMatrix::from_matrix(m).unwrap();
        let s = spectrum_of(&rho).unwrap();
        let r5 = 5f64.sqrt();
        assert_abs_diff_eq!(s.eigenvalues()[0], (3.0 + r5) / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues()[1], (3.0 - r5) / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            renyi_entropy(&s, 2.0).unwrap(),
            0.362_570_079_384_11,
            epsilon = 1e-12
        );
    }

    #[test]
    fn spectrum_of_examples() {
        let d = 5;
        let m = DMatrix::from_diagonal_element(d, d, Complex64::new(0.2, 0.0));
        let s = spectrum_of(&DensityMatrix::from_matrix(m).unwrap()).unwrap();
        assert!(s.eigenvalues().iter().all(|&l| (l - 0.2).abs() < 1e-15));
        let line = FactorizationShape::new(vec![32]).unwrap();
        let psi = state_from_ontic(&random_ontic(32, 5).unwrap(), &line).unwrap();
        let pure = spectrum_of(&density_full(&psi, 256).unwrap()).unwrap();
        assert!((pure.eigenvalues()[0] - 1.0).abs() < 1e-10);
        assert!(pure.eigenvalues()[1..].iter().all(|l| l.abs() < 1e-10));
        assert_abs_diff_eq!(von_neumann_entropy(&pure), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn spectrum_validation() {
        assert!(matches!(
            Spectrum::new(vec![1.1, -0.1]),
            Err(Error::NotPositive(_))
        ));
        assert!(matches!(
            Spectrum::new(vec![0.5, 0.4]),
            Err(Error::InvalidTrace(_))
        ));
        let s = Spectrum::new(vec![0.25, 1.0 - 0.25 + 5e-11, -5e-11]).unwrap();
        assert_eq!(s.eigenvalues()[2], 0.0);
        assert!(s.eigenvalues()[0] >= s.eigenvalues()[1]);
        assert!(Spectrum::new(vec![]).is_err());
    }

    #[test]
    fn von_neumann_examples() {
        assert_eq!(
            von_neumann_entropy(&Spectrum::new(vec![1.0, 0.0, 0.0]).unwrap()),
            0.0
        );
        assert_abs_diff_eq!(
            von_neumann_entropy(&Spectrum::uniform(4).unwrap()),
            2.0,
            epsilon = 1e-15
        );
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let s = random_spectrum(&mut rng);
            let s1 = von_neumann_entropy(&s);
            assert!(s1 + 1e-12 >= renyi_entropy(&s, 2.0).unwrap());
            // alpha -> 1 limit
            for alpha in [1.0 - 1e-4, 1.0 + 1e-4] {
                assert!((renyi_entropy(&s, alpha).unwrap() - s1).abs() < 1e-3 * s1.max(1e-3));
            }
            let mid = 0.5
                * (renyi_entropy(&s, 1.0 - 1e-4).unwrap() + renyi_entropy(&s, 1.0 + 1e-4).unwrap());
            assert!((mid - s1).abs() < 1e-6);
        }
    }

    #[test]
    fn renyi_limit_near_one() {
        let s = Spectrum::new(vec![0.5, 0.3, 0.2]).unwrap();
        let s1 = von_neumann_entropy(&s);
        for alpha in [1.0 - 1e-4, 1.0 + 1e-4] {
            // first-order deviation is |alpha - 1| * Var(log2 lambda) * ln 2 / 2 ~ 1e-5
            assert!((renyi_entropy(&s, alpha).unwrap() - s1).abs() < 1e-4);
        }
        // the symmetric average cancels the first-order term
        let mid = 0.5
            * (renyi_entropy(&s, 1.0 - 1e-4).unwrap() + renyi_entropy(&s, 1.0 + 1e-4).unwrap());
        assert!((mid - s1).abs() < 1e-6);
        let uniform = Spectrum::uniform(6).unwrap();
        assert!(
            (renyi_entropy(&uniform, 1.0 + 1e-4).unwrap() - von_neumann_entropy(&uniform)).abs()
                < 1e-6
        );
    }

    #[test]
    fn renyi_is_non_increasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let s = random_spectrum(&mut rng);
            let values: Vec<f64> = [0.0, 0.5, 2.0, 3.0, 50.0]
                .iter()
                .map(|&a| renyi_entropy(&s, a).unwrap())
                .collect();
            for w in values.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{values:?}");
            }
        }
    }

    #[test]
    fn fast_and_eigen_paths_agree() {
        let sh = FactorizationShape::new(vec![2, 3, 2, 2]).unwrap();
        for seed in 0..10 {
            let psi = state_from_ontic(&random_ontic(24, seed).unwrap(), &sh).unwrap();
            for m in proper_masks(4).unwrap() {
                let fast = collision_entropy(purity(&psi, m).unwrap()).unwrap();
                let rho = reduced_density(&psi, m, DEFAULT_REDUCED_CAP).unwrap();
                let eig = renyi_entropy(&spectrum_of(&rho).unwrap(), 2.0).unwrap();
                assert!((fast - eig).abs() < 1e-9);
                // dimension bound for a mixed-radix shape
                assert!(fast <= (sh.subsystem_dim(m) as f64).log2() + 1e-9);
            }
        }
    }

    #[test]
    fn complementary_spectra_match() {
        let sh = FactorizationShape::uniform(2, 6).unwrap();
        let q = OnticVector::from_indices(64, [1, 5, 9, 17, 22, 40, 41, 63]).unwrap();
        let psi = state_from_ontic(&q, &sh).unwrap();
        for m in proper_masks(6).unwrap() {
            let a = spectrum_of(&reduced_density(&psi, m, 64).unwrap()).unwrap();
            let b = spectrum_of(&reduced_density(&psi, m.complement(), 64).unwrap()).unwrap();
            let r = a.rank().min(b.rank());
            for i in 0..r {
                assert!((a.eigenvalues()[i] - b.eigenvalues()[i]).abs() < 1e-10);
            }
            assert!(a.eigenvalues()[r..]
                .iter()
                .chain(&b.eigenvalues()[r..])
                .all(|l| l.abs() < 1e-10));
        }
    }

    #[test]
    fn collision_entropy_is_additive_on_product_states() {
        // psi = chi on points {1,3} times xi on points {2,4}; then
        // rho_{1,2} = rho_1 (x) rho_2.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut unit = |centered: bool| {
            let mut v: Vec<Complex64> = (0..4)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            if centered {
                let mean = v.iter().sum::<Complex64>() / 4.0;
                v.iter_mut().for_each(|z| *z -= mean);
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|z| z / norm).collect::<Vec<_>>()
        };
        let chi = unit(true);
        let xi = unit(false);
        let sh = FactorizationShape::uniform(2, 4).unwrap();
        let amps: Vec<Complex64> = (0..16)
            .map(|i| {
                let d = sh.decode(i).unwrap();
                chi[2 * d[0] + d[2]] * xi[2 * d[1] + d[3]]
            })
            .collect();
        let psi = PureState::new(amps, sh, Basis::Ontic).unwrap();
        let s2 = |s: &str| {
            collision_entropy(purity(&psi, SubsystemMask::parse(s, 4).unwrap()).unwrap()).unwrap()
        };
        assert!((s2("1,2") - (s2("1") + s2("2"))).abs() < 1e-9);
        assert!((s2("3,4") - (s2("3") + s2("4"))).abs() < 1e-9);
        // the pairs {1,3} and {2,4} are unentangled with each other
        assert!(s2("1,3").abs() < 1e-9);
    }
}
