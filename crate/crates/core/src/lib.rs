//! Quantum-like states built from subsets of a finite ontic set, their
//! reduced density matrices on tensor factors and the collision entropy of
//! those reductions.
//!
//! A subset `q` of `N` points is an ontic vector. Projected away from the
//! all-ones direction and normalized, it becomes a real pure state on
//! `C^N`. Choosing a factorization `N = d_1 ... d_K` turns that state into a
//! `K`-partite state, and the purity of a reduction gives `S_2 = -log2 tr rho_A^2`.

pub mod bitstate;
pub mod entropy;
pub mod error;
pub mod experiment;
pub mod indexing;
pub mod permrep;
pub mod reduction;
pub mod states;

pub use bitstate::{inner_ontic, overlap_standard, random_ontic, OnticVector};
pub use entropy::{collision_entropy, renyi_entropy, spectrum_of, von_neumann_entropy, Spectrum};
pub use error::{Error, Result};
pub use experiment::{
    run_cycle_census, run_sweep, run_time_series, summarize_by_size, SweepConfig, SweepRecord,
};
pub use indexing::{Bipartition, FactorizationShape, SubsystemMask};
pub use permrep::{apply_permutation, EnergyBasis, Permutation};
pub use reduction::{purity, reduced_density};
pub use states::{state_from_ontic, Basis, DensityMatrix, PureState};
