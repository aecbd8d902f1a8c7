//! Spectra of random reversible Markov kernels.
//!
//! The crate builds two random reversible models, the complete graph with
//! i.i.d. symmetric weights and the birth-and-death chain in an i.i.d. or
//! ergodic environment, and provides the tools to study their spectra:
//! symmetric eigensolvers, empirical spectral distributions, reference limit
//! laws with Wasserstein distances, exact loop-path combinatorics for the
//! chain limit moments, return probabilities and edge bounds.

/// Library version, echoed in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod config;
pub mod edge;
pub mod error;
pub mod export;
pub mod kernels;
pub mod limitlaws;
pub mod matrix;
pub mod pathcomb;
pub mod quad;
pub mod randlaw;
pub mod rng;
pub mod spectra;
pub mod walks;

pub use config::Tolerances;
pub use edge::{
    best_chain_gap_lower_bound, chain_edge_report, chain_gap_lower_bound, dense_edge_report, dense_edge_scaled,
    edge_scaled, EdgeReport,
};
pub use error::{Error, Result};
pub use kernels::{
    build_chain_kernel_ergodic, build_chain_kernel_iid, build_complete_kernel, invariant_measure, symmetrize,
    tv_distance, DenseKernel, MarkovKernel, ProbabilityVector, TridiagonalKernel,
};
pub use limitlaws::{
    build_wigner, law_moment_ref, levy_cube_bound, levy_distance, wasserstein_p, wasserstein_p_with, Law, ReferenceLaw,
};
pub use matrix::{DenseMatrix, SymTridiagonal, SymmetricMatrix};
pub use pathcomb::{
    catalan, chain_limit_moment, chain_limit_moment_of_order, chain_limit_moment_with, crossing_counts,
    enumerate_loop_paths, LoopPath,
};
pub use randlaw::{beta_moment, law_moment, sample_weight, DistributionSpec};
pub use rng::SeededRng;
pub use spectra::{
    eig_sym_dense, eig_sym_tridiagonal, esd, esd_moment, kernel_spectrum, spectral_gap, varsigma,
    EmpiricalDistribution, Spectrum,
};
pub use walks::{
    ergodic_moment_estimate, return_normalization_check, return_probability_exact, return_probability_mc,
    trace_identity_check, McEstimate, ReturnProfile,
};
