//! Numerical tolerances shared across the crate.
//!
//! Every threshold used by a check lives here so callers can override them
//! in one place.

/// Tolerance record. `Tolerances::default()` holds the documented defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Row-sum error allowed for a stochastic matrix.
    pub row_sum: f64,
    /// Asymmetry allowed before a dense eigensolve refuses the input.
    pub symmetry: f64,
    /// Maximum implicit QL iterations per eigenvalue.
    pub ql_max_iter: usize,
    /// Slack for `lambda_1 = 1` and `spectrum ⊂ [-1, 1]`.
    pub markov_spectrum: f64,
    /// Relative tolerance for the post-solve Sturm count consistency check.
    pub sturm_check: f64,
    /// Number of uniform quantile nodes for Wasserstein quadrature against a
    /// continuous law.
    pub wasserstein_nodes: usize,
    /// Bisection resolution for reference-law quantiles.
    pub quantile_bisection: f64,
    /// Resolution of the Lévy distance bisection.
    pub levy_resolution: f64,
    /// Relative target and absolute floor for adaptive Gauss–Legendre.
    pub quad_rel: f64,
    pub quad_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            row_sum: 1e-12,
            symmetry: 1e-12,
            ql_max_iter: 50,
            markov_spectrum: 1e-9,
            sturm_check: 1e-10,
            wasserstein_nodes: 100_000,
            quantile_bisection: 1e-12,
            levy_resolution: 1e-6,
            quad_rel: 1e-12,
            quad_abs: 1e-15,
        }
    }
}

/// Largest dense dimension accepted by the complete-graph constructions.
pub const DENSE_MAX_DIM: usize = 4096;

/// Largest half-length accepted by loop-path enumeration.
pub const LOOP_PATH_MAX_K: usize = 12;
