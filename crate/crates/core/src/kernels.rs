//! Random reversible Markov kernels.
//!
//! Two models are built here:
//!
//! * the complete graph with loops, where `U_{i,j} = U_{j,i}` are i.i.d. for
//!   `i <= j` and `K_{i,j} = U_{i,j} / rho_i`;
//! * the birth-and-death chain on `{1, ..., n}` with rows `(c_i, a_i, b_i)`.
//!
//! Both are reversible, so conjugating by `diag(rho)^{1/2}` gives a symmetric
//! matrix with the same spectrum ([`symmetrize`]).
//!
//! Indices in this module are 0-based; state `i` here is state `i + 1` in the
//! usual 1-based notation.

use crate::config::DENSE_MAX_DIM;
use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SymTridiagonal, SymmetricMatrix};
use crate::randlaw::DistributionSpec;
use crate::rng::SeededRng;

/// Symmetric i.i.d. weights, upper triangle (diagonal included) stored
/// row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricWeights {
    n: usize,
    packed: Vec<f64>,
}

impl SymmetricWeights {
    /// Draws `U_{i,j}`, `i <= j`. Row `i` reads `U_{i,i}, U_{i,i+1}, ...` from
    /// substream `i + 1`, so the weights of a size-`n` matrix are the
    /// top-left block of those of any larger matrix with the same seed.
    pub fn sample(n: usize, law: &DistributionSpec, rng: &SeededRng) -> Result<Self> {
        law.validate()?;
        let (lo, _) = law.support();
        if lo < 0.0 {
            return Err(Error::Domain(format!("weights law {law} takes negative values")));
        }
        let mut packed = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            let mut row_rng = rng.substream(i as u64 + 1);
            for _ in i..n {
                packed.push(law.sample(&mut row_rng));
            }
        }
        Ok(Self { n, packed })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        self.packed[packed_index(self.n, r, c)]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let n = self.n;
        let mut rho = vec![0.0; n];
        for i in 0..n {
            let base = packed_index(n, i, i);
            for (off, &u) in self.packed[base..base + (n - i)].iter().enumerate() {
                let j = i + off;
                rho[i] += u;
                if j != i {
                    rho[j] += u;
                }
            }
        }
        rho
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, |i, j| self.get(i, j))
    }
}

#[inline]
fn packed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < n);
    // Rows 0..i hold n, n-1, ..., n-i+1 entries.
    i * n - i * i.saturating_sub(1) / 2 + (j - i)
}

/// Complete-graph kernel with its weights and row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseKernel {
    k: DenseMatrix,
    rho: Vec<f64>,
    weights: SymmetricWeights,
}

impl DenseKernel {
    pub fn from_weights(weights: SymmetricWeights) -> Self {
        let n = weights.dim();
        let rho = weights.row_sums();
        let k = DenseMatrix::from_fn(n, |i, j| {
            if rho[i] > 0.0 {
                weights.get(i, j) / rho[i]
            } else if i == j {
                1.0
            } else {
                0.0
            }
        });
        Self { k, rho, weights }
    }

    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.k
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.k.get(i, j)
    }

    /// Row sums `rho_i = sum_j U_{i,j}` before normalization.
    pub fn row_weights(&self) -> &[f64] {
        &self.rho
    }

    pub fn weights(&self) -> &SymmetricWeights {
        &self.weights
    }

    pub fn isolated_vertices(&self) -> Vec<usize> {
        self.rho.iter().enumerate().filter(|(_, r)| **r == 0.0).map(|(i, _)| i).collect()
    }

    /// Largest `|rho_i K_{i,j} - rho_j K_{j,i}|`.
    pub fn detailed_balance_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                let d = self.rho[i] * self.k.get(i, j) - self.rho[j] * self.k.get(j, i);
                worst = worst.max(d.abs());
            }
        }
        worst
    }
}

/// Birth-and-death kernel, rows `(c_i, a_i, b_i)` = (down, stay, up).
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalKernel {
    down: Vec<f64>,
    stay: Vec<f64>,
    up: Vec<f64>,
}

impl TridiagonalKernel {
    /// Builds and validates a kernel from its three coefficient vectors.
    pub fn new(down: Vec<f64>, stay: Vec<f64>, up: Vec<f64>) -> Result<Self> {
        let n = stay.len();
        if n < 2 {
            return Err(Error::Validity(format!("chain needs at least 2 states, got {n}")));
        }
        if down.len() != n {
            return Err(Error::Dimension { expected: n, got: down.len() });
        }
        if up.len() != n {
            return Err(Error::Dimension { expected: n, got: up.len() });
        }
        let kernel = Self { down, stay, up };
        kernel.validate(1e-12)?;
        Ok(kernel)
    }

    fn validate(&self, tol: f64) -> Result<()> {
        let n = self.dim();
        if self.down[0] != 0.0 || self.up[n - 1] != 0.0 {
            return Err(Error::Validity("boundary rows must have c_1 = b_n = 0".into()));
        }
        for i in 0..n {
            let row = [self.down[i], self.stay[i], self.up[i]];
            if row.iter().any(|x| !x.is_finite() || *x < 0.0 || *x > 1.0) {
                return Err(Error::Validity(format!("row {} has entries outside [0,1]: {row:?}", i + 1)));
            }
            if (row.iter().sum::<f64>() - 1.0).abs() > tol {
                return Err(Error::Validity(format!("row {} does not sum to 1: {row:?}", i + 1)));
            }
        }
        for i in 0..n - 1 {
            if self.up[i] <= 0.0 || self.down[i + 1] <= 0.0 {
                return Err(Error::Validity(format!(
                    "degenerate edge between states {} and {}: b = {}, c = {}",
                    i + 1,
                    i + 2,
                    self.up[i],
                    self.down[i + 1]
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.stay.len()
    }

    pub fn down(&self) -> &[f64] {
        &self.down
    }

    pub fn stay(&self) -> &[f64] {
        &self.stay
    }

    pub fn up(&self) -> &[f64] {
        &self.up
    }

    /// Row `i` as `(c_i, a_i, b_i)`.
    pub fn row(&self, i: usize) -> (f64, f64, f64) {
        (self.down[i], self.stay[i], self.up[i])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j == i {
            self.stay[i]
        } else if j + 1 == i {
            self.down[i]
        } else if j == i + 1 {
            self.up[i]
        } else {
            0.0
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.dim(), |i, j| self.get(i, j))
    }

    /// State relabeling `i -> n + 1 - i`.
    pub fn mirrored(&self) -> Self {
        let mut down = self.up.clone();
        let mut up = self.down.clone();
        let mut stay = self.stay.clone();
        down.reverse();
        up.reverse();
        stay.reverse();
        Self { down, stay, up }
    }

    /// `log rho_i` with `rho_1 = 1` and `rho_{i+1} / rho_i = b_i / c_{i+1}`.
    pub fn log_reversible_weights(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n);
        let mut acc = 0.0;
        out.push(acc);
        for i in 0..n - 1 {
            acc += self.up[i].ln() - self.down[i + 1].ln();
            out.push(acc);
        }
        out
    }
}

/// Either model.
#[derive(Debug, Clone, PartialEq)]
pub enum MarkovKernel {
    Dense(DenseKernel),
    Chain(TridiagonalKernel),
}

impl From<DenseKernel> for MarkovKernel {
    fn from(k: DenseKernel) -> Self {
        MarkovKernel::Dense(k)
    }
}

impl From<TridiagonalKernel> for MarkovKernel {
    fn from(k: TridiagonalKernel) -> Self {
        MarkovKernel::Chain(k)
    }
}

impl MarkovKernel {
    pub fn dim(&self) -> usize {
        match self {
            MarkovKernel::Dense(k) => k.dim(),
            MarkovKernel::Chain(k) => k.dim(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            MarkovKernel::Dense(k) => k.get(i, j),
            MarkovKernel::Chain(k) => k.get(i, j),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            MarkovKernel::Dense(k) => k.matrix().clone(),
            MarkovKernel::Chain(k) => k.to_dense(),
        }
    }

    /// `out = v K` for a row vector `v`.
    pub fn apply_left(&self, v: &[f64], out: &mut [f64]) {
        let n = self.dim();
        debug_assert_eq!(v.len(), n);
        debug_assert_eq!(out.len(), n);
        out.iter_mut().for_each(|x| *x = 0.0);
        match self {
            MarkovKernel::Dense(k) => {
                for (i, &vi) in v.iter().enumerate() {
                    if vi == 0.0 {
                        continue;
                    }
                    for (o, kij) in out.iter_mut().zip(k.matrix().row(i)) {
                        *o += vi * kij;
                    }
                }
            }
            MarkovKernel::Chain(k) => {
                for (i, &vi) in v.iter().enumerate() {
                    if vi == 0.0 {
                        continue;
                    }
                    if i > 0 {
                        out[i - 1] += vi * k.down[i];
                    }
                    out[i] += vi * k.stay[i];
                    if i + 1 < n {
                        out[i + 1] += vi * k.up[i];
                    }
                }
            }
        }
    }

    /// Largest deviation of a row sum from 1.
    pub fn max_row_sum_error(&self) -> f64 {
        let n = self.dim();
        match self {
            MarkovKernel::Dense(k) => (0..n)
                .map(|i| (k.matrix().row(i).iter().sum::<f64>() - 1.0).abs())
                .fold(0.0, f64::max),
            MarkovKernel::Chain(k) => (0..n)
                .map(|i| (k.down[i] + k.stay[i] + k.up[i] - 1.0).abs())
                .fold(0.0, f64::max),
        }
    }
}

/// Probability vector on `{1, ..., n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Contract("empty probability vector".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Contract("probability weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Contract(format!("probability weights sum to {total}, not 1")));
        }
        Ok(Self(weights))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    /// Dirac mass at state `i` (0-based).
    pub fn point(n: usize, i: usize) -> Self {
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        Self(w)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_dense_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Contract("dimension must be at least 1".into()));
    }
    if n > DENSE_MAX_DIM {
        return Err(Error::Size(format!("dense dimension {n} exceeds cap {DENSE_MAX_DIM}")));
    }
    Ok(())
}

/// Complete graph with loops and i.i.d. symmetric weights of law `law`.
pub fn build_complete_kernel(n: usize, law: &DistributionSpec, rng: &SeededRng) -> Result<DenseKernel> {
    check_dense_dim(n)?;
    Ok(DenseKernel::from_weights(SymmetricWeights::sample(n, law, rng)?))
}

/// Chain with `a_i = 0`, `b_1 = c_n = 1` and `b_i = 1 - c_i = V_i` for the
/// interior states, `V_i` i.i.d. of law `law` on `[0, 1]`.
///
/// `V_2, V_3, ...` are read in order from substream 1, so a chain of size
/// `n` shares its environment with every larger chain of the same seed.
pub fn build_chain_kernel_iid(n: usize, law: &DistributionSpec, rng: &SeededRng) -> Result<TridiagonalKernel> {
    law.require_unit_interval()?;
    if n < 2 {
        return Err(Error::Validity(format!("chain needs at least 2 states, got {n}")));
    }
    let mut stream = rng.substream(1);
    let env: Vec<f64> = (0..n.saturating_sub(2)).map(|_| law.sample(&mut stream)).collect();
    chain_from_environment(&env)
}

/// Chain kernel from interior environment values `V_2, ..., V_{n-1}`.
pub fn chain_from_environment(env: &[f64]) -> Result<TridiagonalKernel> {
    let n = env.len() + 2;
    let mut down = vec![0.0; n];
    let stay = vec![0.0; n];
    let mut up = vec![0.0; n];
    up[0] = 1.0;
    down[n - 1] = 1.0;
    for (idx, &v) in env.iter().enumerate() {
        up[idx + 1] = v;
        down[idx + 1] = 1.0 - v;
    }
    TridiagonalKernel::new(down, stay, up)
}

/// Birth-and-death kernel from a field of rows `p(i) = (c, a, b)` with
/// reflecting boundary rows `p(1)_+ = (0, a, c + b)` and
/// `p(n)_- = (c + b, a, 0)`.
pub fn build_chain_kernel_ergodic(field: &[[f64; 3]]) -> Result<TridiagonalKernel> {
    let n = field.len();
    if n < 2 {
        return Err(Error::Validity(format!("chain needs at least 2 states, got {n}")));
    }
    for (i, p) in field.iter().enumerate() {
        if p.iter().any(|x| !x.is_finite() || *x < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::Validity(format!("p({}) = {p:?} is not in the simplex", i + 1)));
        }
    }
    let mut down = Vec::with_capacity(n);
    let mut stay = Vec::with_capacity(n);
    let mut up = Vec::with_capacity(n);
    for (i, &[c, a, b]) in field.iter().enumerate() {
        let (c, b) = if i == 0 {
            (0.0, c + b)
        } else if i == n - 1 {
            (c + b, 0.0)
        } else {
            (c, b)
        };
        down.push(c);
        stay.push(a);
        up.push(b);
    }
    TridiagonalKernel::new(down, stay, up)
}

/// Invariant probability of the kernel.
///
/// Dense: `rho_i / sum_k rho_k`. Chain: the product formula, accumulated in
/// log-space and normalized with a max shift.
pub fn invariant_measure(kernel: &MarkovKernel) -> Result<ProbabilityVector> {
    match kernel {
        MarkovKernel::Dense(k) => {
            let total: f64 = k.row_weights().iter().sum();
            if !(total > 0.0) || !total.is_finite() {
                return Err(Error::Numeric(format!("total weight {total} cannot be normalized")));
            }
            Ok(ProbabilityVector(k.row_weights().iter().map(|r| r / total).collect()))
        }
        MarkovKernel::Chain(k) => {
            let logs = k.log_reversible_weights();
            if logs.iter().any(|x| x.is_nan()) {
                return Err(Error::Numeric("NaN in chain weights".into()));
            }
            let shift = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let w: Vec<f64> = logs.iter().map(|l| (l - shift).exp()).collect();
            let total: f64 = w.iter().sum();
            Ok(ProbabilityVector(w.into_iter().map(|x| x / total).collect()))
        }
    }
}

/// Symmetric conjugate `S = D^{1/2} K D^{-1/2}`, `D = diag(rho)`.
///
/// Dense entries are formed as `U_{i,j} / sqrt(rho_i rho_j)`, which is exactly
/// symmetric; chain off-diagonals are `sqrt(b_i c_{i+1})`.
pub fn symmetrize(kernel: &MarkovKernel) -> Result<SymmetricMatrix> {
    match kernel {
        MarkovKernel::Dense(k) => {
            if let Some(&i) = k.isolated_vertices().first() {
                return Err(Error::IsolatedVertex(i + 1));
            }
            let rho = k.row_weights();
            let w = k.weights();
            Ok(SymmetricMatrix::Dense(DenseMatrix::from_fn(k.dim(), |i, j| {
                w.get(i, j) / (rho[i] * rho[j]).sqrt()
            })))
        }
        MarkovKernel::Chain(k) => {
            let n = k.dim();
            let off = (0..n - 1).map(|i| (k.up[i] * k.down[i + 1]).sqrt()).collect();
            Ok(SymmetricMatrix::Tridiagonal(SymTridiagonal::new(k.stay.clone(), off)?))
        }
    }
}

/// `(1/2) sum_k |mu_k - nu_k|`.
pub fn tv_distance(mu: &ProbabilityVector, nu: &ProbabilityVector) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(Error::Dimension { expected: mu.len(), got: nu.len() });
    }
    Ok(0.5 * mu.0.iter().zip(&nu.0).map(|(a, b)| (a - b).abs()).sum::<f64>())
}
