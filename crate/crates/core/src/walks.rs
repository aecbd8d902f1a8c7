//! Return probabilities `r_l(i) = (K^l)_{i,i}`.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{build_chain_kernel_iid, DenseKernel, MarkovKernel, TridiagonalKernel};
use crate::matrix::DenseMatrix;
use crate::randlaw::DistributionSpec;
use crate::rng::SeededRng;
use crate::spectra::{esd, esd_moment, kernel_spectrum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
}

/// Return probability at a start state (0-based) and horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnProfile {
    pub start: usize,
    pub horizon: usize,
    pub exact: Option<f64>,
    pub mc: Option<McEstimate>,
}

impl ReturnProfile {
    pub fn new(kernel: &MarkovKernel, start: usize, horizon: usize) -> Result<Self> {
        Ok(Self { start, horizon, exact: Some(return_probability_exact(kernel, start, horizon)?), mc: None })
    }

    pub fn with_mc(mut self, kernel: &MarkovKernel, trials: u64, rng: &SeededRng) -> Result<Self> {
        self.mc = Some(return_probability_mc(kernel, self.start, self.horizon, trials, rng)?);
        Ok(self)
    }
}

fn check_state(kernel: &MarkovKernel, i: usize) -> Result<()> {
    if i >= kernel.dim() {
        return Err(Error::Contract(format!("state {i} out of range for n = {}", kernel.dim())));
    }
    Ok(())
}

/// Chain propagation restricted to the window the walk can reach.
fn chain_return(k: &TridiagonalKernel, i: usize, steps: usize) -> f64 {
    let n = k.dim();
    let lo = i.saturating_sub(steps);
    let hi = (i + steps).min(n - 1);
    let w = hi - lo + 1;
    let mut v = vec![0.0; w];
    let mut next = vec![0.0; w];
    v[i - lo] = 1.0;
    let (down, stay, up) = (k.down(), k.stay(), k.up());
    for _ in 0..steps {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (off, &p) in v.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let s = lo + off;
            if off > 0 {
                next[off - 1] += p * down[s];
            }
            next[off] += p * stay[s];
            if off + 1 < w {
                next[off + 1] += p * up[s];
            }
        }
        std::mem::swap(&mut v, &mut next);
    }
    v[i - lo]
}

/// `(K^l)_{i,i}` by pushing the indicator of `i` through `K` `l` times.
pub fn return_probability_exact(kernel: &MarkovKernel, i: usize, steps: usize) -> Result<f64> {
    check_state(kernel, i)?;
    if steps == 0 {
        return Ok(1.0);
    }
    match kernel {
        MarkovKernel::Chain(k) => Ok(chain_return(k, i, steps)),
        MarkovKernel::Dense(_) => {
            let n = kernel.dim();
            let mut v = vec![0.0; n];
            let mut next = vec![0.0; n];
            v[i] = 1.0;
            for _ in 0..steps {
                kernel.apply_left(&v, &mut next);
                std::mem::swap(&mut v, &mut next);
            }
            Ok(v[i])
        }
    }
}

fn step(kernel: &MarkovKernel, s: usize, u: f64) -> usize {
    match kernel {
        MarkovKernel::Chain(k) => {
            let (c, a, _) = k.row(s);
            if u < c {
                s - 1
            } else if u < c + a {
                s
            } else {
                s + 1
            }
        }
        MarkovKernel::Dense(k) => {
            let row = k.matrix().row(s);
            let mut acc = 0.0;
            for (j, p) in row.iter().enumerate() {
                acc += p;
                if u < acc {
                    return j;
                }
            }
            // Rounding left u above the last partial sum.
            row.iter().rposition(|p| *p > 0.0).unwrap_or(s)
        }
    }
}

/// Monte Carlo estimate of `(K^l)_{i,i}` from `trials` independent walks.
pub fn return_probability_mc(
    kernel: &MarkovKernel,
    i: usize,
    steps: usize,
    trials: u64,
    rng: &SeededRng,
) -> Result<McEstimate> {
    check_state(kernel, i)?;
    if trials == 0 {
        return Err(Error::Contract("need at least one trial".into()));
    }
    let mut r = rng.substream(0);
    let mut hits = 0u64;
    for _ in 0..trials {
        let mut s = i;
        for _ in 0..steps {
            s = step(kernel, s, r.random::<f64>());
        }
        hits += (s == i) as u64;
    }
    let p = hits as f64 / trials as f64;
    Ok(McEstimate { estimate: p, stderr: (p * (1.0 - p) / trials as f64).sqrt(), trials })
}

/// `sum_i r_l(i)`, one propagation per site.
pub fn return_probability_sum(kernel: &MarkovKernel, steps: usize) -> Result<f64> {
    let n = kernel.dim();
    let parts: Result<Vec<f64>> = (0..n).into_par_iter().map(|i| return_probability_exact(kernel, i, steps)).collect();
    Ok(parts?.iter().sum())
}

/// `(1/n) sum_i lambda_i^l` against `(1/n) sum_i r_l(i)`.
pub fn trace_identity_check(kernel: &MarkovKernel, steps: usize) -> Result<(f64, f64, f64)> {
    let n = kernel.dim() as f64;
    let spectrum = kernel_spectrum(kernel)?;
    let lhs = esd_moment(&esd(&spectrum, 1.0, false)?, steps as u32);
    let rhs = return_probability_sum(kernel, steps)? / n;
    Ok((lhs, rhs, (lhs - rhs).abs()))
}

/// `(1/n) sum_i r_l(i)` for one environment draw of size `n`.
pub fn ergodic_moment_estimate(law: &DistributionSpec, steps: usize, n: usize, rng: &SeededRng) -> Result<f64> {
    let kernel = build_chain_kernel_iid(n, law, rng)?;
    if steps % 2 == 1 {
        return Ok(0.0);
    }
    let total: f64 = (0..n).into_par_iter().map(|i| chain_return(&kernel, i, steps)).sum();
    Ok(total / n as f64)
}

/// `Tr(K^l)` through `Tr(A B) = sum_{i,j} A_{i,j} B_{j,i}` with
/// `A = K^{floor(l/2)}`, `B = K^{ceil(l/2)}`.
pub fn trace_of_power(k: &DenseMatrix, steps: usize) -> Result<f64> {
    let n = k.dim();
    if steps == 0 {
        return Ok(n as f64);
    }
    if steps == 1 {
        return Ok(k.trace());
    }
    let h = steps / 2;
    let mut a = k.clone();
    for _ in 1..h {
        a = a.matmul(k)?;
    }
    let b = if steps % 2 == 0 { a.clone() } else { a.matmul(k)? };
    let total = (0..n)
        .into_par_iter()
        .map(|i| {
            let ar = a.row(i);
            (0..n).map(|j| ar[j] * b.get(j, i)).sum::<f64>()
        })
        .sum();
    Ok(total)
}

/// `n^{-1 + k/2} (sum_i r_k(i) - 1)`.
pub fn return_normalization_check(kernel: &DenseKernel, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Contract("horizon must be at least 1".into()));
    }
    let n = kernel.dim() as f64;
    let sum = trace_of_power(kernel.matrix(), k)?;
    Ok(n.powf(-1.0 + k as f64 / 2.0) * (sum - 1.0))
}
