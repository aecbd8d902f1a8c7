//! Extreme eigenvalues and spectral gap bounds.

use crate::error::{Error, Result};
use crate::kernels::{DenseKernel, MarkovKernel, TridiagonalKernel};
use crate::spectra::{kernel_spectrum, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeReport {
    Dense { n: usize, sigma: f64, sqrtn_lambda2: f64, sqrtn_lambdan: f64 },
    Chain { n: usize, lambda2: f64, bound: f64 },
}

/// `(sqrt(n) lambda_2, sqrt(n) lambda_n)` of a spectrum of size `n`.
pub fn edge_scaled(spectrum: &Spectrum) -> Result<(f64, f64)> {
    let n = spectrum.dim();
    if n < 2 {
        return Err(Error::Contract("edge needs n >= 2".into()));
    }
    let s = (n as f64).sqrt();
    Ok((s * spectrum.lambda(2), s * spectrum.smallest()))
}

pub fn dense_edge_scaled(kernel: &DenseKernel) -> Result<(f64, f64)> {
    edge_scaled(&kernel_spectrum(&MarkovKernel::Dense(kernel.clone()))?)
}

pub fn dense_edge_report(kernel: &DenseKernel, sigma: f64) -> Result<EdgeReport> {
    let (sqrtn_lambda2, sqrtn_lambdan) = dense_edge_scaled(kernel)?;
    Ok(EdgeReport::Dense { n: kernel.dim(), sigma, sqrtn_lambda2, sqrtn_lambdan })
}

pub fn chain_edge_report(kernel: &TridiagonalKernel, k: usize) -> Result<EdgeReport> {
    let spectrum = kernel_spectrum(&MarkovKernel::Chain(kernel.clone()))?;
    Ok(EdgeReport::Chain { n: kernel.dim(), lambda2: spectrum.lambda(2), bound: chain_gap_lower_bound(kernel, k)? })
}

/// Running `log(exp(acc) + exp(x))`.
fn log_add(acc: f64, x: f64) -> f64 {
    if acc == f64::NEG_INFINITY {
        return x;
    }
    let (hi, lo) = if acc > x { (acc, x) } else { (x, acc) };
    hi + (lo - hi).exp().ln_1p()
}

/// `log B_k^+` and `log B_k^-` for split site `k` (1-based).
pub fn hardy_constants(kernel: &TridiagonalKernel, k: usize) -> Result<(f64, f64)> {
    let n = kernel.dim();
    if n < 3 || k < 2 || k > n - 1 {
        return Err(Error::Contract(format!("split site k = {k} must lie in 2..={} ", n.saturating_sub(1))));
    }
    let lr = kernel.log_reversible_weights();
    let (c, b) = (kernel.down(), kernel.up());
    // 0-based: site j here is j + 1 in 1-based terms; k0 = k - 1.
    let k0 = k - 1;

    // B^+ = max_{i > k} [sum_{j=k+1}^{i} 1/(rho_j c_j)] [sum_{j >= i} rho_j]
    let mut tail = vec![f64::NEG_INFINITY; n + 1];
    for j in (0..n).rev() {
        tail[j] = log_add(tail[j + 1], lr[j]);
    }
    let mut acc = f64::NEG_INFINITY;
    let mut plus = f64::NEG_INFINITY;
    for i in k0 + 1..n {
        acc = log_add(acc, -lr[i] - c[i].ln());
        plus = plus.max(acc + tail[i]);
    }

    // B^- = max_{i < k} [sum_{j=i}^{k-1} 1/(rho_j b_j)] [sum_{j <= i} rho_j]
    let mut head = vec![f64::NEG_INFINITY; n];
    let mut run = f64::NEG_INFINITY;
    for j in 0..n {
        run = log_add(run, lr[j]);
        head[j] = run;
    }
    let mut acc = f64::NEG_INFINITY;
    let mut minus = f64::NEG_INFINITY;
    for i in (0..k0).rev() {
        acc = log_add(acc, -lr[i] - b[i].ln());
        minus = minus.max(acc + head[i]);
    }
    Ok((plus, minus))
}

/// `1 / (4 max(B_k^+, B_k^-))`, a lower bound on `1 - lambda_2`.
pub fn chain_gap_lower_bound(kernel: &TridiagonalKernel, k: usize) -> Result<f64> {
    let (plus, minus) = hardy_constants(kernel, k)?;
    Ok((-(4f64.ln()) - plus.max(minus)).exp())
}

/// Best bound over all split sites, with the site attaining it.
pub fn best_chain_gap_lower_bound(kernel: &TridiagonalKernel) -> Result<(usize, f64)> {
    let n = kernel.dim();
    if n < 3 {
        return Err(Error::Contract("gap bound needs n >= 3".into()));
    }
    let mut best = (2, f64::NEG_INFINITY);
    for k in 2..n {
        let v = chain_gap_lower_bound(kernel, k)?;
        if v > best.1 {
            best = (k, v);
        }
    }
    Ok(best)
}
