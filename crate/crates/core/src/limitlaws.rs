//! Reference limit laws and distances between laws on the line.
//!
//! Wasserstein distances use the quantile representation
//! `W_p(mu, nu)^p = int_0^1 |F_mu^{-1}(t) - F_nu^{-1}(t)|^p dt`.
//! Between two atomic measures the integrand is piecewise constant and the
//! integral is exact; against a continuous law the unit interval is cut at
//! `M` uniform nodes plus every jump of the atomic side, and each piece is
//! integrated with the midpoint rule.

use std::f64::consts::PI;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::kernels::SymmetricWeights;
use crate::matrix::DenseMatrix;
use crate::randlaw::DistributionSpec;
use crate::rng::SeededRng;
use crate::spectra::EmpiricalDistribution;

/// Semicircle on `[-2 sigma, 2 sigma]` or arc-sine on `[-a, a]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceLaw {
    Semicircle(f64),
    ArcSine(f64),
}

impl ReferenceLaw {
    pub fn support(&self) -> (f64, f64) {
        match *self {
            ReferenceLaw::Semicircle(s) => (-2.0 * s, 2.0 * s),
            ReferenceLaw::ArcSine(a) => (-a, a),
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        match *self {
            ReferenceLaw::Semicircle(s) => {
                let r2 = 4.0 * s * s;
                if x * x >= r2 {
                    0.0
                } else {
                    (r2 - x * x).sqrt() / (2.0 * PI * s * s)
                }
            }
            ReferenceLaw::ArcSine(a) => {
                if x * x >= a * a {
                    0.0
                } else {
                    1.0 / (PI * (a * a - x * x).sqrt())
                }
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        match *self {
            ReferenceLaw::Semicircle(s) => {
                let r2 = 4.0 * s * s;
                let anti = 0.5 * x * (r2 - x * x).sqrt() + 2.0 * s * s * (x / (2.0 * s)).asin();
                (anti / (2.0 * PI * s * s) + 0.5).clamp(0.0, 1.0)
            }
            ReferenceLaw::ArcSine(a) => ((x / a).asin() / PI + 0.5).clamp(0.0, 1.0),
        }
    }

    /// Quantile for `t` in `[0, 1]`: bisection on the closed-form CDF for
    /// the semicircle, closed form for the arc-sine law.
    pub fn quantile(&self, t: f64) -> f64 {
        self.quantile_with(t, Tolerances::default().quantile_bisection)
    }

    pub fn quantile_with(&self, t: f64, resolution: f64) -> f64 {
        let (lo, hi) = self.support();
        if t <= 0.0 {
            return lo;
        }
        if t >= 1.0 || lo == hi {
            return hi;
        }
        match *self {
            ReferenceLaw::Semicircle(_) => {
                let (mut a, mut b) = (lo, hi);
                while b - a > resolution * (hi - lo).max(1.0) {
                    let mid = 0.5 * (a + b);
                    if self.cdf(mid) < t {
                        a = mid;
                    } else {
                        b = mid;
                    }
                    if mid == a && mid == b {
                        break;
                    }
                }
                0.5 * (a + b)
            }
            ReferenceLaw::ArcSine(a) => a * (PI * (t - 0.5)).sin(),
        }
    }

    /// Moment of order `k`: zero for odd `k`; `sigma^k C_{k/2}` for the
    /// semicircle and `(a/2)^k binom(k, k/2)` for the arc-sine law.
    pub fn moment(&self, k: u32) -> f64 {
        if k % 2 == 1 {
            return 0.0;
        }
        let r = k / 2;
        let central = binomial_f64(2 * r, r);
        match *self {
            ReferenceLaw::Semicircle(s) => s.powi(k as i32) * central / (r as f64 + 1.0),
            ReferenceLaw::ArcSine(a) => (a / 2.0).powi(k as i32) * central,
        }
    }
}

fn binomial_f64(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, r| acc * (n - r) as f64 / (r + 1) as f64)
}

/// Moment of a reference law.
pub fn law_moment_ref(law: &ReferenceLaw, k: u32) -> f64 {
    law.moment(k)
}

/// A law on the line seen through its quantile function.
#[derive(Debug, Clone, Copy)]
pub enum Law<'a> {
    Empirical(&'a EmpiricalDistribution),
    Reference(ReferenceLaw),
}

impl<'a> From<&'a EmpiricalDistribution> for Law<'a> {
    fn from(e: &'a EmpiricalDistribution) -> Self {
        Law::Empirical(e)
    }
}

impl From<ReferenceLaw> for Law<'_> {
    fn from(r: ReferenceLaw) -> Self {
        Law::Reference(r)
    }
}

/// `W_p(mu, nu)` for `p >= 1`.
pub fn wasserstein_p<'a, 'b>(mu: impl Into<Law<'a>>, nu: impl Into<Law<'b>>, p: f64) -> Result<f64> {
    wasserstein_p_with(mu, nu, p, &Tolerances::default())
}

pub fn wasserstein_p_with<'a, 'b>(
    mu: impl Into<Law<'a>>,
    nu: impl Into<Law<'b>>,
    p: f64,
    tol: &Tolerances,
) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Contract(format!("Wasserstein order p = {p} must be a finite number >= 1")));
    }
    let (mu, nu) = (mu.into(), nu.into());
    let both_atomic = matches!((mu, nu), (Law::Empirical(_), Law::Empirical(_)));

    // Breakpoints of the piecewise-constant quantile functions.
    let mut cuts: Vec<f64> = vec![0.0, 1.0];
    for law in [mu, nu] {
        if let Law::Empirical(e) = law {
            cuts.extend(e.cumulative());
        }
    }
    if !both_atomic {
        let m = tol.wasserstein_nodes;
        cuts.extend((1..m).map(|j| j as f64 / m as f64));
    }
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();

    let mut qmu = QuantileCursor::new(mu);
    let mut qnu = QuantileCursor::new(nu);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        let diff = (qmu.at(mid, tol) - qnu.at(mid, tol)).abs();
        total += (b - a) * diff.powf(p);
    }
    Ok(total.powf(1.0 / p))
}

/// Quantile evaluation at increasing `t`, walking the atoms once.
struct QuantileCursor<'a> {
    law: Law<'a>,
    cumulative: Vec<f64>,
    idx: usize,
}

impl<'a> QuantileCursor<'a> {
    fn new(law: Law<'a>) -> Self {
        let cumulative = match law {
            Law::Empirical(e) => e.cumulative(),
            Law::Reference(_) => Vec::new(),
        };
        Self { law, cumulative, idx: 0 }
    }

    fn at(&mut self, t: f64, tol: &Tolerances) -> f64 {
        match self.law {
            Law::Empirical(e) => {
                while self.idx + 1 < self.cumulative.len() && self.cumulative[self.idx] < t {
                    self.idx += 1;
                }
                e.atoms()[self.idx]
            }
            Law::Reference(r) => r.quantile_with(t, tol.quantile_bisection),
        }
    }
}

/// `(1/n) sum_{i,j} (A_{i,j} - B_{i,j})^2`, which bounds the cube of the
/// Lévy distance between the ESDs of `A` and `B`.
pub fn levy_cube_bound(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension { expected: a.dim(), got: b.dim() });
    }
    let n = a.dim();
    let tol = Tolerances::default().symmetry;
    for m in [a, b] {
        if m.max_asymmetry() > tol * m.max_abs().max(1.0) {
            return Err(Error::Contract("levy_cube_bound needs symmetric matrices".into()));
        }
    }
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / n as f64)
}

/// Lévy distance between two atomic laws, by bisection on `eps` to the
/// given resolution. Returns the smallest feasible `eps` found.
pub fn levy_distance(f: &EmpiricalDistribution, g: &EmpiricalDistribution, resolution: f64) -> f64 {
    let feasible = |eps: f64| -> bool {
        // G(x) <= F(x + eps) + eps and F(x) <= G(x + eps) + eps for all x.
        let one_side = |p: &EmpiricalDistribution, q: &EmpiricalDistribution| {
            p.atoms()
                .iter()
                .chain(q.atoms().iter().map(|x| x - eps).collect::<Vec<_>>().iter())
                .all(|&x| p.cdf(x) <= q.cdf(x + eps) + eps + 1e-15)
        };
        one_side(g, f) && one_side(f, g)
    };
    let span = f.atoms().last().unwrap().max(*g.atoms().last().unwrap())
        - f.atoms()[0].min(g.atoms()[0]);
    let mut hi = span.max(0.0) + 1.0;
    let mut lo = 0.0;
    if feasible(0.0) {
        return 0.0;
    }
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Wigner comparison matrix: `(U_{i,j} - m) / sqrt(n)` when centered,
/// `U_{i,j} / sqrt(n)` otherwise, with the same weights a complete-graph
/// kernel of this seed would use.
pub fn build_wigner(n: usize, law: &DistributionSpec, rng: &SeededRng, centered: bool) -> Result<DenseMatrix> {
    let weights = SymmetricWeights::sample(n, law, rng)?;
    let shift = if centered { law.mean() } else { 0.0 };
    let scale = 1.0 / (n as f64).sqrt();
    Ok(DenseMatrix::from_fn(n, |i, j| (weights.get(i, j) - shift) * scale))
}
