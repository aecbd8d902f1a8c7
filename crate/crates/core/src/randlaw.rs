//! Weight and environment laws.
//!
//! A [`DistributionSpec`] describes the common law of the i.i.d. weights of the
//! complete-graph model or of the environment variables of the chain model.
//! Laws are not normalized: the complete-graph kernel is invariant under
//! scaling of the weights, so `sigma` there means standard deviation divided
//! by the mean (see [`DistributionSpec::normalized_sigma`]).

use std::fmt;
use std::str::FromStr;

use rand_distr::{Beta as BetaSampler, Distribution};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::quad;
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    PointMass(f64),
    Uniform(f64, f64),
    /// Uniform on `[a, b] ∪ [c, d]`, mass proportional to length.
    UniformUnion(f64, f64, f64, f64),
    Beta(f64, f64),
    /// With probability `p` draw from the inner law, otherwise 0.
    AtomZeroMixture(f64, Box<DistributionSpec>),
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        use DistributionSpec::*;
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match self {
            PointMass(c) => {
                if !finite(&[*c]) || *c < 0.0 {
                    return Err(Error::Parameter(format!("point mass at {c} must be finite and >= 0")));
                }
            }
            Uniform(a, b) => {
                if !finite(&[*a, *b]) || *a < 0.0 || a >= b {
                    return Err(Error::Parameter(format!("uniform({a},{b}) needs 0 <= a < b")));
                }
            }
            UniformUnion(a, b, c, d) => {
                if !finite(&[*a, *b, *c, *d]) || *a < 0.0 || a >= b || b > c || c >= d {
                    return Err(Error::Parameter(format!(
                        "uniform2({a},{b},{c},{d}) needs 0 <= a < b <= c < d"
                    )));
                }
            }
            Beta(al, be) => {
                if !finite(&[*al, *be]) || *al <= 0.0 || *be <= 0.0 {
                    return Err(Error::Parameter(format!("beta({al},{be}) needs positive shapes")));
                }
            }
            AtomZeroMixture(p, inner) => {
                if !p.is_finite() || *p <= 0.0 || *p > 1.0 {
                    return Err(Error::Parameter(format!("atom0 weight {p} must lie in (0,1]")));
                }
                inner.validate()?;
            }
        }
        Ok(())
    }

    /// Convex hull of the support.
    pub fn support(&self) -> (f64, f64) {
        use DistributionSpec::*;
        match self {
            PointMass(c) => (*c, *c),
            Uniform(a, b) => (*a, *b),
            UniformUnion(a, _, _, d) => (*a, *d),
            Beta(..) => (0.0, 1.0),
            AtomZeroMixture(p, inner) => {
                let (lo, hi) = inner.support();
                if *p < 1.0 {
                    (lo.min(0.0), hi.max(0.0))
                } else {
                    (lo, hi)
                }
            }
        }
    }

    /// Whether the law can serve as a chain environment (support in `[0, 1]`).
    pub fn on_unit_interval(&self) -> bool {
        let (lo, hi) = self.support();
        lo >= 0.0 && hi <= 1.0
    }

    pub fn require_unit_interval(&self) -> Result<()> {
        self.validate()?;
        if self.on_unit_interval() {
            Ok(())
        } else {
            let (lo, hi) = self.support();
            Err(Error::Domain(format!("law {self} has support [{lo}, {hi}] outside [0, 1]")))
        }
    }

    /// Draws one sample. The law must be valid.
    pub fn sample(&self, rng: &mut SeededRng) -> f64 {
        use DistributionSpec::*;
        match self {
            PointMass(c) => *c,
            Uniform(a, b) => a + (b - a) * rng.uniform(),
            UniformUnion(a, b, c, d) => {
                let l1 = b - a;
                let l2 = d - c;
                let u = rng.uniform() * (l1 + l2);
                if u < l1 {
                    a + u
                } else {
                    (c + (u - l1)).min(*d)
                }
            }
            Beta(al, be) => BetaSampler::new(*al, *be).expect("validated beta").sample(rng),
            AtomZeroMixture(p, inner) => {
                if rng.uniform() < *p {
                    inner.sample(rng)
                } else {
                    0.0
                }
            }
        }
    }

    /// Raw moment `E[X^order]` in closed form.
    pub fn moment(&self, order: u32) -> f64 {
        use DistributionSpec::*;
        let k = order as i32;
        match self {
            PointMass(c) => c.powi(k),
            Uniform(a, b) => uniform_raw_moment(*a, *b, order),
            UniformUnion(a, b, c, d) => {
                let l1 = b - a;
                let l2 = d - c;
                (l1 * uniform_raw_moment(*a, *b, order) + l2 * uniform_raw_moment(*c, *d, order)) / (l1 + l2)
            }
            Beta(al, be) => (0..order).map(|r| (al + r as f64) / (al + be + r as f64)).product(),
            AtomZeroMixture(p, inner) => {
                if order == 0 {
                    1.0
                } else {
                    p * inner.moment(order)
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        (self.moment(2) - m * m).max(0.0)
    }

    /// `E[(X - m)^4]` from the raw moments.
    pub fn fourth_central_moment(&self) -> f64 {
        let m = self.mean();
        let (m2, m3, m4) = (self.moment(2), self.moment(3), self.moment(4));
        m4 - 4.0 * m * m3 + 6.0 * m * m * m2 - 3.0 * m.powi(4)
    }

    /// Standard deviation of `X / E[X]`, the scale that governs the
    /// complete-graph spectrum.
    pub fn normalized_sigma(&self) -> f64 {
        self.variance().sqrt() / self.mean()
    }

    /// `E[V^m (1 - V)^n]` for a law on `[0, 1]`.
    pub fn beta_moment(&self, m: u32, n: u32) -> Result<f64> {
        self.require_unit_interval()?;
        Ok(self.beta_moment_unchecked(m, n, &Tolerances::default()))
    }

    fn beta_moment_unchecked(&self, m: u32, n: u32, tol: &Tolerances) -> f64 {
        use DistributionSpec::*;
        match self {
            PointMass(c) => c.powi(m as i32) * (1.0 - c).powi(n as i32),
            Uniform(a, b) if *a == 0.0 && *b == 1.0 => uniform_unit_beta_moment(m, n),
            Uniform(a, b) => interval_beta_moment(*a, *b, m, n, tol),
            UniformUnion(a, b, c, d) => {
                let l1 = b - a;
                let l2 = d - c;
                (l1 * interval_beta_moment(*a, *b, m, n, tol) + l2 * interval_beta_moment(*c, *d, m, n, tol))
                    / (l1 + l2)
            }
            Beta(al, be) => {
                // B(al + m, be + n) / B(al, be) as a telescoping product.
                let up: f64 = (0..m).map(|r| (al + r as f64) / (al + be + r as f64)).product();
                let down: f64 = (0..n)
                    .map(|s| (be + s as f64) / (al + be + m as f64 + s as f64))
                    .product();
                up * down
            }
            AtomZeroMixture(p, inner) => {
                let atom = if m == 0 { 1.0 } else { 0.0 };
                p * inner.beta_moment_unchecked(m, n, tol) + (1.0 - p) * atom
            }
        }
    }
}

fn uniform_raw_moment(a: f64, b: f64, order: u32) -> f64 {
    let k = order as i32;
    (b.powi(k + 1) - a.powi(k + 1)) / ((k + 1) as f64 * (b - a))
}

/// `m! n! / (m + n + 1)!` evaluated as `1 / ((m+n+1) C(m+n, m))`.
fn uniform_unit_beta_moment(m: u32, n: u32) -> f64 {
    let (small, total) = (m.min(n), m + n);
    let mut binom = 1.0;
    for r in 0..small {
        binom = binom * (total - r) as f64 / (r + 1) as f64;
    }
    1.0 / ((total + 1) as f64 * binom)
}

fn interval_beta_moment(a: f64, b: f64, m: u32, n: u32, tol: &Tolerances) -> f64 {
    let f = |u: f64| u.powi(m as i32) * (1.0 - u).powi(n as i32);
    quad::integrate_adaptive(f, a, b, tol.quad_rel, tol.quad_abs) / (b - a)
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DistributionSpec::*;
        match self {
            PointMass(c) => write!(f, "pointmass:{c}"),
            Uniform(a, b) => write!(f, "uniform:{a},{b}"),
            UniformUnion(a, b, c, d) => write!(f, "uniform2:{a},{b},{c},{d}"),
            Beta(al, be) => write!(f, "beta:{al},{be}"),
            AtomZeroMixture(p, inner) => write!(f, "atom0:{p},{inner}"),
        }
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    /// Parses `pointmass:c`, `uniform:a,b`, `uniform2:a,b,c,d`,
    /// `beta:alpha,beta` or `atom0:p,<inner>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (tag, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("law `{s}` is missing `:`")))?;
        let nums = |rest: &str, want: usize| -> Result<Vec<f64>> {
            let v = rest
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad number `{t}` in law `{s}`")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if v.len() != want {
                return Err(Error::Parse(format!("law `{s}` expects {want} parameters, got {}", v.len())));
            }
            Ok(v)
        };
        let law = match tag.trim().to_ascii_lowercase().as_str() {
            "pointmass" => DistributionSpec::PointMass(nums(rest, 1)?[0]),
            "uniform" => {
                let v = nums(rest, 2)?;
                DistributionSpec::Uniform(v[0], v[1])
            }
            "uniform2" => {
                let v = nums(rest, 4)?;
                DistributionSpec::UniformUnion(v[0], v[1], v[2], v[3])
            }
            "beta" => {
                let v = nums(rest, 2)?;
                DistributionSpec::Beta(v[0], v[1])
            }
            "atom0" => {
                let (p, inner) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("law `{s}` needs `atom0:p,<inner>`")))?;
                let p = p
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number `{p}` in law `{s}`")))?;
                DistributionSpec::AtomZeroMixture(p, Box::new(inner.parse()?))
            }
            other => return Err(Error::Parse(format!("unknown law `{other}`"))),
        };
        law.validate()?;
        Ok(law)
    }
}

/// Samples one weight, validating the law first.
pub fn sample_weight(law: &DistributionSpec, rng: &mut SeededRng) -> Result<f64> {
    law.validate()?;
    Ok(law.sample(rng))
}

/// Raw moment of `law` of the given order.
pub fn law_moment(law: &DistributionSpec, order: u32) -> f64 {
    law.moment(order)
}

/// `E[V^m (1 - V)^n]`; errors when the support leaves `[0, 1]`.
pub fn beta_moment(law: &DistributionSpec, m: u32, n: u32) -> Result<f64> {
    law.beta_moment(m, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use DistributionSpec::*;

    #[test]
    fn point_mass_sample() {
        let mut rng = SeededRng::new(1);
        assert_eq!(sample_weight(&PointMass(0.5), &mut rng).unwrap(), 0.5);
    }

    #[test]
    fn samples_stay_in_support() {
        let mut rng = SeededRng::new(42);
        for _ in 0..10_000 {
            let x = Uniform(0.0, 1.0).sample(&mut rng);
            assert!((0.0..=1.0).contains(&x));
            let y = UniformUnion(0.0, 0.1, 0.9, 1.0).sample(&mut rng);
            assert!((0.0..=0.1).contains(&y) || (0.9..=1.0).contains(&y));
            let z = Beta(2.0, 5.0).sample(&mut rng);
            assert!((0.0..=1.0).contains(&z));
        }
    }

    #[test]
    fn atom_zero_two_point_support() {
        let law = AtomZeroMixture(0.5, Box::new(PointMass(1.0)));
        let mut rng = SeededRng::new(9);
        let xs: Vec<f64> = (0..1000).map(|_| law.sample(&mut rng)).collect();
        assert!(xs.iter().all(|&x| x == 0.0 || x == 1.0));
        assert!(xs.contains(&0.0) && xs.contains(&1.0));
    }

    #[test]
    fn invalid_laws_rejected() {
        let mut rng = SeededRng::new(0);
        assert!(sample_weight(&Uniform(1.0, 1.0), &mut rng).is_err());
        assert!(sample_weight(&PointMass(-1.0), &mut rng).is_err());
        assert!(sample_weight(&Beta(0.0, 1.0), &mut rng).is_err());
        assert!(sample_weight(&AtomZeroMixture(0.0, Box::new(PointMass(1.0))), &mut rng).is_err());
        assert!(sample_weight(&UniformUnion(0.0, 0.5, 0.4, 1.0), &mut rng).is_err());
    }

    #[test]
    fn closed_form_moments() {
        let u = Uniform(0.0, 2.0);
        assert!((law_moment(&u, 1) - 1.0).abs() < 1e-15);
        assert!((u.variance() - 1.0 / 3.0).abs() < 1e-15);
        // E[(X-1)^4] for U(0,2) is 1/5.
        assert!((u.fourth_central_moment() - 0.2).abs() < 1e-14);
        assert_eq!(law_moment(&PointMass(1.0), 2), 1.0);
        assert_eq!(PointMass(1.0).variance(), 0.0);
        assert!((law_moment(&Beta(1.0, 1.0), 1) - 0.5).abs() < 1e-15);
        // Beta(2,3): mean 2/5, E[X^2] = 2*3/(5*6) = 1/5.
        assert!((law_moment(&Beta(2.0, 3.0), 2) - 0.2).abs() < 1e-15);
        let a = AtomZeroMixture(0.25, Box::new(Uniform(0.0, 2.0)));
        assert!((a.mean() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn beta_moment_examples() {
        let v = beta_moment(&Uniform(0.0, 1.0), 2, 1).unwrap();
        assert!((v - 1.0 / 12.0).abs() < 1e-15);
        for (m, n) in [(0, 0), (3, 2), (5, 7)] {
            let v = beta_moment(&PointMass(0.5), m, n).unwrap();
            assert!((v - 0.5f64.powi((m + n) as i32)).abs() < 1e-16);
        }
        let p = 0.3;
        assert!((beta_moment(&PointMass(p), 1, 1).unwrap() - p * (1.0 - p)).abs() < 1e-16);
    }

    #[test]
    fn beta_moment_domain_error() {
        assert!(matches!(beta_moment(&Uniform(0.0, 2.0), 1, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn beta_closed_form_matches_quadrature() {
        // Density quadrature as an independent route for Beta(a, b), a, b >= 1.
        for (al, be) in [(1.0, 1.0), (2.0, 3.0), (2.5, 1.5)] {
            let law = Beta(al, be);
            let norm = quad::integrate_adaptive(
                |u: f64| u.powf(al - 1.0) * (1.0 - u).powf(be - 1.0),
                0.0,
                1.0,
                1e-13,
                1e-16,
            );
            for (m, n) in [(0, 0), (1, 0), (2, 3), (4, 1)] {
                let num = quad::integrate_adaptive(
                    |u: f64| u.powf(al - 1.0 + m as f64) * (1.0 - u).powf(be - 1.0 + n as f64),
                    0.0,
                    1.0,
                    1e-13,
                    1e-16,
                );
                let got = law.beta_moment(m, n).unwrap();
                assert!((got - num / norm).abs() < 1e-10, "beta({al},{be}) m={m} n={n}");
            }
        }
    }

    #[test]
    fn interval_quadrature_matches_closed_form_on_unit() {
        let tol = Tolerances::default();
        for (m, n) in [(0, 0), (2, 1), (6, 6), (12, 11)] {
            let q = interval_beta_moment(0.0, 1.0, m, n, &tol);
            let c = uniform_unit_beta_moment(m, n);
            assert!(((q - c) / c).abs() < 1e-12, "m={m} n={n}");
        }
    }

    #[test]
    fn parse_round_trip() {
        for s in ["pointmass:0.5", "uniform:0,2", "uniform2:0,0.25,0.75,1", "beta:2,3", "atom0:0.5,uniform:0,2"] {
            let law: DistributionSpec = s.parse().unwrap();
            let again: DistributionSpec = law.to_string().parse().unwrap();
            assert_eq!(law, again);
        }
        assert!("uniform:0".parse::<DistributionSpec>().is_err());
        assert!("gauss:0,1".parse::<DistributionSpec>().is_err());
        assert!("uniform:2,1".parse::<DistributionSpec>().is_err());
    }

    #[test]
    fn empirical_mean_within_four_standard_errors() {
        let laws = [
            Uniform(0.0, 2.0),
            UniformUnion(0.0, 0.2, 0.8, 1.0),
            Beta(2.0, 5.0),
            AtomZeroMixture(0.3, Box::new(Uniform(1.0, 3.0))),
        ];
        let trials = 100_000;
        for (idx, law) in laws.iter().enumerate() {
            let mut rng = SeededRng::new(100 + idx as u64);
            let mean: f64 = (0..trials).map(|_| law.sample(&mut rng)).sum::<f64>() / trials as f64;
            let se = (law.variance() / trials as f64).sqrt();
            assert!((mean - law.mean()).abs() <= 4.0 * se, "{law}: {mean} vs {}", law.mean());
        }
    }

    fn unit_law() -> impl Strategy<Value = DistributionSpec> {
        prop_oneof![
            (0.0..=1.0f64).prop_map(PointMass),
            (0.0..0.9f64, 0.01..0.1f64).prop_map(|(a, w)| Uniform(a, a + w)),
            (0.05..5.0f64, 0.05..5.0f64).prop_map(|(a, b)| Beta(a, b)),
            (0.0..0.3f64).prop_map(|t| UniformUnion(0.0, t + 0.01, 1.0 - t - 0.01, 1.0)),
            (0.1..=1.0f64, 0.0..0.5f64).prop_map(|(p, a)| AtomZeroMixture(p, Box::new(Uniform(a, a + 0.5)))),
        ]
    }

    proptest! {
        #[test]
        fn beta_moment_bounded_and_monotone(law in unit_law(), m in 0u32..6, n in 0u32..6) {
            let v = law.beta_moment(m, n).unwrap();
            prop_assert!((-1e-15..=1.0 + 1e-15).contains(&v));
            prop_assert!((law.beta_moment(0, 0).unwrap() - 1.0).abs() < 1e-12);
            let up_m = law.beta_moment(m + 1, n).unwrap();
            let up_n = law.beta_moment(m, n + 1).unwrap();
            prop_assert!(up_m <= v + 1e-14);
            prop_assert!(up_n <= v + 1e-14);
        }
    }
}
