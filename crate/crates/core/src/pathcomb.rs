//! Loop paths of the simple random walk on Z and the chain limit moments.
//!
//! A loop path of half-length `k` is `gamma = (gamma_0, ..., gamma_{2k})` with
//! `gamma_0 = gamma_{2k} = 0` and unit steps. `N_gamma(i)` counts the steps
//! `i -> i + 1`. For an i.i.d. environment of law `L`, the `2k`-th moment of
//! the chain limit law is
//!
//! ```text
//! sum over gamma of  prod_i E[ V^{N_gamma(i)} (1 - V)^{N_gamma(i-1)} ]
//! ```
//!
//! since the walker leaves site `i` upward `N_gamma(i)` times and downward
//! `N_gamma(i - 1)` times.

use std::collections::BTreeMap;

use crate::config::LOOP_PATH_MAX_K;
use crate::error::{Error, Result};
use crate::randlaw::DistributionSpec;

/// Loop path stored as its step signs: bit `l` set means step `l` goes up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LoopPath {
    steps: u32,
    half_len: u8,
}

impl LoopPath {
    /// Builds a path from its heights; validates endpoints and unit steps.
    pub fn from_heights(heights: &[i32]) -> Result<Self> {
        if heights.len() < 3 || heights.len() % 2 == 0 {
            return Err(Error::Contract(format!("loop path needs 2k + 1 >= 3 heights, got {}", heights.len())));
        }
        if heights[0] != 0 || *heights.last().unwrap() != 0 {
            return Err(Error::Contract("loop path must start and end at 0".into()));
        }
        let k = (heights.len() - 1) / 2;
        if k > LOOP_PATH_MAX_K {
            return Err(Error::Size(format!("half-length {k} exceeds cap {LOOP_PATH_MAX_K}")));
        }
        let mut steps = 0u32;
        for (l, w) in heights.windows(2).enumerate() {
            match w[1] - w[0] {
                1 => steps |= 1 << l,
                -1 => {}
                _ => return Err(Error::Contract(format!("non-unit step at position {l}"))),
            }
        }
        Ok(Self { steps, half_len: k as u8 })
    }

    pub fn half_len(&self) -> usize {
        self.half_len as usize
    }

    pub fn heights(&self) -> Vec<i32> {
        let mut h = Vec::with_capacity(2 * self.half_len() + 1);
        let mut y = 0;
        h.push(y);
        for l in 0..2 * self.half_len() {
            y += if self.steps >> l & 1 == 1 { 1 } else { -1 };
            h.push(y);
        }
        h
    }

    /// Largest `|gamma_l|`.
    pub fn sup_norm(&self) -> i32 {
        self.heights().iter().map(|h| h.abs()).max().unwrap_or(0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.heights().iter().all(|h| *h >= 0)
    }
}

/// All `binom(2k, k)` loop paths, in lexicographic order of their heights.
pub fn enumerate_loop_paths(k: usize) -> Result<Vec<LoopPath>> {
    if k == 0 {
        return Err(Error::Contract("loop paths need k >= 1".into()));
    }
    if k > LOOP_PATH_MAX_K {
        return Err(Error::Size(format!("half-length {k} exceeds cap {LOOP_PATH_MAX_K}")));
    }
    let mut out = Vec::new();
    // Down before up gives lexicographic order on heights.
    fn walk(k: usize, pos: usize, ups: usize, steps: u32, out: &mut Vec<LoopPath>) {
        let len = 2 * k;
        if pos == len {
            out.push(LoopPath { steps, half_len: k as u8 });
            return;
        }
        let downs = pos - ups;
        if downs < k {
            walk(k, pos + 1, ups, steps, out);
        }
        if ups < k {
            walk(k, pos + 1, ups + 1, steps | 1 << pos, out);
        }
    }
    walk(k, 0, 0, 0, &mut out);
    Ok(out)
}

/// `N_gamma(i)`: number of steps `i -> i + 1`, for every level crossed.
pub fn crossing_counts(path: &LoopPath) -> BTreeMap<i32, u32> {
    let mut counts = BTreeMap::new();
    let h = path.heights();
    for w in h.windows(2) {
        if w[1] == w[0] + 1 {
            *counts.entry(w[0]).or_insert(0) += 1;
        }
    }
    counts
}

/// Sum over loop paths of half-length `k` of `joint(profile)`, where
/// `profile` lists `(N(i), N(i - 1))` for every site visited by the path.
///
/// `joint` is the expectation of `prod_i V_i^{up} (1 - V_i)^{down}` over the
/// environment. For an i.i.d. environment it factorizes; for a stationary
/// ergodic one the caller supplies the joint moment directly.
pub fn chain_limit_moment_with(k: usize, mut joint: impl FnMut(&[(u32, u32)]) -> f64) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    if k > LOOP_PATH_MAX_K {
        return Err(Error::Size(format!("half-length {k} exceeds cap {LOOP_PATH_MAX_K}")));
    }
    // up[offset + i] = N(i); levels range over -k..k.
    let offset = k as i32 + 1;
    let width = 2 * k + 3;
    let mut up = vec![0u32; width];
    let mut profile = Vec::with_capacity(width);
    let mut total = 0.0;
    struct Ctx<'a, F: FnMut(&[(u32, u32)]) -> f64> {
        k: usize,
        offset: i32,
        up: &'a mut Vec<u32>,
        profile: &'a mut Vec<(u32, u32)>,
        total: &'a mut f64,
        joint: &'a mut F,
    }
    fn walk<F: FnMut(&[(u32, u32)]) -> f64>(ctx: &mut Ctx<'_, F>, pos: usize, height: i32, ups: usize) {
        let len = 2 * ctx.k;
        if pos == len {
            ctx.profile.clear();
            for site in 1..ctx.up.len() {
                let (u, d) = (ctx.up[site], ctx.up[site - 1]);
                if u > 0 || d > 0 {
                    ctx.profile.push((u, d));
                }
            }
            *ctx.total += (ctx.joint)(ctx.profile);
            return;
        }
        let downs = pos - ups;
        if downs < ctx.k {
            walk(ctx, pos + 1, height - 1, ups);
        }
        if ups < ctx.k {
            let idx = (height + ctx.offset) as usize;
            ctx.up[idx] += 1;
            walk(ctx, pos + 1, height + 1, ups + 1);
            ctx.up[idx] -= 1;
        }
    }
    let mut ctx = Ctx {
        k,
        offset,
        up: &mut up,
        profile: &mut profile,
        total: &mut total,
        joint: &mut joint,
    };
    walk(&mut ctx, 0, 0, 0);
    Ok(total)
}

/// Table of `E[V^m (1 - V)^n]` for `m, n <= max`.
pub struct BetaMomentTable {
    size: usize,
    values: Vec<f64>,
}

impl BetaMomentTable {
    pub fn new(law: &DistributionSpec, max: usize) -> Result<Self> {
        law.require_unit_interval()?;
        let size = max + 1;
        let mut values = Vec::with_capacity(size * size);
        for m in 0..size {
            for n in 0..size {
                values.push(law.beta_moment(m as u32, n as u32)?);
            }
        }
        Ok(Self { size, values })
    }

    #[inline]
    pub fn get(&self, m: u32, n: u32) -> f64 {
        self.values[m as usize * self.size + n as usize]
    }
}

/// Moment of order `2k` of the chain limit law for an i.i.d. environment of
/// law `law` on `[0, 1]`. Odd orders vanish and are not enumerated; use
/// [`chain_limit_moment_of_order`] for a general order.
pub fn chain_limit_moment(law: &DistributionSpec, k: usize) -> Result<f64> {
    let table = BetaMomentTable::new(law, k)?;
    chain_limit_moment_with(k, |profile| profile.iter().map(|&(u, d)| table.get(u, d)).product())
}

/// `int x^order mu(dx)`: zero for odd orders, [`chain_limit_moment`] for even.
pub fn chain_limit_moment_of_order(law: &DistributionSpec, order: usize) -> Result<f64> {
    if order % 2 == 1 {
        law.require_unit_interval()?;
        return Ok(0.0);
    }
    chain_limit_moment(law, order / 2)
}

/// Catalan number `binom(2r, r) / (r + 1)`.
pub fn catalan(r: u32) -> Result<u64> {
    let mut c: u128 = 1;
    for j in 1..=r as u128 {
        c = c * 2 * (2 * j - 1) / (j + 1);
        if c > u64::MAX as u128 {
            return Err(Error::Overflow(format!("catalan({r}) does not fit in 64 bits")));
        }
    }
    Ok(c as u64)
}

/// `binom(n, k)` exactly, for table checks.
pub fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, r| acc * (n - r) / (r + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limitlaws::ReferenceLaw;
    use crate::randlaw::DistributionSpec::*;
    use crate::spectra::eig_sym_dense;
    use crate::matrix::DenseMatrix;
    use proptest::prelude::*;

    /// Brute force over all 2^(2k) step sequences.
    fn brute_force_paths(k: usize) -> Vec<Vec<i32>> {
        let mut out = Vec::new();
        for mask in 0u32..(1 << (2 * k)) {
            let mut h = vec![0];
            let mut y = 0;
            for l in 0..2 * k {
                y += if mask >> l & 1 == 1 { 1 } else { -1 };
                h.push(y);
            }
            if y == 0 {
                out.push(h);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn small_enumerations() {
        let p1 = enumerate_loop_paths(1).unwrap();
        let h: Vec<Vec<i32>> = p1.iter().map(|p| p.heights()).collect();
        assert_eq!(h, vec![vec![0, -1, 0], vec![0, 1, 0]]);
        assert_eq!(enumerate_loop_paths(2).unwrap().len(), 6);
        assert_eq!(enumerate_loop_paths(3).unwrap().len(), 20);
        assert!(matches!(enumerate_loop_paths(13), Err(Error::Size(_))));
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for k in 1..=6 {
            let fast: Vec<Vec<i32>> = enumerate_loop_paths(k).unwrap().iter().map(|p| p.heights()).collect();
            assert_eq!(fast, brute_force_paths(k), "k={k}");
        }
    }

    #[test]
    fn counts_and_catalan() {
        for k in 1..=8usize {
            let paths = enumerate_loop_paths(k).unwrap();
            assert_eq!(paths.len() as u64, binomial(2 * k as u64, k as u64));
            let nonneg = paths.iter().filter(|p| p.is_nonnegative()).count() as u64;
            assert_eq!(nonneg, catalan(k as u32).unwrap());
        }
    }

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(0).unwrap(), 1);
        assert_eq!(catalan(2).unwrap(), 2);
        assert_eq!(catalan(3).unwrap(), 5);
        assert_eq!(catalan(30).unwrap(), 3_814_986_502_092_304);
        assert!(matches!(catalan(40), Err(Error::Overflow(_))));
    }

    #[test]
    fn crossing_examples() {
        let c = |h: &[i32]| crossing_counts(&LoopPath::from_heights(h).unwrap());
        assert_eq!(c(&[0, 1, 0]), BTreeMap::from([(0, 1)]));
        assert_eq!(c(&[0, 1, 2, 1, 0]), BTreeMap::from([(0, 1), (1, 1)]));
        assert_eq!(c(&[0, -1, 0, 1, 0]), BTreeMap::from([(-1, 1), (0, 1)]));
        assert!(LoopPath::from_heights(&[0, 2, 0]).is_err());
        assert!(LoopPath::from_heights(&[0, 1, 2]).is_err());
    }

    #[test]
    fn crossing_profile_invariants() {
        for k in 1..=7 {
            for p in enumerate_loop_paths(k).unwrap() {
                let c = crossing_counts(&p);
                assert_eq!(c.values().sum::<u32>() as usize, k);
                assert!(p.sup_norm() as usize <= k);
            }
        }
    }

    #[test]
    fn point_mass_half_gives_arcsine() {
        for k in 1..=6 {
            let got = chain_limit_moment(&PointMass(0.5), k).unwrap();
            let want = binomial(2 * k as u64, k as u64) as f64 / 4f64.powi(k as i32);
            assert!((got - want).abs() < 1e-12, "k={k}");
        }
        assert!((chain_limit_moment(&PointMass(0.5), 1).unwrap() - 0.5).abs() < 1e-16);
    }

    #[test]
    fn point_mass_p_gives_scaled_arcsine() {
        for p in [0.1, 0.3, 0.8] {
            let law = PointMass(p);
            let arcsine = ReferenceLaw::ArcSine(2.0 * (p * (1.0 - p)).sqrt());
            assert!((chain_limit_moment(&law, 1).unwrap() - 2.0 * p * (1.0 - p)).abs() < 1e-15);
            for k in 1..=5 {
                let got = chain_limit_moment(&law, k).unwrap();
                assert!((got - arcsine.moment(2 * k as u32)).abs() < 1e-12, "p={p} k={k}");
            }
        }
    }

    #[test]
    fn uniform_second_moment() {
        assert!((chain_limit_moment(&Uniform(0.0, 1.0), 1).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn direct_evaluation_over_profiles() {
        // Independent route: per-path products from crossing_counts.
        let law = Beta(2.0, 3.0);
        for k in 1..=5 {
            let mut sum = 0.0;
            for p in enumerate_loop_paths(k).unwrap() {
                let c = crossing_counts(&p);
                let n = |i: i32| *c.get(&i).unwrap_or(&0);
                let mut prod = 1.0;
                for site in -(k as i32)..=(k as i32) {
                    prod *= law.beta_moment(n(site), n(site - 1)).unwrap();
                }
                sum += prod;
            }
            assert!((sum - chain_limit_moment(&law, k).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn odd_orders_vanish() {
        assert_eq!(chain_limit_moment_of_order(&Uniform(0.0, 1.0), 3).unwrap(), 0.0);
        assert!(chain_limit_moment_of_order(&Uniform(0.0, 2.0), 3).is_err());
    }

    fn unit_law() -> impl Strategy<Value = DistributionSpec> {
        prop_oneof![
            (0.0..=1.0f64).prop_map(PointMass),
            (0.0..0.8f64, 0.05..0.2f64).prop_map(|(a, w)| Uniform(a, a + w)),
            (0.2..5.0f64, 0.2..5.0f64).prop_map(|(a, b)| Beta(a, b)),
            (0.05..0.45f64).prop_map(|t| UniformUnion(0.0, t, 1.0 - t, 1.0)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn moment_sequence_is_valid(law in unit_law()) {
            let m: Vec<f64> = (1..=3).map(|k| chain_limit_moment(&law, k).unwrap()).collect();
            for w in m.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-14);
            }
            for v in &m {
                prop_assert!((-1e-15..=1.0 + 1e-15).contains(v));
            }
            // Hankel matrix of (1, 0, m2, 0, m4, 0, m6) is PSD.
            let seq = [1.0, 0.0, m[0], 0.0, m[1], 0.0, m[2]];
            let h = DenseMatrix::from_fn(4, |i, j| seq[i + j]);
            let s = eig_sym_dense(&h).unwrap();
            prop_assert!(s.smallest() >= -1e-10, "{}", s.smallest());
        }
    }
}
