//! Symmetric eigensolvers and empirical spectral distributions.
//!
//! Tridiagonal matrices go through implicit-shift QL (eigenvalues only).
//! Dense matrices are first reduced to tridiagonal form with Householder
//! reflections acting on the lower triangle.

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::kernels::{symmetrize, MarkovKernel};
use crate::matrix::{DenseMatrix, SymmetricMatrix};

/// Real eigenvalues sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts `values` ascending. NaNs are rejected.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Numeric("NaN eigenvalue".into()));
        }
        values.sort_by(|a, b| a.total_cmp(b));
        Ok(Self { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn ascending(&self) -> &[f64] {
        &self.values
    }

    /// `lambda_k`, counted from the top: `lambda(1)` is the largest.
    pub fn lambda(&self, k: usize) -> f64 {
        assert!(k >= 1 && k <= self.dim(), "eigenvalue index {k} out of range");
        self.values[self.dim() - k]
    }

    pub fn largest(&self) -> f64 {
        *self.values.last().expect("empty spectrum")
    }

    pub fn smallest(&self) -> f64 {
        self.values[0]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn sum_sq(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum()
    }
}

/// Finite atomic probability measure on the line.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl EmpiricalDistribution {
    /// Atoms are sorted together with their weights.
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::Dimension { expected: atoms.len(), got: weights.len() });
        }
        if atoms.is_empty() {
            return Err(Error::Contract("empirical distribution needs at least one atom".into()));
        }
        if atoms.iter().any(|a| !a.is_finite()) || weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::Contract("atoms must be finite and weights positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Contract(format!("weights sum to {total}")));
        }
        let mut pairs: Vec<(f64, f64)> = atoms.into_iter().zip(weights).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (atoms, weights) = pairs.into_iter().unzip();
        Ok(Self { atoms, weights })
    }

    /// Equal weights `1 / len`.
    pub fn uniform(atoms: Vec<f64>) -> Result<Self> {
        let w = 1.0 / atoms.len().max(1) as f64;
        let weights = vec![w; atoms.len()];
        if atoms.is_empty() {
            return Err(Error::Contract("empirical distribution needs at least one atom".into()));
        }
        let mut atoms = atoms;
        if atoms.iter().any(|a| !a.is_finite()) {
            return Err(Error::Contract("atoms must be finite".into()));
        }
        atoms.sort_by(|a, b| a.total_cmp(b));
        Ok(Self { atoms, weights })
    }

    pub fn dirac(x: f64) -> Self {
        Self { atoms: vec![x], weights: vec![1.0] }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn moment(&self, order: u32) -> f64 {
        self.atoms
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * x.powi(order as i32))
            .sum()
    }

    pub fn abs_moment(&self, p: f64) -> f64 {
        self.atoms.iter().zip(&self.weights).map(|(x, w)| w * x.abs().powf(p)).sum()
    }

    /// `F(x) = mu((-inf, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        let idx = self.atoms.partition_point(|a| *a <= x);
        self.weights[..idx].iter().sum::<f64>().min(1.0)
    }

    /// Cumulative weights `F` after each atom; the last entry is forced to 1.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out: Vec<f64> = self
            .weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        if let Some(last) = out.last_mut() {
            *last = 1.0;
        }
        out
    }

    /// Generalized inverse `inf { x : F(x) >= t }` for `t` in `(0, 1]`.
    pub fn quantile(&self, t: f64) -> f64 {
        let cum = self.cumulative();
        let idx = cum.partition_point(|c| *c < t).min(self.atoms.len() - 1);
        self.atoms[idx]
    }

    /// Mixture `(1 - s) self + s other`.
    pub fn mix(&self, other: &EmpiricalDistribution, s: f64) -> Result<Self> {
        let atoms = self.atoms.iter().chain(&other.atoms).cloned().collect();
        let weights = self
            .weights
            .iter()
            .map(|w| w * (1.0 - s))
            .chain(other.weights.iter().map(|w| w * s))
            .collect();
        Self::new(atoms, weights)
    }
}

/// Number of eigenvalues strictly below `x` (Sturm sequence / LDL^T pivots).
pub fn sturm_count(diag: &[f64], offdiag: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0f64;
    for i in 0..diag.len() {
        let coupling = if i == 0 { 0.0 } else { offdiag[i - 1] * offdiag[i - 1] / q };
        q = diag[i] - x - coupling;
        if q == 0.0 {
            q = -f64::MIN_POSITIVE.sqrt() * (1.0 + x.abs());
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues of a symmetric tridiagonal matrix.
pub fn eig_sym_tridiagonal(diag: &[f64], offdiag: &[f64]) -> Result<Spectrum> {
    eig_sym_tridiagonal_with(diag, offdiag, &Tolerances::default())
}

pub fn eig_sym_tridiagonal_with(diag: &[f64], offdiag: &[f64], tol: &Tolerances) -> Result<Spectrum> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::Contract("empty matrix".into()));
    }
    if offdiag.len() + 1 != n {
        return Err(Error::Dimension { expected: n - 1, got: offdiag.len() });
    }
    if diag.iter().chain(offdiag).any(|x| !x.is_finite()) {
        return Err(Error::Contract("non-finite matrix entry".into()));
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    ql_implicit(&mut d, &mut e, tol.ql_max_iter)?;
    let spectrum = Spectrum::from_values(d)?;
    sturm_validate(diag, offdiag, &spectrum, tol)?;
    Ok(spectrum)
}

/// Implicit QL with Wilkinson-type shift. `d` holds the diagonal, `e[i]`
/// couples `i` and `i + 1` (`e[n-1]` is scratch). Eigenvalues land in `d`.
fn ql_implicit(d: &mut [f64], e: &mut [f64], max_iter: usize) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_iter {
                return Err(Error::Numeric(format!(
                    "QL did not converge for eigenvalue {l} after {max_iter} iterations"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn sturm_validate(diag: &[f64], offdiag: &[f64], spectrum: &Spectrum, tol: &Tolerances) -> Result<()> {
    let n = diag.len();
    let scale = diag.iter().chain(offdiag).fold(0.0f64, |m, x| m.max(x.abs()));
    let delta = (tol.sturm_check * scale).max(1e-300);
    let probes = 5.min(n);
    for s in 0..probes {
        let k = if probes == 1 { 0 } else { s * (n - 1) / (probes - 1) };
        let lambda = spectrum.ascending()[k];
        let below = sturm_count(diag, offdiag, lambda - delta);
        let upto = sturm_count(diag, offdiag, lambda + delta);
        if below > k || upto < k + 1 {
            return Err(Error::Numeric(format!(
                "Sturm check failed at index {k}: lambda = {lambda}, counts {below}/{upto}"
            )));
        }
    }
    Ok(())
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
/// Returns `(diag, offdiag)`. Only the lower triangle of `a` is read.
pub fn householder_tridiagonalize(a: &DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.dim();
    let mut work = a.clone();
    let buf = work.as_mut_slice();
    let mut e = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut p = vec![0.0; n];
    for i in (1..n).rev() {
        let (head, tail) = buf.split_at_mut(i * n);
        let row_i = &tail[..i];
        if i == 1 {
            e[1] = row_i[0];
            continue;
        }
        let scale: f64 = row_i.iter().map(|x| x.abs()).sum();
        if scale == 0.0 {
            e[i] = 0.0;
            continue;
        }
        let u = &mut u[..i];
        let p = &mut p[..i];
        for (uk, x) in u.iter_mut().zip(row_i) {
            *uk = x / scale;
        }
        let mut h: f64 = u.iter().map(|x| x * x).sum();
        let f = u[i - 1];
        let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
        e[i] = scale * g;
        h -= f * g;
        u[i - 1] = f - g;

        // p = A u / h using the lower triangle rows of the leading block.
        p.iter_mut().for_each(|x| *x = 0.0);
        for j in 0..i {
            let row = &head[j * n..j * n + j + 1];
            let uj = u[j];
            let mut acc = 0.0;
            for ((a_jk, uk), pk) in row[..j].iter().zip(&u[..j]).zip(p[..j].iter_mut()) {
                acc += a_jk * uk;
                *pk += a_jk * uj;
            }
            p[j] += acc + row[j] * uj;
        }
        let inv_h = 1.0 / h;
        p.iter_mut().for_each(|x| *x *= inv_h);
        let kk: f64 = u.iter().zip(p.iter()).map(|(a, b)| a * b).sum::<f64>() / (2.0 * h);
        for (pk, uk) in p.iter_mut().zip(u.iter()) {
            *pk -= kk * uk;
        }
        for j in 0..i {
            let row = &mut head[j * n..j * n + j + 1];
            let (uj, qj) = (u[j], p[j]);
            for ((a_jk, uk), qk) in row.iter_mut().zip(&u[..=j]).zip(&p[..=j]) {
                *a_jk -= uj * qk + qj * uk;
            }
        }
    }
    let d = (0..n).map(|i| buf[i * n + i]).collect();
    e.remove(0);
    (d, e)
}

/// All eigenvalues of a dense symmetric matrix.
pub fn eig_sym_dense(s: &DenseMatrix) -> Result<Spectrum> {
    eig_sym_dense_with(s, &Tolerances::default())
}

pub fn eig_sym_dense_with(s: &DenseMatrix, tol: &Tolerances) -> Result<Spectrum> {
    let n = s.dim();
    if n == 0 {
        return Err(Error::Contract("empty matrix".into()));
    }
    if s.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::Contract("non-finite matrix entry".into()));
    }
    let asym = s.max_asymmetry();
    if asym > tol.symmetry * s.max_abs().max(1.0) {
        return Err(Error::Contract(format!("matrix is not symmetric (defect {asym:e})")));
    }
    let (d, e) = householder_tridiagonalize(s);
    eig_sym_tridiagonal_with(&d, &e, tol)
}

pub fn eig_symmetric(s: &SymmetricMatrix) -> Result<Spectrum> {
    match s {
        SymmetricMatrix::Dense(m) => eig_sym_dense(m),
        SymmetricMatrix::Tridiagonal(t) => eig_sym_tridiagonal(&t.diag, &t.offdiag),
    }
}

/// Spectrum of a reversible kernel via its symmetric conjugate.
pub fn kernel_spectrum(kernel: &MarkovKernel) -> Result<Spectrum> {
    kernel_spectrum_with(kernel, &Tolerances::default())
}

pub fn kernel_spectrum_with(kernel: &MarkovKernel, tol: &Tolerances) -> Result<Spectrum> {
    let s = symmetrize(kernel)?;
    let spectrum = match &s {
        SymmetricMatrix::Dense(m) => eig_sym_dense_with(m, tol)?,
        SymmetricMatrix::Tridiagonal(t) => eig_sym_tridiagonal_with(&t.diag, &t.offdiag, tol)?,
    };
    let slack = tol.markov_spectrum;
    if (spectrum.largest() - 1.0).abs() > slack || spectrum.smallest() < -1.0 - slack {
        return Err(Error::Numeric(format!(
            "kernel spectrum [{}, {}] violates lambda_1 = 1, lambda_n >= -1",
            spectrum.smallest(),
            spectrum.largest()
        )));
    }
    Ok(spectrum)
}

/// ESD of `scale * lambda_k`, optionally without the top eigenvalue.
pub fn esd(spectrum: &Spectrum, scale: f64, trim_top: bool) -> Result<EmpiricalDistribution> {
    let n = spectrum.dim();
    let values = if trim_top {
        if n < 2 {
            return Err(Error::Contract("cannot trim the top eigenvalue of a 1x1 spectrum".into()));
        }
        &spectrum.ascending()[..n - 1]
    } else {
        spectrum.ascending()
    };
    EmpiricalDistribution::uniform(values.iter().map(|x| scale * x).collect())
}

/// `sum_k w_k x_k^order`.
pub fn esd_moment(dist: &EmpiricalDistribution, order: u32) -> f64 {
    dist.moment(order)
}

/// `1 - lambda_2`.
pub fn spectral_gap(spectrum: &Spectrum) -> Result<f64> {
    if spectrum.dim() < 2 {
        return Err(Error::Contract("spectral gap needs n >= 2".into()));
    }
    Ok(1.0 - spectrum.lambda(2))
}

/// `1 - max(-lambda_n, lambda_2)`.
pub fn varsigma(spectrum: &Spectrum) -> Result<f64> {
    if spectrum.dim() < 2 {
        return Err(Error::Contract("varsigma needs n >= 2".into()));
    }
    Ok(1.0 - (-spectrum.smallest()).max(spectrum.lambda(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{build_chain_kernel_iid, build_complete_kernel};
    use crate::randlaw::DistributionSpec::*;
    use crate::rng::SeededRng;
    use proptest::prelude::*;

    fn random_symmetric(n: usize, rng: &mut SeededRng) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let x = 2.0 * rng.uniform() - 1.0;
                m.set(i, j, x);
                m.set(j, i, x);
            }
        }
        m
    }

    /// Solves `(A - shift I) x = b` by Gaussian elimination with pivoting.
    fn shifted_solve(a: &DenseMatrix, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = a.dim();
        let mut m: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut r: Vec<f64> = a.row(i).to_vec();
                r[i] -= shift;
                r.push(b[i]);
                r
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs())).unwrap();
            m.swap(col, piv);
            let pv = if m[col][col] == 0.0 { 1e-300 } else { m[col][col] };
            for r in col + 1..n {
                let f = m[r][col] / pv;
                if f != 0.0 {
                    for c in col..=n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
        let mut x = vec![0.0; n];
        for r in (0..n).rev() {
            let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
            let pv = if m[r][r] == 0.0 { 1e-300 } else { m[r][r] };
            x[r] = (m[r][n] - s) / pv;
        }
        x
    }

    /// Inverse iteration at `lambda`; returns the residual `|A v - rq v|`
    /// and the Rayleigh quotient `rq`.
    fn inverse_iteration(a: &DenseMatrix, lambda: f64) -> (f64, f64) {
        let n = a.dim();
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.37).sin()).collect();
        for _ in 0..3 {
            let w = shifted_solve(a, lambda + 1e-13, &v);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            v = w.iter().map(|x| x / norm).collect();
        }
        let av: Vec<f64> = (0..n).map(|i| a.row(i).iter().zip(&v).map(|(x, y)| x * y).sum()).collect();
        let rq: f64 = av.iter().zip(&v).map(|(x, y)| x * y).sum();
        let res = av.iter().zip(&v).map(|(x, y)| (x - rq * y).powi(2)).sum::<f64>().sqrt();
        (res, rq)
    }

    /// Characteristic polynomial coefficients by the Faddeev–Leverrier
    /// recursion: `det(x I - A) = x^n + c[1] x^{n-1} + ... + c[n]`.
    fn leverrier(a: &DenseMatrix) -> Vec<f64> {
        let n = a.dim();
        let mut c = vec![1.0; n + 1];
        let mut m = DenseMatrix::identity(n);
        for k in 1..=n {
            let am = a.matmul(&m).unwrap();
            c[k] = -am.trace() / k as f64;
            m = DenseMatrix::from_fn(n, |i, j| am.get(i, j) + if i == j { c[k] } else { 0.0 });
        }
        c
    }

    fn poly_eval(c: &[f64], x: f64) -> f64 {
        c.iter().fold(0.0, |acc, ci| acc * x + ci)
    }

    /// Real roots of a polynomial known to have only real roots, by
    /// sign-change scanning on a fine grid followed by bisection.
    fn real_roots(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
        let steps = 200_000;
        let mut roots = Vec::new();
        let h = (hi - lo) / steps as f64;
        let mut x0 = lo;
        let mut f0 = poly_eval(c, x0);
        for s in 1..=steps {
            let x1 = lo + s as f64 * h;
            let f1 = poly_eval(c, x1);
            if f0 == 0.0 {
                roots.push(x0);
            } else if f0 * f1 < 0.0 {
                let (mut a, mut b) = (x0, x1);
                for _ in 0..100 {
                    let mid = 0.5 * (a + b);
                    if poly_eval(c, a) * poly_eval(c, mid) <= 0.0 {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            x0 = x1;
            f0 = f1;
        }
        roots
    }

    #[test]
    fn two_by_two_tridiagonal() {
        let s = eig_sym_tridiagonal(&[0.0, 0.0], &[1.0]).unwrap();
        assert!((s.ascending()[0] + 1.0).abs() < 1e-15);
        assert!((s.ascending()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dense_trivial_cases() {
        let s = eig_sym_dense(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(s.ascending(), &[1.0, 1.0, 1.0]);
        let s = eig_sym_dense(&DenseMatrix::diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(s.ascending(), &[1.0, 2.0, 3.0]);
        let s = eig_sym_dense(&DenseMatrix::from_row_major(1, vec![4.0]).unwrap()).unwrap();
        assert_eq!(s.ascending(), &[4.0]);
    }

    #[test]
    fn dense_rejects_asymmetric() {
        let m = DenseMatrix::from_row_major(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(matches!(eig_sym_dense(&m), Err(Error::Contract(_))));
    }

    #[test]
    fn dense_trace_identities_4x4() {
        let mut rng = SeededRng::new(44);
        for _ in 0..20 {
            let m = random_symmetric(4, &mut rng);
            let s = eig_sym_dense(&m).unwrap();
            assert!((s.sum() - m.trace()).abs() < 1e-10);
            assert!((s.sum_sq() - m.frobenius_sq()).abs() < 1e-10);
        }
    }

    #[test]
    fn chain_three_states() {
        let k: MarkovKernel = build_chain_kernel_iid(3, &PointMass(0.5), &SeededRng::new(0)).unwrap().into();
        let s = kernel_spectrum(&k).unwrap();
        // Characteristic polynomial of K is x^3 - x.
        for (got, want) in s.ascending().iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let chain2: MarkovKernel = build_chain_kernel_iid(2, &PointMass(0.5), &SeededRng::new(0)).unwrap().into();
        let s2 = kernel_spectrum(&chain2).unwrap();
        assert!((s2.ascending()[0] + 1.0).abs() < 1e-15 && (s2.ascending()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dense_two_states_rank_one() {
        let k: MarkovKernel = build_complete_kernel(2, &PointMass(1.0), &SeededRng::new(0)).unwrap().into();
        let s = kernel_spectrum(&k).unwrap();
        assert!(s.ascending()[0].abs() < 1e-15);
        assert!((s.ascending()[1] - 1.0).abs() < 1e-15);
        assert!((spectral_gap(&s).unwrap() - 1.0).abs() < 1e-15);
        assert!((varsigma(&s).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gap_and_varsigma_periodic_chain() {
        let s = Spectrum::from_values(vec![1.0, -1.0]).unwrap();
        assert_eq!(spectral_gap(&s).unwrap(), 2.0);
        assert_eq!(varsigma(&s).unwrap(), 0.0);
        let one = Spectrum::from_values(vec![1.0]).unwrap();
        assert!(spectral_gap(&one).is_err());
        assert!(varsigma(&one).is_err());
    }

    #[test]
    fn characteristic_polynomial_oracle() {
        // Eigenvalues via symmetrization equal the roots of det(xI - K),
        // built from the non-symmetric K itself.
        for (n, seed) in [(3, 7), (4, 8), (5, 9), (6, 10)] {
            let k: MarkovKernel = build_complete_kernel(n, &Uniform(0.0, 2.0), &SeededRng::new(seed)).unwrap().into();
            let spec = kernel_spectrum(&k).unwrap();
            let c = leverrier(&k.to_dense());
            let roots = real_roots(&c, -1.05, 1.05);
            assert_eq!(roots.len(), n, "n={n}: roots {roots:?}");
            for (r, l) in roots.iter().zip(spec.ascending()) {
                assert!((r - l).abs() < 1e-7, "n={n}: {r} vs {l}");
            }
        }
    }

    #[test]
    fn inverse_iteration_oracle_30x30() {
        let mut rng = SeededRng::new(2024);
        for _ in 0..100 {
            let m = random_symmetric(30, &mut rng);
            let spec = eig_sym_dense(&m).unwrap();
            assert!((spec.sum() - m.trace()).abs() < 1e-9);
            assert!((spec.sum_sq() - m.frobenius_sq()).abs() < 1e-9);
            for &lambda in spec.ascending().iter().step_by(7) {
                let (res, rq) = inverse_iteration(&m, lambda);
                assert!(res < 1e-9, "residual {res}");
                assert!((rq - lambda).abs() < 1e-9, "{rq} vs {lambda}");
            }
        }
    }

    #[test]
    fn tridiagonal_matches_dense_n50() {
        let mut rng = SeededRng::new(50);
        for _ in 0..20 {
            let d: Vec<f64> = (0..50).map(|_| 2.0 * rng.uniform() - 1.0).collect();
            let e: Vec<f64> = (0..49).map(|_| 2.0 * rng.uniform() - 1.0).collect();
            let t = eig_sym_tridiagonal(&d, &e).unwrap();
            let dense = crate::matrix::SymTridiagonal::new(d, e).unwrap().to_dense();
            let full = eig_sym_dense(&dense).unwrap();
            for (a, b) in t.ascending().iter().zip(full.ascending()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sturm_counts() {
        // Eigenvalues of [[0,1],[1,0]] are -1, 1.
        assert_eq!(sturm_count(&[0.0, 0.0], &[1.0], -2.0), 0);
        assert_eq!(sturm_count(&[0.0, 0.0], &[1.0], 0.0), 1);
        assert_eq!(sturm_count(&[0.0, 0.0], &[1.0], 2.0), 2);
    }

    #[test]
    fn markov_spectrum_properties() {
        for seed in 0..5 {
            let d: MarkovKernel = build_complete_kernel(60, &Uniform(0.0, 2.0), &SeededRng::new(seed)).unwrap().into();
            let s = kernel_spectrum(&d).unwrap();
            assert!((s.largest() - 1.0).abs() < 1e-9);
            assert!(s.ascending().iter().all(|x| (-1.0 - 1e-9..=1.0 + 1e-9).contains(x)));

            let c: MarkovKernel = build_chain_kernel_iid(101, &Beta(2.0, 3.0), &SeededRng::new(seed)).unwrap().into();
            let s = kernel_spectrum(&c).unwrap();
            assert!((s.largest() - 1.0).abs() < 1e-9);
            assert!((s.smallest() + 1.0).abs() < 1e-9);
            let asc = s.ascending();
            for k in 0..asc.len() {
                assert!((asc[k] + asc[asc.len() - 1 - k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn esd_examples() {
        let s = Spectrum::from_values(vec![1.0, -1.0]).unwrap();
        let e = esd(&s, 1.0, false).unwrap();
        assert_eq!(e.atoms(), &[-1.0, 1.0]);
        assert_eq!(e.weights(), &[0.5, 0.5]);

        let s3 = Spectrum::from_values(vec![-1.0, 0.0, 1.0]).unwrap();
        let t = esd(&s3, 1.0, true).unwrap();
        assert_eq!(t.atoms(), &[-1.0, 0.0]);
        assert_eq!(t.weights(), &[0.5, 0.5]);

        assert!(esd(&Spectrum::from_values(vec![1.0]).unwrap(), 1.0, true).is_err());
        assert_eq!(esd_moment(&e, 0), 1.0);
    }

    #[test]
    fn trimmed_decomposition_identity() {
        let n = 40;
        let k: MarkovKernel = build_complete_kernel(n, &Uniform(0.0, 2.0), &SeededRng::new(12)).unwrap().into();
        let s = kernel_spectrum(&k).unwrap();
        let scale = (n as f64).sqrt();
        let full = esd(&s, scale, false).unwrap();
        let trimmed = esd(&s, scale, true).unwrap();
        let rebuilt = trimmed.mix(&EmpiricalDistribution::dirac(scale), 1.0 / n as f64).unwrap();
        for order in 0..6 {
            let a = full.moment(order);
            let b = rebuilt.moment(order);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "order {order}");
        }
        assert_eq!(rebuilt.len(), full.len());
        assert!((rebuilt.atoms().last().unwrap() - full.atoms().last().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn odd_chain_moments_vanish() {
        let k: MarkovKernel = build_chain_kernel_iid(200, &Uniform(0.1, 0.9), &SeededRng::new(3)).unwrap().into();
        let e = esd(&kernel_spectrum(&k).unwrap(), 1.0, false).unwrap();
        for order in [1, 3, 5, 7] {
            assert!(esd_moment(&e, order).abs() < 1e-12);
        }
    }

    #[test]
    fn esd_moments_match_matrix_powers() {
        let n = 20;
        let k: MarkovKernel = build_complete_kernel(n, &Uniform(0.0, 2.0), &SeededRng::new(20)).unwrap().into();
        let e = esd(&kernel_spectrum(&k).unwrap(), 1.0, false).unwrap();
        let km = k.to_dense();
        let mut power = DenseMatrix::identity(n);
        for order in 0..=6 {
            let trace = power.trace() / n as f64;
            assert!((esd_moment(&e, order) - trace).abs() < 1e-9, "order {order}");
            power = power.matmul(&km).unwrap();
        }
    }

    #[test]
    fn quantile_and_cdf() {
        let e = EmpiricalDistribution::new(vec![2.0, 0.0, 1.0], vec![0.5, 0.25, 0.25]).unwrap();
        assert_eq!(e.atoms(), &[0.0, 1.0, 2.0]);
        assert_eq!(e.quantile(0.1), 0.0);
        assert_eq!(e.quantile(0.25), 0.0);
        assert_eq!(e.quantile(0.3), 1.0);
        assert_eq!(e.quantile(1.0), 2.0);
        assert_eq!(e.cdf(-1.0), 0.0);
        assert_eq!(e.cdf(1.0), 0.5);
        assert_eq!(e.cdf(5.0), 1.0);
    }

    proptest! {
        #[test]
        fn permuting_equal_atoms_changes_nothing(xs in proptest::collection::vec(-3i32..3, 2..12)) {
            let atoms: Vec<f64> = xs.iter().map(|x| *x as f64).collect();
            let mut rev = atoms.clone();
            rev.reverse();
            let a = EmpiricalDistribution::uniform(atoms).unwrap();
            let b = EmpiricalDistribution::uniform(rev).unwrap();
            for order in 0..5 {
                prop_assert_eq!(a.moment(order), b.moment(order));
            }
            prop_assert_eq!(a.atoms(), b.atoms());
        }
    }
}
