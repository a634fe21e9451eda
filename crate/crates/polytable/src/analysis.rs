//! Quantitative checks beyond raw zeros: the Legendre oracle and diagonal
//! identity, limiting zero densities with empirical comparison, nonreal-zero
//! counting against the I + J + 2K bound, and integer-sequence oracles.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::roots::{unit_f64, RootSet};
use crate::scalar::{cast, to_f64, Real};
use crate::table::PolyTable;

/// Exact Delannoy numbers D(m,n) = D(m-1,n) + D(m,n-1) + D(m-1,n-1),
/// D(0,.) = D(.,0) = 1.
pub fn delannoy_oracle(m: usize, n: usize) -> Result<i128> {
    let cols = n + 1;
    let mut row: Vec<i128> = vec![1; cols];
    for _ in 1..=m {
        let mut next = vec![1i128; cols];
        for j in 1..cols {
            next[j] = next[j - 1]
                .checked_add(row[j])
                .and_then(|v| v.checked_add(row[j - 1]))
                .ok_or(Error::Overflow {
                    context: "Delannoy number",
                })?;
        }
        row = next;
    }
    Ok(row[n])
}

/// Legendre polynomial L_m by the three-term recurrence
/// (m+1) L_{m+1} = (2m+1) z L_m - m L_{m-1}.
pub fn legendre<T: Real>(m: usize) -> Poly<T> {
    let mut prev: Poly<T> = Poly::one();
    if m == 0 {
        return prev;
    }
    let mut cur = Poly::var();
    let z = Poly::var();
    for k in 1..m {
        let kf = cast::<T>(k as f64);
        let next = &(&z * &cur).scale(Complex::new(cast::<T>(2.0 * k as f64 + 1.0), T::zero()))
            - &prev.scale(Complex::new(kf, T::zero()));
        let next = next.scale(Complex::new(T::one() / (kf + T::one()), T::zero()));
        prev = cur;
        cur = next;
    }
    cur
}

/// z^m L_m(2/z - 1) expanded as a polynomial: sum_k l_k (2-z)^k z^{m-k}.
/// This is the Legendre side of the diagonal identity in coefficient form.
pub fn legendre_diagonal_poly<T: Real>(m: usize) -> Poly<T> {
    let l = legendre::<T>(m);
    let two_minus_z = Poly::from_real(&[cast::<T>(2.0), -T::one()]);
    let mut acc = Poly::zero();
    let mut pw = Poly::one(); // (2-z)^k
    for k in 0..=m {
        let term = &pw.scale(l.coeff(k)) * &Poly::monomial(Complex::new(T::one(), T::zero()), m - k);
        acc = &acc + &term;
        pw = &pw * &two_minus_z;
    }
    acc
}

/// Max relative error of H_{m,m}(z) = z^m L_m(2/z - 1) over sampled z in the
/// annulus 0.2 <= |z| <= 5.
pub fn diagonal_identity_residual<T: Real>(
    h_table: &PolyTable<T>,
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<T> {
    let h = h_table.entry(m, m)?;
    let l = legendre::<T>(m);
    let mut state = seed ^ 0x5151_7ea2_u64;
    let mut worst = T::zero();
    for _ in 0..samples.max(1) {
        let r = 0.2 + 4.8 * unit_f64(&mut state);
        let th = std::f64::consts::TAU * unit_f64(&mut state);
        let z = Complex::new(cast::<T>(r * th.cos()), cast::<T>(r * th.sin()));
        let lhs = h.eval(z);
        let w = Complex::new(cast::<T>(2.0), T::zero()) / z - Complex::new(T::one(), T::zero());
        let mut zp = Complex::new(T::one(), T::zero());
        for _ in 0..m {
            zp = zp * z;
        }
        let rhs = zp * l.eval(w);
        let scale = lhs.norm().max(rhs.norm()).max(cast(1e-300));
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityKind {
    /// Arcsine law on (-1, 1), the Legendre zero distribution.
    OmegaArcsine,
    /// Pushforward under z = 2/(1+u): density 2/(pi x^2 sqrt(1-(2/x-1)^2)) on (1, inf).
    MuTransformed,
}

/// Limiting zero density with closed-form pdf and cdf.
#[derive(Clone, Copy, Debug)]
pub struct DensityModel {
    pub kind: DensityKind,
}

impl DensityModel {
    pub fn omega() -> Self {
        DensityModel {
            kind: DensityKind::OmegaArcsine,
        }
    }

    pub fn mu() -> Self {
        DensityModel {
            kind: DensityKind::MuTransformed,
        }
    }

    /// Support interval; the right end is +inf for mu.
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            DensityKind::OmegaArcsine => (-1.0, 1.0),
            DensityKind::MuTransformed => (1.0, f64::INFINITY),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self.kind {
            DensityKind::OmegaArcsine => {
                if x <= -1.0 || x >= 1.0 {
                    0.0
                } else {
                    1.0 / (std::f64::consts::PI * (1.0 - x * x).sqrt())
                }
            }
            DensityKind::MuTransformed => {
                if x <= 1.0 {
                    0.0
                } else {
                    let u = 2.0 / x - 1.0;
                    2.0 / (std::f64::consts::PI * x * x * (1.0 - u * u).sqrt())
                }
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self.kind {
            DensityKind::OmegaArcsine => {
                if x <= -1.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    0.5 + x.asin() / std::f64::consts::PI
                }
            }
            DensityKind::MuTransformed => mu_cdf(x),
        }
    }
}

/// F_mu(x) = 1/2 - arcsin(2/x - 1)/pi for x >= 1, zero to the left.
/// Derived by the change of variables u = 2/x - 1 on the arcsine cdf and
/// validated against quadrature of the pdf (see `cdf_quadrature_error`).
pub fn mu_cdf(x: f64) -> f64 {
    if x < 1.0 {
        return 0.0;
    }
    let u = (2.0 / x - 1.0).clamp(-1.0, 1.0);
    0.5 - u.asin() / std::f64::consts::PI
}

/// Tanh-sinh quadrature on a finite interval; handles the inverse-square-root
/// endpoint singularities of both densities.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let h = 1e-2;
    let mut acc = 0.0;
    let max_k = (4.0 / h) as i64;
    for k in -max_k..=max_k {
        let t = k as f64 * h;
        let s = (0.5 * std::f64::consts::PI * t.sinh()).tanh();
        let w = 0.5 * std::f64::consts::PI * t.cosh()
            / (0.5 * std::f64::consts::PI * t.sinh()).cosh().powi(2);
        let x = mid + half * s;
        if x > a && x < b {
            let v = f(x);
            if v.is_finite() {
                acc += w * v;
            }
        }
    }
    acc * half * h
}

/// Max |cdf(x) - integral of pdf| over the given grid; the independent check
/// that the closed-form cdf matches the stated density.
pub fn cdf_quadrature_error(model: &DensityModel, grid: &[f64]) -> f64 {
    let (lo, _) = model.support();
    grid.iter()
        .map(|&x| {
            let q = if x <= lo {
                0.0
            } else {
                tanh_sinh(|t| model.pdf(t), lo, x)
            };
            (model.cdf(x) - q).abs()
        })
        .fold(0.0, f64::max)
}

/// Two-sided Kolmogorov-Smirnov distance between the real parts of a root set
/// and a model cdf. Errors if any root is nonreal at the pairing tolerance.
pub fn ks_distance<T: Real>(
    zeros: &RootSet<T>,
    model: &DensityModel,
    pairing_tol: T,
) -> Result<T> {
    let mut xs: Vec<f64> = Vec::with_capacity(zeros.len());
    for (idx, r) in zeros.roots.iter().enumerate() {
        if r.im.abs() > pairing_tol * (T::one() + r.norm()) {
            return Err(Error::NonrealSample {
                max_im: to_f64(r.im.abs()),
                index: idx,
            });
        }
        xs.push(to_f64(r.re));
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = model.cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i as f64 + 1.0) / n - f).abs());
    }
    Ok(cast(d))
}

/// Count of roots off the real axis at the given relative tolerance, plus the
/// Theorem bound the caller fills in from the numerator spec.
#[derive(Clone, Debug)]
pub struct NonrealCount<T: Real> {
    pub count: usize,
    pub pairing_tol: T,
    pub bound: usize,
}

impl<T: Real> NonrealCount<T> {
    pub fn with_bound(mut self, bound: usize) -> Self {
        self.bound = bound;
        self
    }

    pub fn within_bound(&self) -> bool {
        self.count <= self.bound
    }
}

/// Roots with |Im r| > pairing_tol * (1 + |r|) count as nonreal.
pub fn count_nonreal<T: Real>(zeros: &RootSet<T>, pairing_tol: T) -> NonrealCount<T> {
    let count = zeros
        .roots
        .iter()
        .filter(|r| r.im.abs() > pairing_tol * (T::one() + r.norm()))
        .count();
    NonrealCount {
        count,
        pairing_tol,
        bound: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::{find_roots, RootConfig};
    use crate::table::build_h_table;
    use num_complex::Complex64;

    type P = Poly<f64>;

    #[test]
    fn delannoy_values() {
        assert_eq!(delannoy_oracle(0, 5).unwrap(), 1);
        assert_eq!(delannoy_oracle(2, 2).unwrap(), 13);
        assert_eq!(delannoy_oracle(3, 3).unwrap(), 63);
        assert!(delannoy_oracle(200, 200).is_err());
    }

    #[test]
    fn legendre_base_cases() {
        assert_eq!(legendre::<f64>(0), P::one());
        assert_eq!(legendre::<f64>(1), P::var());
        assert_eq!(legendre::<f64>(2), P::from_real(&[-0.5, 0.0, 1.5]));
        for m in 0..=10usize {
            let at_one = legendre::<f64>(m).eval(Complex64::new(1.0, 0.0));
            assert!((at_one.re - 1.0).abs() < 1e-13, "L_{m}(1)");
        }
    }

    #[test]
    fn diagonal_identity_small_m() {
        let h = build_h_table::<f64>(3, 3).unwrap();
        assert_eq!(diagonal_identity_residual(&h, 0, 10, 1).unwrap(), 0.0);
        assert!(diagonal_identity_residual(&h, 1, 50, 2).unwrap() <= 1e-14);
        assert!(diagonal_identity_residual(&h, 2, 50, 3).unwrap() <= 1e-12);
    }

    #[test]
    fn diagonal_poly_matches_h_coefficients() {
        let m_cap = 12usize;
        let h = build_h_table::<f64>(m_cap, m_cap).unwrap();
        for m in 0..=m_cap {
            let lhs = h.entry(m, m).unwrap();
            let rhs = legendre_diagonal_poly::<f64>(m);
            let scale = lhs.max_coeff_norm().max(1.0);
            let len = lhs.coeffs().len().max(rhs.coeffs().len());
            for k in 0..len {
                assert!(
                    (lhs.coeff(k) - rhs.coeff(k)).norm() <= 1e-10 * scale,
                    "m={m} coeff {k}"
                );
            }
        }
    }

    #[test]
    fn mu_cdf_endpoints_and_median() {
        assert_eq!(mu_cdf(1.0), 0.0);
        assert_eq!(mu_cdf(0.5), 0.0);
        assert!((mu_cdf(2.0) - 0.5).abs() < 1e-15);
        assert!(mu_cdf(1e9) > 1.0 - 1e-4);
        let mut prev = 0.0;
        for k in 0..200 {
            let x = 1.0 + 0.5 * k as f64;
            let f = mu_cdf(x);
            assert!(f >= prev);
            prev = f;
        }
    }

    #[test]
    fn cdf_matches_quadrature() {
        let grid: Vec<f64> = (0..40).map(|k| 1.0 + 0.25 * k as f64).collect();
        let err = cdf_quadrature_error(&DensityModel::mu(), &grid);
        assert!(err <= 1e-8, "mu cdf vs quadrature: {err:.2e}");
        let grid: Vec<f64> = (0..41).map(|k| -1.0 + 0.05 * k as f64).collect();
        let err = cdf_quadrature_error(&DensityModel::omega(), &grid);
        assert!(err <= 1e-8, "omega cdf vs quadrature: {err:.2e}");
    }

    #[test]
    fn pdf_integrates_to_one() {
        let omega = tanh_sinh(|x| DensityModel::omega().pdf(x), -1.0, 1.0);
        assert!((omega - 1.0).abs() < 1e-6);
        // mu has a heavy tail: integrate to a far cutoff and add the tail mass
        let mu = tanh_sinh(|x| DensityModel::mu().pdf(x), 1.0, 1e6);
        assert!((mu - mu_cdf(1e6)).abs() < 1e-6);
        assert!(1.0 - mu_cdf(1e6) < 1e-2);
    }

    fn root_set_from(reals: &[f64]) -> RootSet<f64> {
        RootSet {
            roots: reals.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            residuals: vec![0.0; reals.len()],
            converged: vec![true; reals.len()],
            source_degree: reals.len(),
        }
    }

    #[test]
    fn ks_quantile_construction() {
        let model = DensityModel::omega();
        let n = 64usize;
        let xs: Vec<f64> = (0..n)
            .map(|i| {
                let q = (i as f64 + 0.5) / n as f64;
                (std::f64::consts::PI * (q - 0.5)).sin()
            })
            .collect();
        let d = ks_distance(&root_set_from(&xs), &model, 1e-9).unwrap();
        assert!(d <= 0.5 / n as f64 + 1e-12, "quantile KS: {d}");
    }

    #[test]
    fn ks_single_point() {
        let model = DensityModel::mu();
        let x = 3.0;
        let d = ks_distance(&root_set_from(&[x]), &model, 1e-9).unwrap();
        let f = mu_cdf(x);
        assert!((d - f.max(1.0 - f)).abs() < 1e-15);
    }

    #[test]
    fn ks_rejects_nonreal() {
        let mut rs = root_set_from(&[1.5, 2.0]);
        rs.roots[1] = Complex64::new(2.0, 0.5);
        assert!(matches!(
            ks_distance(&rs, &DensityModel::mu(), 1e-6),
            Err(Error::NonrealSample { .. })
        ));
    }

    #[test]
    fn nonreal_counting() {
        assert_eq!(count_nonreal(&root_set_from(&[1.0, -2.0]), 1e-6).count, 0);
        let rs = find_roots(&P::from_real(&[1.0, 0.0, 1.0]), &RootConfig::default()).unwrap();
        assert_eq!(count_nonreal(&rs, 1e-6).count, 2);
        let c = count_nonreal(&rs, 1e-6).with_bound(2);
        assert!(c.within_bound());
    }
}
