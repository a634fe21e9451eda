//! Exact dyadic polynomial arithmetic.
//!
//! Every finite float is a dyadic rational, so any `Poly<T>` converts exactly
//! to integer mantissas with a shared power-of-two scale. Table recurrences
//! propagated over this representation never round, and Newton/Aberth ratios
//! p/p' evaluated here are exact up to one final rounding. This is what keeps
//! the zeros of high-degree table entries honest: the same entries rounded to
//! f64 coefficients lose their zero sets entirely once coefficients pass 2^53.

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{ToPrimitive, Zero};

use crate::poly::Poly;
use crate::scalar::Real;

/// Gaussian integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn zero() -> Self {
        GaussInt {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn add(&self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    fn mul(&self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn shl(&self, k: u64) -> GaussInt {
        GaussInt {
            re: &self.re << k,
            im: &self.im << k,
        }
    }

    fn neg(&self) -> GaussInt {
        GaussInt {
            re: -&self.re,
            im: -&self.im,
        }
    }

    /// log2 of the Euclidean norm, None for zero.
    fn log2_norm(&self) -> Option<f64> {
        if self.is_zero() {
            return None;
        }
        let (fr, er) = to_f64_exp(&self.re);
        let (fi, ei) = to_f64_exp(&self.im);
        // align to the larger exponent to avoid overflow in the squares
        let e = er.max(ei);
        let a = fr * exp2i(er - e);
        let b = fi * exp2i(ei - e);
        Some((a * a + b * b).log2() / 2.0 + e as f64)
    }
}

/// Splits x into (f, e) with x = f * 2^e and f holding the top <= 64 bits.
fn to_f64_exp(x: &BigInt) -> (f64, i64) {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_f64().unwrap_or(0.0), 0);
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    (top.to_f64().unwrap_or(0.0), shift as i64)
}

/// 2^e as f64 with saturation.
fn exp2i(e: i64) -> f64 {
    if e > 1500 {
        f64::INFINITY
    } else if e < -1500 {
        0.0
    } else {
        (e as f64).exp2()
    }
}

fn round_ratio(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let (nf, ne) = to_f64_exp(num);
    let (df, de) = to_f64_exp(den);
    (nf / df) * exp2i(ne - de)
}

/// Result of one exact evaluation of p and p' at a point.
pub struct NewtonEval<T: Real> {
    /// p(z)/p'(z), rounded once; None when p'(z) is exactly zero.
    pub ratio: Option<Complex<T>>,
    /// log2 |p(z)|, or None when p(z) is exactly zero.
    pub log2_p: Option<f64>,
    /// log2 |p'(z)|, or None when p'(z) is exactly zero.
    pub log2_dp: Option<f64>,
}

/// Polynomial with exact dyadic coefficients: sum coeffs[k] 2^log2_scale z^k.
#[derive(Clone, Debug)]
pub struct ExactPoly {
    coeffs: Vec<GaussInt>,
    log2_scale: i64,
}

impl ExactPoly {
    pub fn new(mut coeffs: Vec<GaussInt>, log2_scale: i64) -> Self {
        while coeffs.last().is_some_and(GaussInt::is_zero) {
            coeffs.pop();
        }
        ExactPoly {
            coeffs,
            log2_scale,
        }
    }

    pub fn zero() -> Self {
        ExactPoly {
            coeffs: Vec::new(),
            log2_scale: 0,
        }
    }

    pub fn one() -> Self {
        ExactPoly::from_int_coeffs(&[1])
    }

    pub fn from_int_coeffs(v: &[i64]) -> Self {
        Self::new(
            v.iter()
                .map(|&k| GaussInt {
                    re: BigInt::from(k),
                    im: BigInt::zero(),
                })
                .collect(),
            0,
        )
    }

    /// Exact conversion: every finite float coefficient is a dyadic rational.
    pub fn from_poly<T: Real>(p: &Poly<T>) -> Self {
        let mut parts: Vec<(i64, i64, i64, i64)> = Vec::with_capacity(p.coeffs().len());
        let mut min_exp = i64::MAX;
        for c in p.coeffs() {
            let (mre, ere) = decode(c.re);
            let (mim, eim) = decode(c.im);
            if mre != 0 {
                min_exp = min_exp.min(ere);
            }
            if mim != 0 {
                min_exp = min_exp.min(eim);
            }
            parts.push((mre, ere, mim, eim));
        }
        if min_exp == i64::MAX {
            return ExactPoly::zero();
        }
        let coeffs = parts
            .into_iter()
            .map(|(mre, ere, mim, eim)| GaussInt {
                re: BigInt::from(mre) << (ere - min_exp).max(0) as u64,
                im: BigInt::from(mim) << (eim - min_exp).max(0) as u64,
            })
            .collect();
        ExactPoly::new(coeffs, min_exp)
    }

    /// Rounds back to floating coefficients.
    pub fn to_poly<T: Real>(&self) -> Poly<T> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|g| {
                let (fr, er) = to_f64_exp(&g.re);
                let (fi, ei) = to_f64_exp(&g.im);
                Complex::new(
                    T::from_f64(fr * exp2i(er + self.log2_scale)).unwrap(),
                    T::from_f64(fi * exp2i(ei + self.log2_scale)).unwrap(),
                )
            })
            .collect();
        Poly::new(coeffs)
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[GaussInt] {
        &self.coeffs
    }

    pub fn add(&self, o: &ExactPoly) -> ExactPoly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let scale = self.log2_scale.min(o.log2_scale);
        let sa = (self.log2_scale - scale) as u64;
        let sb = (o.log2_scale - scale) as u64;
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.coeffs.get(k).map_or_else(GaussInt::zero, |g| g.shl(sa));
            let b = o.coeffs.get(k).map_or_else(GaussInt::zero, |g| g.shl(sb));
            out.push(a.add(&b));
        }
        ExactPoly::new(out, scale)
    }

    pub fn neg(&self) -> ExactPoly {
        ExactPoly {
            coeffs: self.coeffs.iter().map(GaussInt::neg).collect(),
            log2_scale: self.log2_scale,
        }
    }

    pub fn mul(&self, o: &ExactPoly) -> ExactPoly {
        if self.is_zero() || o.is_zero() {
            return ExactPoly::zero();
        }
        let mut out = vec![GaussInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        ExactPoly::new(out, self.log2_scale + o.log2_scale)
    }

    /// self * z^k
    pub fn mul_shift(&self, k: usize) -> ExactPoly {
        if self.is_zero() {
            return ExactPoly::zero();
        }
        let mut coeffs = vec![GaussInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        ExactPoly::new(coeffs, self.log2_scale)
    }

    /// Strips exact zeros at the origin; returns the deflated polynomial and
    /// the multiplicity removed.
    pub fn deflate_origin(&self) -> (ExactPoly, usize) {
        let k = self
            .coeffs
            .iter()
            .take_while(|g| g.is_zero())
            .count()
            .min(self.coeffs.len());
        (
            ExactPoly {
                coeffs: self.coeffs[k..].to_vec(),
                log2_scale: self.log2_scale,
            },
            k,
        )
    }

    /// log2 of the largest coefficient magnitude (scale included).
    pub fn log2_max_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .filter_map(GaussInt::log2_norm)
            .fold(f64::NEG_INFINITY, f64::max)
            + self.log2_scale as f64
    }

    /// Per-coefficient log2 magnitudes (scale included), None for exact zeros.
    pub fn coeff_log2(&self) -> Vec<Option<f64>> {
        self.coeffs
            .iter()
            .map(|g| g.log2_norm().map(|l| l + self.log2_scale as f64))
            .collect()
    }

    /// Exact Horner evaluation of p and p' at a floating point z, returning
    /// the once-rounded Newton ratio p/p' and exact value magnitudes.
    ///
    /// With z = Z 2^-s (Z a Gaussian integer) the scaled accumulators
    /// B_k = B_{k+1} Z + c_k 2^{(d-k)s} and E_k = E_{k+1} Z + B_{k+1} 2^s are
    /// integers with p(z) = B_0 2^{-ds}, p'(z) = E_0 2^{-ds}; the ratio is
    /// B_0/E_0 with no scale left over.
    pub fn newton_eval<T: Real>(&self, z: Complex<T>) -> NewtonEval<T> {
        let d = self.coeffs.len() - 1;
        let (zre_m, zre_e) = decode(z.re);
        let (zim_m, zim_e) = decode(z.im);
        let mut e = 0i64;
        if zre_m != 0 {
            e = e.min(zre_e);
        }
        if zim_m != 0 {
            e = e.min(zim_e);
        }
        let s = (-e) as u64; // e <= 0 so z = Z 2^{-s}
        let zg = GaussInt {
            re: BigInt::from(zre_m) << (zre_e - e).max(0) as u64,
            im: BigInt::from(zim_m) << (zim_e - e).max(0) as u64,
        };

        let mut b = self.coeffs[d].clone();
        let mut ee = GaussInt::zero();
        for k in (0..d).rev() {
            ee = ee.mul(&zg).add(&b.shl(s));
            b = b.mul(&zg).add(&self.coeffs[k].shl(((d - k) as u64) * s));
        }

        let log2_adjust = self.log2_scale as f64 - (d as u64 * s) as f64;
        let log2_p = b.log2_norm().map(|l| l + log2_adjust);
        let log2_dp = ee.log2_norm().map(|l| l + log2_adjust);

        let ratio = if ee.is_zero() {
            None
        } else {
            // b / ee = b * conj(ee) / |ee|^2
            let den = &ee.re * &ee.re + &ee.im * &ee.im;
            let num_re = &b.re * &ee.re + &b.im * &ee.im;
            let num_im = &b.im * &ee.re - &b.re * &ee.im;
            Some(Complex::new(
                T::from_f64(round_ratio(&num_re, &den)).unwrap(),
                T::from_f64(round_ratio(&num_im, &den)).unwrap(),
            ))
        };
        NewtonEval {
            ratio,
            log2_p,
            log2_dp,
        }
    }
}

/// Exact float decode: x = m * 2^e with m a signed 64-bit integer.
fn decode<T: Real>(x: T) -> (i64, i64) {
    if x == T::zero() {
        return (0, 0);
    }
    let (mant, exp, sign) = x.integer_decode();
    (sign as i64 * mant as i64, exp as i64)
}

/// 2^m L_m as an integer polynomial, descending through the three-term
/// recurrence (m+1) Lt_{m+1} = 2(2m+1) z Lt_m - 4m Lt_{m-1}; every division
/// is exact.
pub fn exact_legendre(m: usize) -> ExactPoly {
    let mut prev: Vec<BigInt> = vec![BigInt::from(1)]; // 2^0 L_0
    if m == 0 {
        return from_bigint_coeffs(prev, 0);
    }
    let mut cur: Vec<BigInt> = vec![BigInt::zero(), BigInt::from(2)]; // 2^1 L_1
    for k in 1..m {
        let mut next = vec![BigInt::zero(); k + 2];
        for (idx, c) in cur.iter().enumerate() {
            next[idx + 1] = c * BigInt::from(2 * (2 * k as i64 + 1));
        }
        for (idx, c) in prev.iter().enumerate() {
            next[idx] = &next[idx] - c * BigInt::from(4 * k as i64);
        }
        let div = BigInt::from(k as i64 + 1);
        for c in next.iter_mut() {
            debug_assert!((&*c % &div).is_zero());
            *c = &*c / &div;
        }
        prev = cur;
        cur = next;
    }
    from_bigint_coeffs(cur, -(m as i64))
}

fn from_bigint_coeffs(v: Vec<BigInt>, log2_scale: i64) -> ExactPoly {
    ExactPoly::new(
        v.into_iter()
            .map(|re| GaussInt {
                re,
                im: BigInt::zero(),
            })
            .collect(),
        log2_scale,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn roundtrip_is_exact_for_floats() {
        let p = Poly::<f64>::from_real(&[0.1, -3.25, 1e-12, 7.0]);
        let x = ExactPoly::from_poly(&p);
        assert_eq!(x.to_poly::<f64>(), p);
    }

    #[test]
    fn newton_ratio_matches_direct_horner() {
        let p = Poly::<f64>::from_real(&[6.0, -6.0, 1.0]);
        let x = ExactPoly::from_poly(&p);
        let z = Complex64::new(0.75, -1.5);
        let ev = x.newton_eval(z);
        let direct = p.eval(z) / p.derivative(1).eval(z);
        assert!((ev.ratio.unwrap() - direct).norm() < 1e-15 * direct.norm());
    }

    #[test]
    fn newton_ratio_handles_huge_points_without_overflow() {
        // degree 6 at |z| ~ 1e80: values overflow f64 but the ratio is modest
        let p = Poly::<f64>::from_real(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let x = ExactPoly::from_poly(&p);
        let z = Complex64::new(1e80, 3e79);
        let ev = x.newton_eval(z);
        let r = ev.ratio.unwrap();
        // p/p' ~ z/6 out there
        assert!((r - z / 6.0).norm() < 1e-10 * z.norm());
        assert!(ev.log2_p.unwrap() > 1500.0);
    }

    #[test]
    fn exact_zero_value_detected() {
        // p = z^2 - 6z + 8 has an exactly representable root at 2
        let p = Poly::<f64>::from_real(&[8.0, -6.0, 1.0]);
        let x = ExactPoly::from_poly(&p);
        let ev = x.newton_eval(Complex64::new(2.0, 0.0));
        assert!(ev.log2_p.is_none());
        assert_eq!(ev.ratio.unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn derivative_zero_reported() {
        let p = Poly::<f64>::from_real(&[5.0, 0.0, 1.0]); // p' = 2z, zero at 0
        let x = ExactPoly::from_poly(&p);
        let ev = x.newton_eval(Complex64::new(0.0, 0.0));
        assert!(ev.ratio.is_none());
        assert!(ev.log2_dp.is_none());
    }

    #[test]
    fn legendre_small_cases() {
        // 2^2 L_2 = 6z^2 - 2, 2^3 L_3 = 20 z^3 - 12 z
        let l2 = exact_legendre(2).to_poly::<f64>();
        assert_eq!(l2, Poly::from_real(&[-0.5, 0.0, 1.5]));
        let l3 = exact_legendre(3).to_poly::<f64>();
        assert_eq!(l3, Poly::from_real(&[0.0, -1.5, 0.0, 2.5]));
    }

    #[test]
    fn table_style_arithmetic() {
        let a = ExactPoly::from_int_coeffs(&[1, 2]);
        let b = ExactPoly::from_int_coeffs(&[-1, 1]);
        let prod = a.mul(&b).to_poly::<f64>();
        assert_eq!(prod, Poly::from_real(&[-1.0, -1.0, 2.0]));
        let sum = a.add(&b.neg()).to_poly::<f64>();
        assert_eq!(sum, Poly::from_real(&[2.0, 1.0]));
        let (defl, k) = ExactPoly::from_int_coeffs(&[0, 0, 3, 1]).deflate_origin();
        assert_eq!(k, 2);
        assert_eq!(defl.to_poly::<f64>(), Poly::from_real(&[3.0, 1.0]));
    }
}
