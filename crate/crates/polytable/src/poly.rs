//! Dense univariate polynomials with complex coefficients, ascending powers.

use num_complex::Complex;

use crate::combin::{binomial, falling_factorial};
use crate::error::{Error, Result};
use crate::scalar::{cast, Real};

/// Relative threshold under which a trailing coefficient is considered zero.
const TRIM_REL: f64 = 1e-14;

/// Dense polynomial in one variable. The k-th element of `coeffs` is the
/// coefficient of z^k. The zero polynomial is the empty vector; otherwise the
/// last coefficient is nonzero after normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T: Real> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> Poly<T> {
    /// Builds a polynomial from ascending coefficients and normalizes:
    /// trailing coefficients with |c| <= 1e-14 * max|coeffs| are trimmed.
    pub fn new(coeffs: Vec<Complex<T>>) -> Self {
        let mut p = Poly { coeffs };
        p.normalize();
        p
    }

    pub fn from_real(coeffs: &[T]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, T::zero())).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex::new(T::one(), T::zero()))
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::new(vec![c])
    }

    /// c * z^k
    pub fn monomial(c: Complex<T>, k: usize) -> Self {
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// The identity polynomial z.
    pub fn var() -> Self {
        Self::monomial(Complex::new(T::one(), T::zero()), 1)
    }

    fn normalize(&mut self) {
        let max = self.max_coeff_norm();
        if max == T::zero() {
            self.coeffs.clear();
            return;
        }
        let tol = cast::<T>(TRIM_REL) * max;
        while let Some(last) = self.coeffs.last() {
            if last.norm() <= tol {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial (the -infinity sentinel).
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Coefficient of z^k, zero beyond the stored length.
    pub fn coeff(&self, k: usize) -> Complex<T> {
        self.coeffs
            .get(k)
            .copied()
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn max_coeff_norm(&self) -> T {
        self.coeffs
            .iter()
            .map(|c| c.norm())
            .fold(T::zero(), T::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Formal derivative of the given order. Over-differentiation yields the
    /// zero polynomial.
    pub fn derivative(&self, order: usize) -> Self {
        let mut cur = self.coeffs.clone();
        for _ in 0..order {
            if cur.len() <= 1 {
                cur.clear();
                break;
            }
            cur = cur
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * Complex::new(T::from_usize(k).unwrap(), T::zero()))
                .collect();
        }
        Self::new(cur)
    }

    /// self^k by repeated multiplication.
    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Synthetic division by (z - c): returns (quotient, remainder) with
    /// self = (z - c) * quotient + remainder.
    pub fn synthetic_div(&self, c: Complex<T>) -> (Self, Complex<T>) {
        if self.coeffs.is_empty() {
            return (Self::zero(), Complex::new(T::zero(), T::zero()));
        }
        let n = self.coeffs.len();
        let mut q = vec![Complex::new(T::zero(), T::zero()); n - 1];
        let mut carry = self.coeffs[n - 1];
        for k in (0..n - 1).rev() {
            q[k] = carry;
            carry = self.coeffs[k] + carry * c;
        }
        (Self::new(q), carry)
    }
}

impl<T: Real> std::ops::Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        Poly::new(coeffs)
    }
}

impl<T: Real> std::ops::Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect();
        Poly::new(coeffs)
    }
}

impl<T: Real> std::ops::Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl<T: Real> std::ops::Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out =
            vec![Complex::new(T::zero(), T::zero()); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        Poly::new(out)
    }
}

/// Right-hand side of the shifted-derivative operator identity
///
///   z^m D^n(f) = sum_{i=0}^{m} C(m,i) (-1)^i D^{n-i}(z^{m-i} f) (n)_i
///
/// evaluated as a polynomial. Requires n >= m so every derivative order is
/// nonnegative.
pub fn shifted_derivative_expansion<T: Real>(f: &Poly<T>, m: usize, n: usize) -> Result<Poly<T>> {
    if n < m {
        return Err(Error::ShiftExceedsOrder { m, n });
    }
    let mut acc = Poly::zero();
    for i in 0..=m {
        let coef = binomial(m as u64, i as u64)? * falling_factorial(n as u64, i as u64)?;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let scalar = Complex::new(cast::<T>(sign * coef as f64), T::zero());
        let shifted = &Poly::monomial(Complex::new(T::one(), T::zero()), m - i) * f;
        let term = shifted.derivative(n - i).scale(scalar);
        acc = &acc + &term;
    }
    Ok(acc)
}
