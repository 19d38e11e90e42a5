//! Truncated Taylor arithmetic.
//!
//! A [`Jet`] carries the first few Taylor coefficients of a quantity with
//! respect to one scaled variable `eps`. Every operation propagates them
//! exactly, so derivatives of arbitrary compositions come out without
//! finite differences.

use num_complex::Complex64;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Highest derivative order carried by a [`Jet`].
pub const MAX_ORDER: usize = 4;
const LEN: usize = MAX_ORDER + 1;

/// Field operations shared by `f64`, `Complex64` and jets over either.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn scale(self, k: f64) -> Self;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;
    fn powf(self, p: f64) -> Self;
    /// Real part of the leading value, used for branch selection.
    fn re_lead(self) -> f64;
    /// Magnitude of the leading value.
    fn abs_lead(self) -> f64;
    /// True when every component is exactly zero.
    fn is_exact_zero(self) -> bool;
    /// Largest component magnitude; the norm used by adaptive quadrature.
    fn magnitude(self) -> f64;

    fn recip(self) -> Self {
        Self::from_f64(1.0) / self
    }
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn re_lead(self) -> f64 {
        self
    }
    fn abs_lead(self) -> f64 {
        self.abs()
    }
    fn is_exact_zero(self) -> bool {
        self == 0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn ln(self) -> Self {
        Complex64::ln(self)
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    fn powf(self, p: f64) -> Self {
        Complex64::powf(self, p)
    }
    fn re_lead(self) -> f64 {
        self.re
    }
    fn abs_lead(self) -> f64 {
        self.norm()
    }
    fn is_exact_zero(self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn magnitude(self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
}

/// Truncated power series `c[0] + c[1] eps + ... + c[n-1] eps^(n-1)`.
///
/// Only the first `n` coefficients are live; constants use `n == 1` so
/// mixing them with variables costs nothing extra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T> {
    c: [T; LEN],
    n: usize,
}

impl<T: Scalar> Jet<T> {
    pub fn constant(v: T) -> Self {
        let mut c = [T::from_f64(0.0); LEN];
        c[0] = v;
        Jet { c, n: 1 }
    }

    /// The affine jet `v + slope * eps` carrying `order + 1` coefficients.
    pub fn variable(v: T, slope: T, order: usize) -> Self {
        assert!(order <= MAX_ORDER);
        let mut c = [T::from_f64(0.0); LEN];
        c[0] = v;
        if order >= 1 {
            c[1] = slope;
        }
        Jet { c, n: order + 1 }
    }

    pub fn from_coeffs(coeffs: &[T]) -> Self {
        assert!(!coeffs.is_empty() && coeffs.len() <= LEN);
        let mut c = [T::from_f64(0.0); LEN];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Jet { c, n: coeffs.len() }
    }

    pub fn value(&self) -> T {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.c[..self.n]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Jet<U> {
        let mut c = [U::from_f64(0.0); LEN];
        for k in 0..self.n {
            c[k] = f(self.c[k]);
        }
        Jet { c, n: self.n }
    }

    /// Compose with an outer function given its Taylor coefficients
    /// `outer[k] = f^(k)(self.value()) / k!`.
    pub fn compose(&self, outer: &[T]) -> Self {
        let n = self.n;
        assert!(outer.len() >= n);
        let mut delta = *self;
        delta.c[0] = T::from_f64(0.0);
        let mut acc = Jet::constant(outer[n - 1]);
        acc.n = n;
        for k in (0..n - 1).rev() {
            acc = acc * delta;
            acc.c[0] = acc.c[0] + outer[k];
        }
        acc
    }

    fn zero_like(n: usize) -> Self {
        Jet { c: [T::from_f64(0.0); LEN], n }
    }
}

impl Jet<f64> {
    pub fn to_complex(&self) -> Jet<Complex64> {
        self.map(Complex64::from)
    }
}

impl Jet<Complex64> {
    pub fn re(&self) -> Jet<f64> {
        self.map(|z| z.re)
    }

    pub fn im(&self) -> Jet<f64> {
        self.map(|z| z.im)
    }

    /// Multiply by the imaginary unit.
    pub fn mul_i(&self) -> Self {
        self.map(|z| Complex64::new(-z.im, z.re))
    }
}

impl<T: Scalar> Add for Jet<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let n = self.n.max(o.n);
        let mut r = Self::zero_like(n);
        for k in 0..n {
            r.c[k] = self.c[k] + o.c[k];
        }
        r
    }
}

impl<T: Scalar> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let n = self.n.max(o.n);
        let mut r = Self::zero_like(n);
        for k in 0..n {
            r.c[k] = self.c[k] - o.c[k];
        }
        r
    }
}

impl<T: Scalar> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut r = self;
        for k in 0..self.n {
            r.c[k] = -self.c[k];
        }
        r
    }
}

impl<T: Scalar> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let n = self.n.max(o.n);
        let mut r = Self::zero_like(n);
        for k in 0..n {
            let mut acc = T::from_f64(0.0);
            for j in 0..=k {
                acc = acc + self.c[j] * o.c[k - j];
            }
            r.c[k] = acc;
        }
        r
    }
}

impl<T: Scalar> Div for Jet<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let n = self.n.max(o.n);
        let mut r = Self::zero_like(n);
        let b0 = o.c[0];
        for k in 0..n {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc = acc - o.c[j] * r.c[k - j];
            }
            r.c[k] = acc / b0;
        }
        r
    }
}

impl<T: Scalar> AddAssign for Jet<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> SubAssign for Jet<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Scalar> Scalar for Jet<T> {
    fn from_f64(x: f64) -> Self {
        Jet::constant(T::from_f64(x))
    }

    fn scale(self, k: f64) -> Self {
        let mut r = self;
        for j in 0..self.n {
            r.c[j] = self.c[j].scale(k);
        }
        r
    }

    fn ln(self) -> Self {
        let a = &self.c;
        let mut r = Self::zero_like(self.n);
        r.c[0] = a[0].ln();
        for k in 1..self.n {
            let mut acc = a[k];
            for j in 1..k {
                acc = acc - (r.c[j] * a[k - j]).scale(j as f64 / k as f64);
            }
            r.c[k] = acc / a[0];
        }
        r
    }

    fn exp(self) -> Self {
        let a = &self.c;
        let mut r = Self::zero_like(self.n);
        r.c[0] = a[0].exp();
        for k in 1..self.n {
            let mut acc = T::from_f64(0.0);
            for j in 1..=k {
                acc = acc + (a[j] * r.c[k - j]).scale(j as f64 / k as f64);
            }
            r.c[k] = acc;
        }
        r
    }

    fn sqrt(self) -> Self {
        self.pow_with_lead(0.5, self.c[0].sqrt())
    }

    fn powf(self, p: f64) -> Self {
        self.pow_with_lead(p, self.c[0].powf(p))
    }

    fn re_lead(self) -> f64 {
        self.c[0].re_lead()
    }

    fn abs_lead(self) -> f64 {
        self.c[0].abs_lead()
    }

    fn is_exact_zero(self) -> bool {
        self.c[..self.n].iter().all(|v| v.is_exact_zero())
    }

    fn magnitude(self) -> f64 {
        self.c[..self.n].iter().fold(0.0, |m, v| m.max(v.magnitude()))
    }
}

impl<T: Scalar> Jet<T> {
    fn pow_with_lead(self, p: f64, lead: T) -> Self {
        let a = &self.c;
        let mut r = Self::zero_like(self.n);
        r.c[0] = lead;
        for k in 1..self.n {
            let mut acc = T::from_f64(0.0);
            for j in 1..=k {
                let w = p * j as f64 - (k - j) as f64;
                acc = acc + (a[j] * r.c[k - j]).scale(w);
            }
            r.c[k] = acc / a[0].scale(k as f64);
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn exp_ln_roundtrip() {
        let x = Jet::variable(0.7, 1.0, 4);
        let y = x.exp().ln();
        for (u, v) in y.coeffs().iter().zip(x.coeffs()) {
            assert!(close(*u, *v, 1e-14));
        }
    }

    #[test]
    fn exp_coefficients() {
        let e = Jet::variable(0.0, 1.0, 4).exp();
        let expect = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        for (u, v) in e.coeffs().iter().zip(expect) {
            assert!(close(*u, v, 1e-15));
        }
    }

    #[test]
    fn pow_matches_binomial_series() {
        // (1 + eps)^p = sum binom(p, k) eps^k
        let p = -2.0 / 3.0;
        let y = Jet::variable(1.0, 1.0, 4).powf(p);
        let mut b = 1.0;
        for k in 0..5 {
            assert!(close(y.coeffs()[k], b, 1e-14));
            b *= (p - k as f64) / (k as f64 + 1.0);
        }
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = Jet::from_coeffs(&[2.0, -1.0, 0.5, 3.0, 0.25]);
        let b = Jet::from_coeffs(&[1.5, 0.3, -0.2, 0.1, 0.7]);
        let back = (a * b) / b;
        for (u, v) in back.coeffs().iter().zip(a.coeffs()) {
            assert!(close(*u, *v, 1e-14));
        }
    }

    #[test]
    fn complex_sqrt_squares_back() {
        let z = Jet::from_coeffs(&[
            Complex64::new(-1.0, -0.3),
            Complex64::new(0.2, 0.1),
            Complex64::new(0.0, 1.0),
        ]);
        let r = z.sqrt();
        let back = r * r;
        for (u, v) in back.coeffs().iter().zip(z.coeffs()) {
            assert!((u - v).norm() < 1e-14);
        }
        assert!(r.value().re > 0.0);
    }

    #[test]
    fn compose_with_exp_series() {
        let x = Jet::from_coeffs(&[0.3, 0.5, -0.1, 0.2, 0.05]);
        let e0 = 0.3f64.exp();
        let outer = [e0, e0, e0 / 2.0, e0 / 6.0, e0 / 24.0];
        let a = x.compose(&outer);
        let b = x.exp();
        for (u, v) in a.coeffs().iter().zip(b.coeffs()) {
            assert!(close(*u, *v, 1e-14));
        }
    }

    #[test]
    fn constants_do_not_truncate_variables() {
        let x = Jet::variable(2.0, 1.0, 3);
        let y = Jet::constant(3.0) * x + Jet::constant(1.0);
        assert_eq!(y.len(), 4);
        assert_eq!(y.coeffs(), &[7.0, 3.0, 0.0, 0.0]);
    }
}
