//! Closed-form antiderivatives used by the equal-exponent MGF expressions.
//!
//! All three are generic over [`Scalar`], so the same code runs on real and
//! complex arguments and on jets carrying derivatives in `s`.

use super::jet::Scalar;
use crate::error::{Error, Result};

fn radical<S: Scalar>(lin: S, c: S) -> S {
    let arg = lin * lin + c;
    if arg.is_exact_zero() {
        return arg;
    }
    arg.sqrt()
}

/// `lin + sqrt(lin^2 + c)`, rearranged when `lin` has a negative real part
/// so the two terms never cancel.
fn stable_sum<S: Scalar>(lin: S, q: S, c: S) -> S {
    if lin.re_lead() < 0.0 {
        c / (q - lin)
    } else {
        lin + q
    }
}

/// `beta_1(x; a, b, c) = a x + b + sqrt((a x + b)^2 + c x)`.
pub fn beta1<S: Scalar>(x: f64, a: S, b: S, c: S) -> S {
    let lin = a.scale(x) + b;
    let cx = c.scale(x);
    let q = radical(lin, cx);
    stable_sum(lin, q, cx)
}

/// `beta_2(x; a, b, c) = sqrt((a x + b)^2 + c) - b ln(a x + b + sqrt((a x + b)^2 + c))`.
///
/// The logarithmic term is dropped when `b` is identically zero.
pub fn beta2<S: Scalar>(x: f64, a: S, b: S, c: S) -> S {
    let lin = a.scale(x) + b;
    let q = radical(lin, c);
    if b.is_exact_zero() {
        return q;
    }
    q - b * stable_sum(lin, q, c).ln()
}

/// Antiderivative `Psi_1(x; a, b, c)` with `d Psi_1 / dx = x ln beta_1(x; a, b, c)`.
///
/// `x^2 ln beta_1` is taken as zero at `x = 0`, and the final logarithm is
/// skipped when its coefficient vanishes identically (`b = c = 0`).
pub fn psi1<S: Scalar>(x: f64, a: S, b: S, c: S) -> Result<S> {
    if a.abs_lead() == 0.0 {
        return Err(Error::Domain {
            function: "psi1",
            detail: "a = 0".into(),
        });
    }
    let lin = a.scale(x) + b;
    let cx = c.scale(x);
    let q = radical(lin, cx);
    let a2 = a * a;
    let mut out = S::from_f64(-x * x / 8.0);
    out = out + ((a * b).scale(10.0) + c.scale(3.0) - a2.scale(2.0 * x)) * q / (a2 * a).scale(16.0);
    if x != 0.0 {
        out = out + stable_sum(lin, q, cx).ln().scale(x * x / 2.0);
    }
    let coef = (a2 * b * b).scale(16.0) + (a * b * c).scale(16.0) + (c * c).scale(3.0);
    if !coef.is_exact_zero() {
        let arg = c + a2.scale(2.0 * x) + (a * (b + q)).scale(2.0);
        out = out - coef * arg.ln() / (a2 * a2).scale(32.0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::jet::Jet;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn fd<F: Fn(f64) -> Complex64>(f: F, x: f64) -> Complex64 {
        let h = 1e-4 * x.max(1.0);
        (f(x - 2.0 * h) - f(x + 2.0 * h) + (f(x + h) - f(x - h)).scale(8.0)) / (12.0 * h)
    }

    #[test]
    fn beta1_literal_values() {
        let v = beta1(2.0, 1.0, 1.0, 4.0);
        assert!((v - (3.0 + 17f64.sqrt())).abs() < 1e-14);
        // Negative linear part goes through the rearranged branch.
        let v = beta1(1.0, 1.0, -100.0, 3.0);
        let lit = -99.0 + (99.0f64 * 99.0 + 3.0).sqrt();
        assert!((v - lit).abs() < 1e-12 * lit);
    }

    #[test]
    fn beta2_derivative_is_the_cue_integrand() {
        // d/dx beta_2 = a (a x) / sqrt((a x + b)^2 + c)
        let (a, b, c) = (Complex64::new(1.3, -0.4), Complex64::new(-2.0, 0.5), Complex64::new(0.7, -1.1));
        for &x in &[0.3, 1.7, 4.0] {
            let d = fd(|t| beta2(t, a, b, c), x);
            let lin = a * x + b;
            let e = a * a * x / (lin * lin + c).sqrt();
            assert!((d - e).norm() < 1e-8 * e.norm(), "x = {x}");
        }
    }

    #[test]
    fn psi1_difference_matches_quadrature() {
        use crate::specfun::quad::{integrate, QuadratureSettings};
        let (a, b, c) = (1.0, 1.0, 0.0);
        let q = integrate(|x: f64| x * beta1(x, a, b, c).ln(), 0.0, 1.0, &QuadratureSettings::default()).unwrap();
        let d = psi1(1.0, a, b, c).unwrap() - psi1(0.0, a, b, c).unwrap();
        assert!((d - q.value).abs() < 1e-12);
    }

    #[test]
    fn psi1_rejects_zero_a() {
        assert!(psi1(1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn psi1_at_origin_with_vanishing_coefficient() {
        let v = psi1(0.0, 2.0, 0.0, 0.0).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn jets_agree_with_finite_differences() {
        // d/da psi1(x; a, b, c) through a jet in a.
        let (x, b, c) = (2.5, 1.2, 0.8);
        let a = Jet::variable(0.9, 1.0, 1);
        let j = psi1(x, a, Jet::constant(b), Jet::constant(c)).unwrap();
        let h = 1e-5;
        let f = |aa: f64| psi1(x, aa, b, c).unwrap();
        let d = (f(0.9 + h) - f(0.9 - h)) / (2.0 * h);
        assert!((j.coeffs()[1] - d).abs() < 1e-7 * d.abs().max(1.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn psi1_differentiates_to_integrand(
            x in 0.5f64..40.0,
            ar in -3.0f64..3.0, ai in -3.0f64..3.0,
            br in -50.0f64..50.0, bi in -5.0f64..5.0,
            cr in -20.0f64..20.0, ci in -20.0f64..20.0,
        ) {
            prop_assume!(ar.abs() + ai.abs() > 0.2);
            let a = Complex64::new(ar, ai);
            let b = Complex64::new(br, bi);
            let c = Complex64::new(cr, ci);
            let d = fd(|t| psi1(t, a, b, c).unwrap(), x);
            let e = beta1(x, a, b, c).ln() * x;
            prop_assert!((d - e).norm() < 1e-6 * e.norm(), "d {:?}, e {:?}", d, e);
        }
    }
}
