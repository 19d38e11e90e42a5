//! Gauss hypergeometric function on the real half-line `x <= 1`.

use super::gamma::{gamma, pochhammer, rgamma};
use super::quad::{integrate, QuadratureSettings};
use crate::error::{Error, Result};

const SERIES_TERMS: usize = 200_000;
const NEAR_INTEGER: f64 = 1e-3;

/// `2F1(a, b; c; x)` for real parameters and `x <= 1`.
///
/// Negative arguments are mapped into `[0, 1/2]` by the Pfaff transform
/// (`-1 <= x < 0`) or the `1/x` connection formula (`x < -1`). When `b - a`
/// is (nearly) an integer the connection formula degenerates and the Euler
/// integral is used instead.
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    let dom = |detail: String| Error::Domain { function: "hyp2f1", detail };
    if ![a, b, c, x].iter().all(|v| v.is_finite()) {
        return Err(dom(format!("non-finite input ({a}, {b}, {c}, {x})")));
    }
    if c <= 0.0 && c == c.floor() {
        return Err(dom(format!("c = {c} is a non-positive integer")));
    }
    if x > 1.0 {
        return Err(dom(format!("x = {x} > 1")));
    }
    if x == 0.0 || a == 0.0 || b == 0.0 {
        return Ok(1.0);
    }
    if x == 1.0 {
        if c - a - b > 0.0 {
            return Ok(gamma(c) * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b));
        }
        return Err(dom(format!("divergent at x = 1 with c - a - b = {}", c - a - b)));
    }
    if x > 0.0 {
        return series(a, b, c, x);
    }
    if x >= -1.0 {
        return pfaff(a, b, c, x);
    }
    let gap = b - a;
    if (gap - gap.round()).abs() < NEAR_INTEGER {
        if c > b && b > 0.0 {
            return euler_integral(a, b, c, x);
        }
        if c > a && a > 0.0 {
            return euler_integral(b, a, c, x);
        }
        return pfaff(a, b, c, x);
    }
    let z = 1.0 / x;
    let mx = -x;
    let t1 = gamma(c) * gamma(b - a) * rgamma(b) * rgamma(c - a) * mx.powf(-a) * pfaff(a, a - c + 1.0, a - b + 1.0, z)?;
    let t2 = gamma(c) * gamma(a - b) * rgamma(a) * rgamma(c - b) * mx.powf(-b) * pfaff(b, b - c + 1.0, b - a + 1.0, z)?;
    Ok(t1 + t2)
}

/// Taylor coefficients `f^(k)(x) / k!` of `2F1(a, b; c; .)` at `x`, for
/// `k < n`.
pub fn hyp2f1_taylor(a: f64, b: f64, c: f64, x: f64, n: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    let mut fact = 1.0;
    for k in 0..n {
        if k > 0 {
            fact *= k as f64;
        }
        let kf = k as f64;
        let scale = pochhammer(a, k) * pochhammer(b, k) / (pochhammer(c, k) * fact);
        let v = if scale == 0.0 { 0.0 } else { scale * hyp2f1(a + kf, b + kf, c + kf, x)? };
        out.push(v);
    }
    Ok(out)
}

fn pfaff(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(1.0);
    }
    let w = x / (x - 1.0);
    Ok((1.0 - x).powf(-a) * series(a, c - b, c, w)?)
}

fn series(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut quiet = 0;
    for n in 0..SERIES_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * x;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if term.abs() <= 1e-17 * sum.abs() {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence { estimate: sum, error: term.abs() })
}

/// `Gamma(c) / (Gamma(b) Gamma(c-b)) int_0^1 t^(b-1) (1-t)^(c-b-1) (1-xt)^(-a) dt`
/// with `t = u^(1/b)` to absorb the `t^(b-1)` factor. Requires `c > b > 0`.
fn euler_integral(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    let set = QuadratureSettings { rel_tol: 1e-13, abs_tol: 0.0, max_subdivisions: 4000 };
    let e = c - b - 1.0;
    let r = integrate(
        |u: f64| {
            let t = u.powf(1.0 / b);
            (1.0 - t).powf(e) * (1.0 - x * t).powf(-a)
        },
        0.0,
        1.0,
        &set,
    )?;
    Ok(gamma(c) * rgamma(b) * rgamma(c - b) * r.value / b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn arctangent_identities() {
        assert!(rel(hyp2f1(1.0, 0.5, 1.5, -1.0).unwrap(), PI / 4.0) < 1e-13);
        assert!(rel(hyp2f1(1.0, 0.5, 1.5, -4.0).unwrap(), 2f64.atan() / 2.0) < 1e-13);
        assert!(rel(hyp2f1(1.0, 0.5, 1.5, -1e6).unwrap(), 1e3f64.atan() / 1e3) < 1e-12);
    }

    #[test]
    fn logarithm_identity_is_degenerate_case() {
        // 2F1(1, 1; 2; x) = -ln(1 - x) / x with b - a = 0.
        for &x in &[-0.5, -3.0, -250.0, -1e9] {
            let v = hyp2f1(1.0, 1.0, 2.0, x).unwrap();
            let e = -(1.0 - x).ln() / x;
            assert!(rel(v, e) < 1e-11, "x = {x}: {v} vs {e}");
        }
    }

    #[test]
    fn value_at_zero_and_one() {
        assert_eq!(hyp2f1(0.3, 0.7, 1.9, 0.0).unwrap(), 1.0);
        let g = hyp2f1(0.3, 0.7, 1.9, 1.0).unwrap();
        let e = gamma(1.9) * gamma(0.9) / (gamma(1.6) * gamma(1.2));
        assert!(rel(g, e) < 1e-13);
        assert!(hyp2f1(1.0, 1.0, 1.5, 1.0).is_err());
        assert!(hyp2f1(1.0, 1.0, -2.0, 0.5).is_err());
        assert!(hyp2f1(1.0, 1.0, 2.0, 1.5).is_err());
    }

    #[test]
    fn power_identity() {
        // 2F1(a, b; b; x) = (1 - x)^(-a)
        for &x in &[0.4, -0.7, -20.0] {
            let v = hyp2f1(0.35, 1.7, 1.7, x).unwrap();
            assert!(rel(v, (1.0 - x).powf(-0.35)) < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn mgf_parameter_family_matches_euler_integral() {
        for &ac in &[2.5, 3.0, 3.5, 4.0, 5.0] {
            let b = 2.0 / ac;
            for &x in &[-1.5, -40.0, -3e4, -1e8] {
                let v = hyp2f1(1.0, b, 1.0 + b, x).unwrap();
                let e = euler_integral(1.0, b, 1.0 + b, x).unwrap();
                assert!(rel(v, e) < 1e-10, "alpha {ac} x {x}: {v} vs {e}");
            }
        }
    }

    #[test]
    fn taylor_coefficients_match_finite_differences() {
        let (a, b, c, x) = (1.0, -0.5, 0.5, -12.0);
        let t = hyp2f1_taylor(a, b, c, x, 3).unwrap();
        let h = 1e-3;
        let f = |z: f64| hyp2f1(a, b, c, z).unwrap();
        let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
        let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        assert!(rel(t[1], d1) < 1e-6);
        assert!(rel(t[2], d2 / 2.0) < 1e-4);
    }
}
