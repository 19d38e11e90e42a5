//! Gamma-type special functions.

use crate::error::{Error, Result};

pub use statrs::function::gamma::{gamma, ln_gamma};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `1 / Gamma(x)`, exactly zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// Pochhammer symbol `(a)_k = a (a+1) ... (a+k-1)`.
pub fn pochhammer(a: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |p, j| p * (a + j as f64))
}

/// Upper incomplete gamma `Gamma(a, x) = int_x^inf t^(a-1) e^(-t) dt` for
/// any real `a` and `x > 0` (also `x = 0` when `a > 0`).
pub fn upper_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    if !(a.is_finite() && x.is_finite()) || x < 0.0 {
        return Err(Error::Domain {
            function: "upper_incomplete_gamma",
            detail: format!("a = {a}, x = {x}"),
        });
    }
    if x == 0.0 {
        if a > 0.0 {
            return Ok(gamma(a));
        }
        return Err(Error::Domain {
            function: "upper_incomplete_gamma",
            detail: format!("Gamma({a}, 0) diverges"),
        });
    }
    if a > 0.0 {
        return Ok(statrs::function::gamma::gamma_ui(a, x));
    }
    if x >= 1.0 {
        return continued_fraction(a, x);
    }
    // Climb to a in (0, 1] (or exactly 0) and recur back down.
    let steps = (-a).floor() as usize + if a == a.floor() { 0 } else { 1 };
    let top = a + steps as f64;
    let mut g = if top == 0.0 {
        exp_integral_e1(x)
    } else {
        statrs::function::gamma::gamma_ui(top, x)
    };
    let ex = (-x).exp();
    for k in (0..steps).rev() {
        let ak = a + k as f64;
        g = (g - x.powf(ak) * ex) / ak;
    }
    Ok(g)
}

/// Modified Lentz evaluation of the Legendre continued fraction.
fn continued_fraction(a: f64, x: f64) -> Result<f64> {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return Ok((-x + a * x.ln()).exp() * h);
        }
    }
    Err(Error::NonConvergence { estimate: (-x + a * x.ln()).exp() * h, error: f64::NAN })
}

/// Exponential integral `E1(x) = Gamma(0, x)` for small positive `x`.
fn exp_integral_e1(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        term *= -x / k as f64;
        let t = term / k as f64;
        sum += t;
        if t.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}
