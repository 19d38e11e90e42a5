//! Angular averages of the Rayleigh kernel `k / (k + D^alpha_d)` over the
//! direction of an interferer seen from a receiver at distance `d`.

use crate::error::Result;
use crate::specfun::{try_integrate, Jet, QuadratureSettings, Scalar};
use num_complex::Complex64;
use std::f64::consts::PI;

fn jc(x: f64) -> Jet<Complex64> {
    Jet::constant(Complex64::new(x, 0.0))
}

pub(crate) fn is_exponent(a: f64, target: f64) -> bool {
    (a - target).abs() <= 1e-12
}

/// `(1/pi) int_0^pi K / (K + r^2 + d^2 - 2 r d cos t) dt` for `alpha_d = 2`.
pub(crate) fn theta_avg_alpha2(k: Jet<f64>, r: f64, d: f64) -> Jet<f64> {
    let lo = Jet::constant((r - d) * (r - d)) + k;
    let hi = Jet::constant((r + d) * (r + d)) + k;
    k / (lo * hi).sqrt()
}

/// Same average for `alpha_d = 4`, with `q^2` the kernel numerator:
/// `q Im{ 1 / (sqrt((r-d)^2 - i q) sqrt((r+d)^2 - i q)) }`.
pub(crate) fn theta_avg_alpha4(q: Jet<f64>, r: f64, d: f64) -> Jet<f64> {
    let iq = q.to_complex().mul_i();
    let lo = (jc((r - d) * (r - d)) - iq).sqrt();
    let hi = (jc((r + d) * (r + d)) - iq).sqrt();
    (lo * hi).recip().im() * q
}

/// Numerical angular average for any exponent; `k` is `s` times the
/// numerator of the kernel.
pub(crate) fn theta_avg_numeric(k: Jet<f64>, r: f64, d: f64, alpha_d: f64, set: &QuadratureSettings) -> Result<Jet<f64>> {
    let h = 0.5 * alpha_d;
    let avg = try_integrate(
        |t: f64| {
            let half = (0.5 * t).sin();
            let dist2 = (r - d) * (r - d) + 4.0 * r * d * half * half;
            let den = k + Jet::constant(dist2.powf(h));
            if den.value() == 0.0 {
                return Ok(Jet::constant(0.0));
            }
            Ok(k / den)
        },
        &[0.0, PI],
        set,
    )?;
    Ok(avg.value.scale(1.0 / PI))
}
