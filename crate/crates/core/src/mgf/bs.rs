//! Interference of one admitted D2D user at the BS.

use super::kernel::is_exponent;
use super::SVar;
use crate::error::Result;
use crate::geometry::d2d_distance_pdf;
use crate::network::{MgfMethod, NetworkConfig};
use crate::specfun::{gamma, hyp2f1_taylor, try_integrate, Jet, Scalar};

/// `1 - M_BS(s)`.
pub(crate) fn deficit(v: &SVar, cfg: &NetworkConfig, method: MgfMethod) -> Result<Jet<f64>> {
    match method {
        MgfMethod::ClosedForm if v.value() > 0.0 && !is_exponent(cfg.mode.alpha_d, 2.0) => closed(v, cfg),
        _ => quadrature(v, cfg),
    }
}

fn hyp_jet(a: f64, b: f64, c: f64, z: Jet<f64>) -> Result<Jet<f64>> {
    let t = hyp2f1_taylor(a, b, c, z.value(), z.len())?;
    Ok(z.compose(&t))
}

/// Hypergeometric closed form, including the analytic `r_d -> 0` limit of
/// the bracketed antiderivative.
fn closed(v: &SVar, cfg: &NetworkConfig) -> Result<Jet<f64>> {
    let p = &cfg.mode;
    let (ac, ad) = (p.alpha_c, p.alpha_d);
    let r = cfg.geometry.cell_radius;
    let rd = cfg.geometry.d2d_range;
    let rt = cfg.effective_d2d_range();
    let s = v.jet;
    let norm = rd * rd * (ac + ad);
    let t1_scale = ac * rt.powf(2.0 + 2.0 * ad / ac) / (norm * r * r * (p.xi / p.rho_d).powf(2.0 / ac));

    let x = s.scale(p.rho_d * rt.powf(ad) / r.powf(ac));
    if x.value() <= 1.0 && ac > 2.1 {
        return small_argument(x, s.scale(p.xi), ac, ad, rt * rt / norm, t1_scale);
    }

    let z1 = -s.scale(p.xi).recip();
    let f1 = hyp_jet(1.0, 2.0 / ac, 1.0 + 2.0 / ac, z1)?;
    let t1 = f1.scale(t1_scale);

    let z2 = -x.recip();
    let g1 = hyp_jet(1.0, 2.0 / ac, 1.0 + 2.0 / ac, z2)?;
    let g2 = hyp_jet(1.0, -2.0 / ad, 1.0 - 2.0 / ad, z2)?;
    let upper = (g1.scale(ac) + g2.scale(ad)).scale(rt * rt / norm);

    let b = -2.0 / ad;
    let lower = s
        .scale(p.rho_d / r.powf(ac))
        .powf(b)
        .scale(ad * gamma(1.0 + b) * gamma(1.0 - b) / norm);

    Ok(upper - lower - t1)
}

/// `2F1(1, b; 1 + b; -1/x)` without its `Gamma(1 + b) Gamma(1 - b) x^b` part.
fn reflected(b: f64, x: Jet<f64>) -> Result<Jet<f64>> {
    Ok((x * hyp_jet(1.0, 1.0 - b, 2.0 - b, -x)?).scale(b / (b - 1.0)))
}

/// The closed form with the power-law parts of the three hypergeometric
/// terms cancelled analytically, for `x <= 1`.
fn small_argument(x: Jet<f64>, y: Jet<f64>, ac: f64, ad: f64, upper_scale: f64, t1_scale: f64) -> Result<Jet<f64>> {
    let (b1, b2) = (2.0 / ac, -2.0 / ad);
    let upper = (reflected(b1, x)?.scale(ac) + reflected(b2, x)?.scale(ad)).scale(upper_scale);
    Ok(upper - reflected(b1, y)?.scale(t1_scale))
}

/// `int_0^R~ f(r_d) int_{r_d'}^R (2 r_c / R^2) k / (1 + k) dr_c dr_d` with
/// `k = s rho_d r_d^alpha_d r_c^-alpha_c`.
fn quadrature(v: &SVar, cfg: &NetworkConfig) -> Result<Jet<f64>> {
    let p = &cfg.mode;
    let r = cfg.geometry.cell_radius;
    let rt = cfg.effective_d2d_range();
    let set = &cfg.quadrature;
    let s = v.jet;
    let outer = try_integrate(
        |r_d: f64| {
            let lo = cfg.admission_floor(r_d).min(r);
            let num = p.rho_d * r_d.powf(p.alpha_d);
            let inner = try_integrate(
                |r_c: f64| {
                    let k = s.scale(num * r_c.powf(-p.alpha_c));
                    Ok((k / (k + Jet::constant(1.0))).scale(2.0 * r_c / (r * r)))
                },
                &[lo, r],
                set,
            )?;
            Ok(inner.value.scale(d2d_distance_pdf(&cfg.geometry, r_d)))
        },
        &[0.0, rt],
        set,
    )?;
    Ok(outer.value)
}
