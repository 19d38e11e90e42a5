//! Interference of one admitted D2D user at a D2D receiver `d` from the BS.

use super::kernel::{is_exponent, theta_avg_alpha2, theta_avg_alpha4, theta_avg_numeric};
use super::{check_distance, SVar};
use crate::error::Result;
use crate::geometry::d2d_distance_pdf;
use crate::network::{MgfMethod, NetworkConfig};
use crate::specfun::quad::breakpoints;
use crate::specfun::{psi1, try_integrate, Jet, Scalar};
use num_complex::Complex64;

/// `1 - M_DRx(s; d)`.
pub(crate) fn deficit(v: &SVar, d: f64, cfg: &NetworkConfig, method: MgfMethod) -> Result<Jet<f64>> {
    check_distance(d, cfg)?;
    if v.value() == 0.0 {
        // The value is exact; asking for derivatives fails inside `sqrt`.
        if v.order() == 0 {
            return Ok(Jet::constant(0.0));
        }
        v.sqrt()?;
    }
    let p = &cfg.mode;
    let a2 = is_exponent(p.alpha_d, 2.0);
    let a4 = is_exponent(p.alpha_d, 4.0);
    match method {
        // The fully closed form cancels badly while the deficit is small.
        MgfMethod::ClosedForm if p.equal_exponents() && (a2 || a4) && v.value() * p.rho_d >= 1.0 => {
            closed(v, d, cfg, a4)
        }
        MgfMethod::ClosedForm if a2 || a4 => semi_closed(v, d, cfg, a4),
        MgfMethod::Direct => nested(v, d, cfg, Angular::Numeric),
        _ if a2 => nested(v, d, cfg, Angular::Alpha2),
        _ if a4 => nested(v, d, cfg, Angular::Alpha4),
        _ => nested(v, d, cfg, Angular::Numeric),
    }
}

#[derive(Clone, Copy)]
enum Angular {
    Alpha2,
    Alpha4,
    Numeric,
}

/// `int f(r_d) int_{r_d'}^R (2 r_c / R^2) <kernel>_theta dr_c dr_d`.
fn nested(v: &SVar, d: f64, cfg: &NetworkConfig, how: Angular) -> Result<Jet<f64>> {
    let p = &cfg.mode;
    let r = cfg.geometry.cell_radius;
    let rt = cfg.effective_d2d_range();
    let set = &cfg.quadrature;
    let s = v.jet;
    let sq = if matches!(how, Angular::Alpha4) { Some(v.sqrt()?) } else { None };
    let outer = try_integrate(
        |r_d: f64| {
            let lo = cfg.admission_floor(r_d).min(r);
            let num = p.rho_d * r_d.powf(p.alpha_d);
            let k = s.scale(num);
            let inner = try_integrate(
                |r_c: f64| {
                    let avg = match how {
                        Angular::Alpha2 => theta_avg_alpha2(k, r_c, d),
                        Angular::Alpha4 => theta_avg_alpha4(sq.unwrap().scale(num.sqrt()), r_c, d),
                        Angular::Numeric => theta_avg_numeric(k, r_c, d, p.alpha_d, set)?,
                    };
                    Ok(avg.scale(2.0 * r_c / (r * r)))
                },
                &breakpoints(lo, r, &[d]),
                set,
            )?;
            Ok(inner.value.scale(d2d_distance_pdf(&cfg.geometry, r_d)))
        },
        &[0.0, rt],
        set,
    )?;
    Ok(outer.value)
}

fn jc(x: f64) -> Jet<Complex64> {
    Jet::constant(Complex64::new(x, 0.0))
}

/// `y + sqrt(y^2 + c)` without cancellation.
fn log_arg<S: Scalar>(y: S, c: S) -> S {
    let q = (y * y + c).sqrt();
    if y.re_lead() < 0.0 {
        c / (q - y)
    } else {
        y + q
    }
}

/// Radial integral in closed form, link length integrated numerically.
fn semi_closed(v: &SVar, d: f64, cfg: &NetworkConfig, alpha4: bool) -> Result<Jet<f64>> {
    let p = &cfg.mode;
    let r = cfg.geometry.cell_radius;
    let rt = cfg.effective_d2d_range();
    let s = v.jet;
    let sq = if alpha4 { Some(v.sqrt()?) } else { None };
    let d2 = d * d;
    let outer = try_integrate(
        |r_d: f64| {
            let floor = cfg.admission_floor(r_d).min(r);
            let ul = floor * floor;
            let phi = if let Some(sq) = sq {
                let q = sq.scale(p.rho_d.sqrt() * r_d * r_d);
                let iq = q.to_complex().mul_i();
                let c = iq.scale(-4.0 * d2);
                let g = |u: f64| log_arg(jc(u - d2) - iq, c).ln();
                (g(r * r) - g(ul)).im() * q
            } else {
                let k = s.scale(p.rho_d * r_d * r_d);
                let c = k.scale(4.0 * d2);
                let g = |u: f64| log_arg(Jet::constant(u - d2) + k, c).ln();
                (g(r * r) - g(ul)) * k
            };
            Ok(phi.scale(d2d_distance_pdf(&cfg.geometry, r_d) / (r * r)))
        },
        &[0.0, rt],
        &cfg.quadrature,
    )?;
    Ok(outer.value)
}

/// Equal exponents: both integrals in closed form through `Psi_1`.
fn closed(v: &SVar, d: f64, cfg: &NetworkConfig, alpha4: bool) -> Result<Jet<f64>> {
    let p = &cfg.mode;
    let r = cfg.geometry.cell_radius;
    let rd = cfg.geometry.d2d_range;
    let rt = cfg.effective_d2d_range();
    let d2 = d * d;
    let x1 = rt * rt;
    let norm = rd * rd * r * r;
    if alpha4 {
        let q0 = v.sqrt()?.scale(p.rho_d.sqrt());
        let a = -q0.to_complex().mul_i();
        let c = a.scale(4.0 * d2);
        let a_lo = a + jc((p.rho_d / p.xi).sqrt());
        let f = |x: f64| -> Result<Jet<Complex64>> { Ok(psi1(x, a, jc(r * r - d2), c)? - psi1(x, a_lo, jc(-d2), c)?) };
        let span = f(x1)? - f(0.0)?;
        Ok((span.im() * q0).scale(1.0 / norm))
    } else {
        let a = v.jet.scale(p.rho_d);
        let c = a.scale(4.0 * d2);
        let a_lo = a + Jet::constant(p.rho_d / p.xi);
        let f = |x: f64| -> Result<Jet<f64>> {
            Ok(psi1(x, a, Jet::constant(r * r - d2), c)? - psi1(x, a_lo, Jet::constant(-d2), c)?)
        };
        let span = f(x1)? - f(0.0)?;
        Ok((span * a).scale(1.0 / norm))
    }
}
