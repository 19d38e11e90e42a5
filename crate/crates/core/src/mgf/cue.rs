//! Interference of the uplink cellular user at a D2D receiver `d` from the
//! BS. The cellular user is uniform on the cell and channel-inverts towards
//! the BS, so its power at distance `r_z` is `rho_bs r_z^alpha_c`.

use super::kernel::{is_exponent, theta_avg_alpha2, theta_avg_alpha4, theta_avg_numeric};
use super::{check_distance, SVar};
use crate::error::Result;
use crate::network::{MgfMethod, NetworkConfig};
use crate::specfun::quad::breakpoints;
use crate::specfun::{beta2, try_integrate, Jet, Scalar};
use num_complex::Complex64;

/// `1 - M_CUE(s; d)`.
pub(crate) fn deficit(v: &SVar, d: f64, cfg: &NetworkConfig, method: MgfMethod) -> Result<Jet<f64>> {
    check_distance(d, cfg)?;
    if v.value() == 0.0 {
        if v.order() == 0 {
            return Ok(Jet::constant(0.0));
        }
        v.sqrt()?;
    }
    let p = &cfg.mode;
    let a2 = is_exponent(p.alpha_d, 2.0);
    let a4 = is_exponent(p.alpha_d, 4.0);
    match method {
        MgfMethod::ClosedForm if p.equal_exponents() && (a2 || a4) => closed(v, d, cfg, a4),
        MgfMethod::ClosedForm if a2 => radial(v, d, cfg, Angular::Alpha2),
        MgfMethod::ClosedForm if a4 => radial(v, d, cfg, Angular::Alpha4),
        _ => radial(v, d, cfg, Angular::Numeric),
    }
}

#[derive(Clone, Copy)]
enum Angular {
    Alpha2,
    Alpha4,
    Numeric,
}

/// `int_0^R (2 r_z / R^2) <kernel>_theta dr_z`.
fn radial(v: &SVar, d: f64, cfg: &NetworkConfig, how: Angular) -> Result<Jet<f64>> {
    let p = &cfg.mode;
    let r = cfg.geometry.cell_radius;
    let set = &cfg.quadrature;
    let s = v.jet;
    let sq = if matches!(how, Angular::Alpha4) { Some(v.sqrt()?) } else { None };
    let out = try_integrate(
        |r_z: f64| {
            let num = p.rho_bs * r_z.powf(p.alpha_c);
            let avg = match how {
                Angular::Alpha2 => theta_avg_alpha2(s.scale(num), r_z, d),
                Angular::Alpha4 => theta_avg_alpha4(sq.unwrap().scale(num.sqrt()), r_z, d),
                Angular::Numeric => theta_avg_numeric(s.scale(num), r_z, d, p.alpha_d, set)?,
            };
            Ok(avg.scale(2.0 * r_z / (r * r)))
        },
        &breakpoints(0.0, r, &[d]),
        set,
    )?;
    Ok(out.value)
}

fn jc(x: f64) -> Jet<Complex64> {
    Jet::constant(Complex64::new(x, 0.0))
}

/// Equal exponents: the radial integral through `beta_2`.
fn closed(v: &SVar, d: f64, cfg: &NetworkConfig, alpha4: bool) -> Result<Jet<f64>> {
    let p = &cfg.mode;
    let r = cfg.geometry.cell_radius;
    let (d2, d4) = (d * d, d * d * d * d);
    let x1 = r * r;
    if alpha4 {
        let q0 = v.sqrt()?.scale(p.rho_bs.sqrt());
        let iq = q0.to_complex().mul_i();
        let w = jc(1.0) - iq;
        let b = -(jc(1.0) + iq).scale(d2) / w;
        let c = -iq.scale(4.0 * d4) / (w * w);
        let span = (beta2(x1, w, b, c) - beta2(0.0, w, b, c)) / (w * w);
        Ok((span.im() * q0).scale(1.0 / x1))
    } else {
        let a = v.jet.scale(p.rho_bs);
        let one = Jet::constant(1.0);
        let ap = a + one;
        let lead = ap * ap;
        let b = (a - one).scale(d2);
        let c = a.scale(4.0 * d4);
        let span = beta2(x1, lead, b, c) - beta2(0.0, lead, b, c);
        Ok(a * span / (ap * ap * ap).scale(x1))
    }
}
