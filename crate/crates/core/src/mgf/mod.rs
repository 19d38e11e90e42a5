//! Moment generating functions of the interference at the BS and at a D2D
//! receiver, with derivatives in `s` up to order four.
//!
//! Internally every path computes the *deficit* `1 - M(s)` as a [`Jet`] in
//! the scaled variable `eps`, where `s = s0 (1 + eps)`. This keeps the
//! Taylor coefficients of comparable size and avoids cancellation when the
//! MGF is close to one.

mod bs;
mod cue;
mod drx;
pub(crate) mod kernel;

use crate::error::{Error, Result};
use crate::network::{MgfMethod, NetworkConfig};
use crate::specfun::{Jet, Scalar, MAX_ORDER};
use serde::{Deserialize, Serialize};

pub(crate) use bs::deficit as bs_deficit;
pub(crate) use cue::deficit as cue_deficit;
pub(crate) use drx::deficit as drx_deficit;

/// An MGF value with its derivatives: `derivatives[k] = d^k M / ds^k` for
/// `k = 0..=order`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MgfValue {
    pub s: f64,
    pub derivatives: Vec<f64>,
}

impl MgfValue {
    pub fn value(&self) -> f64 {
        self.derivatives[0]
    }

    pub fn order(&self) -> usize {
        self.derivatives.len() - 1
    }

    /// `sum_{t < m} (-s)^t / t! M^(t)(s)`, the Nakagami-m success
    /// probability expressed through the MGF.
    pub fn success_sum(&self, m: usize) -> f64 {
        let mut acc = 0.0;
        let mut w = 1.0;
        for t in 0..m.min(self.derivatives.len()) {
            if t > 0 {
                w *= -self.s / t as f64;
            }
            acc += w * self.derivatives[t];
        }
        acc
    }
}

/// Where the interference is measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MgfTarget {
    /// One admitted D2D interferer seen at the BS.
    SingleBs,
    /// Aggregate D2D interference at the BS.
    AggregateBs,
    /// One admitted D2D interferer seen by a receiver `d` from the BS.
    SingleDrx { d: f64 },
    /// The cellular uplink user seen by a receiver `d` from the BS.
    CueDrx { d: f64 },
    /// Aggregate D2D plus cellular interference at a receiver `d` from the BS.
    AggregateDrx { d: f64 },
}

/// The evaluation variable `s0 (1 + eps)` (or `s0 + eps / rho` at `s0 = 0`).
#[derive(Debug, Clone, Copy)]
pub(crate) struct SVar {
    pub jet: Jet<f64>,
    pub step: f64,
}

impl SVar {
    pub fn new(s: f64, order: usize, rho: f64) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::UnsupportedOrder(order));
        }
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::Domain { function: "mgf", detail: format!("s = {s}") });
        }
        let step = if s > 0.0 { s } else { 1.0 / rho };
        Ok(SVar { jet: Jet::variable(s, step, order), step })
    }

    pub fn value(&self) -> f64 {
        self.jet.value()
    }

    pub fn order(&self) -> usize {
        self.jet.len() - 1
    }

    pub fn sqrt(&self) -> Result<Jet<f64>> {
        if self.value() == 0.0 {
            return Err(Error::Domain {
                function: "mgf",
                detail: "derivatives at s = 0 diverge for receiver-side interference".into(),
            });
        }
        Ok(Scalar::sqrt(self.jet))
    }

    /// Convert Taylor coefficients in `eps` into derivatives in `s`.
    pub fn finish(&self, m: Jet<f64>) -> MgfValue {
        let order = self.order();
        let mut derivatives = Vec::with_capacity(order + 1);
        let mut fact = 1.0;
        for k in 0..=order {
            if k > 0 {
                fact *= k as f64;
            }
            let c = m.coeffs().get(k).copied().unwrap_or(0.0);
            derivatives.push(fact * c / self.step.powi(k as i32));
        }
        MgfValue { s: self.value(), derivatives }
    }
}

fn one_minus(x: Jet<f64>) -> Jet<f64> {
    Jet::constant(1.0) - x
}

/// MGF of the interference from one admitted D2D user at the BS.
pub fn mgf_single_bs(s: f64, order: usize, cfg: &NetworkConfig, method: MgfMethod) -> Result<MgfValue> {
    let v = SVar::new(s, order, cfg.mode.rho_d)?;
    Ok(v.finish(one_minus(bs_deficit(&v, cfg, method)?)))
}

/// MGF of the aggregate D2D interference at the BS.
pub fn mgf_agg_bs(s: f64, order: usize, cfg: &NetworkConfig, method: MgfMethod) -> Result<MgfValue> {
    let v = SVar::new(s, order, cfg.mode.rho_d)?;
    Ok(v.finish(agg_bs_jet(&v, cfg, method)?))
}

pub(crate) fn agg_bs_jet(v: &SVar, cfg: &NetworkConfig, method: MgfMethod) -> Result<Jet<f64>> {
    let def = bs_deficit(v, cfg, method)?;
    Ok(Scalar::exp(def.scale(-cfg.mean_pdue_count())))
}

/// MGF of the interference from one admitted D2D user at a receiver `d`
/// from the BS.
pub fn mgf_single_drx(s: f64, d: f64, order: usize, cfg: &NetworkConfig, method: MgfMethod) -> Result<MgfValue> {
    let v = SVar::new(s, order, cfg.mode.rho_d)?;
    Ok(v.finish(one_minus(drx_deficit(&v, d, cfg, method)?)))
}

/// MGF of the cellular user's interference at a receiver `d` from the BS.
pub fn mgf_cue_drx(s: f64, d: f64, order: usize, cfg: &NetworkConfig, method: MgfMethod) -> Result<MgfValue> {
    let v = SVar::new(s, order, cfg.mode.rho_d)?;
    Ok(v.finish(one_minus(cue_deficit(&v, d, cfg, method)?)))
}

/// MGF of the total interference at a receiver `d` from the BS.
pub fn mgf_agg_drx(s: f64, d: f64, order: usize, cfg: &NetworkConfig, method: MgfMethod) -> Result<MgfValue> {
    let v = SVar::new(s, order, cfg.mode.rho_d)?;
    Ok(v.finish(agg_drx_jet(&v, d, cfg, method)?))
}

pub(crate) fn agg_drx_jet(v: &SVar, d: f64, cfg: &NetworkConfig, method: MgfMethod) -> Result<Jet<f64>> {
    let cue = one_minus(cue_deficit(v, d, cfg, method)?);
    let d2d = Scalar::exp(drx_deficit(v, d, cfg, method)?.scale(-cfg.mean_pdue_count()));
    Ok(cue * d2d)
}

/// Replace the constant term of `jet` by `value`.
fn with_value(jet: Jet<f64>, value: f64) -> Jet<f64> {
    let mut c = jet.coeffs().to_vec();
    c[0] = value;
    Jet::from_coeffs(&c)
}

/// `1 - M` of the aggregate at the BS with an accurate constant term.
pub(crate) fn agg_bs_deficit(v: &SVar, cfg: &NetworkConfig, method: MgfMethod) -> Result<Jet<f64>> {
    let x = bs_deficit(v, cfg, method)?.scale(-cfg.mean_pdue_count());
    Ok(with_value(-Scalar::exp(x), -x.value().exp_m1()))
}

/// `1 - M` of the aggregate at a receiver with an accurate constant term.
pub(crate) fn agg_drx_deficit(v: &SVar, d: f64, cfg: &NetworkConfig, method: MgfMethod) -> Result<Jet<f64>> {
    let cue = cue_deficit(v, d, cfg, method)?;
    let x = drx_deficit(v, d, cfg, method)?.scale(-cfg.mean_pdue_count());
    let m = (Jet::constant(1.0) - cue) * Scalar::exp(x);
    let c0 = cue.value();
    Ok(with_value(-m, c0 - (1.0 - c0) * x.value().exp_m1()))
}

/// Dispatch on [`MgfTarget`].
pub fn mgf(target: MgfTarget, s: f64, order: usize, cfg: &NetworkConfig, method: MgfMethod) -> Result<MgfValue> {
    match target {
        MgfTarget::SingleBs => mgf_single_bs(s, order, cfg, method),
        MgfTarget::AggregateBs => mgf_agg_bs(s, order, cfg, method),
        MgfTarget::SingleDrx { d } => mgf_single_drx(s, d, order, cfg, method),
        MgfTarget::CueDrx { d } => mgf_cue_drx(s, d, order, cfg, method),
        MgfTarget::AggregateDrx { d } => mgf_agg_drx(s, d, order, cfg, method),
    }
}

pub(crate) fn check_distance(d: f64, cfg: &NetworkConfig) -> Result<()> {
    let g = &cfg.geometry;
    if !(d >= 0.0 && d <= g.cell_radius + g.d2d_range) {
        return Err(Error::Domain {
            function: "mgf",
            detail: format!("receiver distance {d} outside [0, R + R_D]"),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests;
