//! Outage probabilities and the cell-level D2D metrics built on them.

use crate::error::{Error, Result};
use crate::geometry::drx_density;
use crate::mgf::{agg_bs_deficit, agg_drx_deficit, SVar};
use crate::mode_selection::p_d2d;
use crate::network::{FadingSpec, NetworkConfig};
use crate::specfun::quad::breakpoints;
use crate::specfun::{try_integrate, Jet};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// An outage probability together with the unclamped series value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outage {
    pub probability: f64,
    pub raw: f64,
}

/// `P(SIR < gamma)` from the deficit jet `1 - M` at `s = m gamma / rho`:
/// `1 - sum_{t<m} (-s)^t / t! M^(t)(s)`.
fn series(deficit: Jet<f64>, m: u32) -> Outage {
    let c = deficit.coeffs();
    let mut raw = c[0];
    for t in 1..m as usize {
        let sign = if t % 2 == 1 { -1.0 } else { 1.0 };
        raw += sign * c.get(t).copied().unwrap_or(0.0);
    }
    Outage { probability: raw.clamp(0.0, 1.0), raw }
}

fn check_threshold(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Domain { function: "outage", detail: format!("SIR threshold {gamma} must be positive") });
    }
    Ok(())
}

/// Outage at the BS with the clamping diagnostic.
pub fn outage_bs_detailed(gamma: f64, cfg: &NetworkConfig, fading: &FadingSpec) -> Result<Outage> {
    check_threshold(gamma)?;
    fading.validate()?;
    let m = fading.m_cellular;
    let v = SVar::new(m as f64 * gamma / cfg.mode.rho_bs, m as usize - 1, cfg.mode.rho_d)?;
    Ok(series(agg_bs_deficit(&v, cfg, cfg.mgf_method)?, m))
}

/// Probability that the cellular uplink SIR at the BS falls below `gamma`.
pub fn outage_bs(gamma: f64, cfg: &NetworkConfig, fading: &FadingSpec) -> Result<f64> {
    Ok(outage_bs_detailed(gamma, cfg, fading)?.probability)
}

/// Outage at an admitted D2D receiver `d` from the BS, with the clamping
/// diagnostic.
pub fn outage_drx_detailed(gamma: f64, d: f64, cfg: &NetworkConfig, fading: &FadingSpec) -> Result<Outage> {
    check_threshold(gamma)?;
    fading.validate()?;
    let m = fading.m_d2d;
    let v = SVar::new(m as f64 * gamma / cfg.mode.rho_d, m as usize - 1, cfg.mode.rho_d)?;
    Ok(series(agg_drx_deficit(&v, d, cfg, cfg.mgf_method)?, m))
}

/// Probability that the SIR at an admitted D2D receiver `d` from the BS
/// falls below `gamma`.
pub fn outage_drx(gamma: f64, d: f64, cfg: &NetworkConfig, fading: &FadingSpec) -> Result<f64> {
    Ok(outage_drx_detailed(gamma, d, cfg, fading)?.probability)
}

/// Mean number of admitted D2D users in the cell.
pub fn avg_dues(cfg: &NetworkConfig) -> f64 {
    let p = &cfg.mode;
    let (r, rd) = (cfg.geometry.cell_radius, cfg.geometry.d2d_range);
    let rt = cfg.effective_d2d_range();
    let (ac, ad) = (p.alpha_c, p.alpha_d);
    let excluded = ac / (ac + ad) * (p.rho_d / p.xi).powf(2.0 / ac) * rt.powf(2.0 * ad / ac + 2.0) / (r * r * rd * rd);
    cfg.mean_pdue_count() * (rt * rt / (rd * rd) - excluded)
}

/// Mean number of D2D links per cell that are admitted and succeed at
/// threshold `gamma`.
pub fn avg_successful_transmissions(gamma: f64, cfg: &NetworkConfig, fading: &FadingSpec) -> Result<f64> {
    check_threshold(gamma)?;
    if cfg.lambda == 0.0 {
        return Ok(0.0);
    }
    let g = &cfg.geometry;
    let (r, rd) = (g.cell_radius, g.d2d_range);
    let settings = cfg.quadrature.with_rel_tol(cfg.quadrature.rel_tol.max(1e-7));
    let out = try_integrate(
        |d: f64| {
            let density = drx_density(cfg.lambda, g, d)?;
            if density == 0.0 {
                return Ok(0.0);
            }
            let admit = p_d2d(d, &cfg.mode, g)?;
            if admit == 0.0 {
                return Ok(0.0);
            }
            let success = 1.0 - outage_drx(gamma, d, cfg, fading)?;
            Ok(success * admit * density * 2.0 * PI * d)
        },
        &breakpoints(0.0, r + rd, &[(r - rd).max(0.0), r]),
        &settings,
    )?;
    Ok(out.value)
}

/// Fraction of admitted D2D links that succeed.
pub fn spectrum_reuse_ratio(gamma: f64, cfg: &NetworkConfig, fading: &FadingSpec) -> Result<f64> {
    let dues = avg_dues(cfg);
    if !(dues > 0.0) {
        return Err(Error::UndefinedMetric("no D2D users are admitted, so the reuse ratio is undefined".into()));
    }
    Ok((avg_successful_transmissions(gamma, cfg, fading)? / dues).clamp(0.0, 1.0))
}

/// Result of [`solve_xi_for_qos`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum QosSolution {
    /// `xi` (watts) meets the target to within the solver tolerance.
    Solved { xi: f64, outage: f64, iterations: usize },
    /// Even admitting every user keeps the BS outage below the target.
    Saturated { outage_at_max: f64 },
}

impl QosSolution {
    /// The threshold, with `+inf` standing in for saturation.
    pub fn xi(&self) -> f64 {
        match self {
            QosSolution::Solved { xi, .. } => *xi,
            QosSolution::Saturated { .. } => f64::INFINITY,
        }
    }
}

/// Lower and upper search bounds on `xi / rho_d`.
pub const QOS_SEARCH_RANGE: (f64, f64) = (1e-6, 1e6);

/// Largest mode selection threshold whose BS outage stays at
/// `target_outage`, by bisection on `log xi`.
pub fn solve_xi_for_qos(target_outage: f64, gamma: f64, cfg: &NetworkConfig, fading: &FadingSpec) -> Result<QosSolution> {
    if !(target_outage > 0.0 && target_outage < 1.0) {
        return Err(Error::Domain { function: "solve_xi_for_qos", detail: format!("target {target_outage} outside (0, 1)") });
    }
    let rho_d = cfg.mode.rho_d;
    let eval = |log_ratio: f64| -> Result<f64> {
        let mut c = *cfg;
        c.mode.xi = rho_d * log_ratio.exp();
        outage_bs(gamma, &c, fading)
    };
    let (mut lo, mut hi) = (QOS_SEARCH_RANGE.0.ln(), QOS_SEARCH_RANGE.1.ln());
    let at_hi = eval(hi)?;
    if at_hi < target_outage {
        return Ok(QosSolution::Saturated { outage_at_max: at_hi });
    }
    let at_lo = eval(lo)?;
    if at_lo > target_outage {
        return Err(Error::BracketFailure { lo_outage: at_lo, hi_outage: at_hi });
    }
    const TOL: f64 = 1e-6;
    for iterations in 1..=200 {
        let mid = 0.5 * (lo + hi);
        let p = eval(mid)?;
        if (p - target_outage).abs() <= TOL || hi - lo < 1e-13 {
            return Ok(QosSolution::Solved { xi: rho_d * mid.exp(), outage: p, iterations });
        }
        if p < target_outage {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = eval(lo)?;
    Err(Error::NonConvergence { estimate: rho_d * lo.exp(), error: (p - target_outage).abs() })
}
