//! Underlay admission rule and the probability that a potential D2D user
//! is admitted.

use crate::error::{Error, Result};
use crate::geometry::{lens_area, CellGeometry};
use crate::specfun::upper_incomplete_gamma;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Parameters of the interference-limited mode selection.
///
/// `xi` compares against `rho_d * r_d^alpha_d * r_c^-alpha_c`, the average
/// interference a channel-inverted D2D transmitter causes at the BS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSelectionParams {
    pub xi: f64,
    pub rho_d: f64,
    pub rho_bs: f64,
    pub alpha_c: f64,
    pub alpha_d: f64,
    pub gamma_approx_n: u32,
}

impl Default for ModeSelectionParams {
    fn default() -> Self {
        let rho_d = dbm_to_watts(-70.0);
        ModeSelectionParams {
            xi: rho_d,
            rho_d,
            rho_bs: dbm_to_watts(-80.0),
            alpha_c: 4.0,
            alpha_d: 4.0,
            gamma_approx_n: 6,
        }
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

impl ModeSelectionParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("xi", self.xi), ("rho_d", self.rho_d), ("rho_bs", self.rho_bs)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(2.0..=6.0).contains(&self.alpha_c) || !(2.0..=6.0).contains(&self.alpha_d) {
            return Err(Error::InvalidConfig(format!(
                "path-loss exponents must lie in [2, 6], got alpha_c = {}, alpha_d = {}",
                self.alpha_c, self.alpha_d
            )));
        }
        if self.alpha_c > self.alpha_d {
            return Err(Error::InvalidConfig(format!(
                "alpha_c = {} must not exceed alpha_d = {}",
                self.alpha_c, self.alpha_d
            )));
        }
        if self.gamma_approx_n == 0 || self.gamma_approx_n > 20 {
            return Err(Error::InvalidConfig(format!("gamma_approx_n must lie in 1..=20, got {}", self.gamma_approx_n)));
        }
        Ok(())
    }

    pub fn equal_exponents(&self) -> bool {
        (self.alpha_c - self.alpha_d).abs() <= 1e-12
    }

    /// `k = (xi / rho_d)^(1/alpha)` for equal exponents; the admitted region
    /// is `r_d <= k r_c`.
    fn ratio(&self) -> f64 {
        (self.xi / self.rho_d).powf(1.0 / self.alpha_d)
    }

    /// The two radii separating the three branches of the equal-exponent
    /// admission probability.
    pub fn branch_radii(&self, geom: &CellGeometry) -> (f64, f64) {
        let t = (self.rho_d / self.xi).powf(1.0 / self.alpha_d);
        ((1.0 - t).abs() * geom.d2d_range, (1.0 + t) * geom.d2d_range)
    }
}

/// Whether a potential D2D user with link length `r_d` at distance `r_c`
/// from the BS is admitted to underlay mode.
pub fn is_underlay(r_d: f64, r_c: f64, p: &ModeSelectionParams) -> bool {
    p.rho_d * r_d.powf(p.alpha_d) <= p.xi * r_c.powf(p.alpha_c)
}

/// Admission probability of a user whose receiver sits at distance `d` from
/// the BS, for `alpha_c = alpha_d`.
///
/// The admitted set inside the D2D disk is bounded by an Apollonius circle
/// of radius `k d / |k^2 - 1|` centred `k^2 d / |k^2 - 1|` from the
/// receiver.
pub fn p_d2d_equal_alpha(d: f64, p: &ModeSelectionParams, geom: &CellGeometry) -> Result<f64> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::Domain { function: "p_d2d_equal_alpha", detail: format!("d = {d}") });
    }
    if !p.equal_exponents() {
        return Err(Error::Domain {
            function: "p_d2d_equal_alpha",
            detail: format!("alpha_c = {} differs from alpha_d = {}", p.alpha_c, p.alpha_d),
        });
    }
    let rd = geom.d2d_range;
    let disk = PI * rd * rd;
    let k = p.ratio();
    let (rd1, rd2) = p.branch_radii(geom);

    if ((p.xi - p.rho_d) / p.rho_d).abs() <= 1e-12 {
        // Perpendicular bisector: only the half-plane beyond d/2 is excluded.
        if d >= 2.0 * rd {
            return Ok(1.0);
        }
        let h = d / 2.0;
        let segment = rd * rd * (h / rd).acos() - h * (rd * rd - h * h).sqrt();
        return Ok(1.0 - segment / disk);
    }
    if d >= rd2 {
        return Ok(1.0);
    }
    let k2 = k * k;
    let radius = k * d / (k2 - 1.0).abs();
    let offset = k2 * d / (k2 - 1.0).abs();
    let excluded_or_admitted = if d <= rd1 {
        PI * radius * radius
    } else {
        lens_area(rd, radius, offset)?
    };
    let frac = (excluded_or_admitted / disk).clamp(0.0, 1.0);
    Ok(if k > 1.0 { 1.0 - frac } else { frac })
}

/// Gamma-moment approximation of the admission probability for general
/// exponents, summed over `N = gamma_approx_n` terms and clamped to `[0, 1]`.
pub fn p_d2d_general(d: f64, p: &ModeSelectionParams, geom: &CellGeometry) -> Result<f64> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::Domain { function: "p_d2d_general", detail: format!("d = {d}") });
    }
    let n = p.gamma_approx_n;
    let nf = n as f64;
    let nfact_root = (1..=n).map(|k| k as f64).product::<f64>().powf(1.0 / nf);
    let e = 2.0 / p.alpha_d;
    let rd = geom.d2d_range;
    let mut sum = 1.0;
    let mut binom = 1.0;
    for j in 1..=n {
        let jf = j as f64;
        binom *= (nf - jf + 1.0) / jf;
        let x = d.powf(p.alpha_c) * jf * nf * p.xi / (nfact_root * p.rho_d * rd.powf(p.alpha_d));
        // x^e Gamma(-e, x) tends to 1/e as x -> 0.
        let term = if x == 0.0 {
            1.0
        } else {
            e * x.powf(e) * upper_incomplete_gamma(-e, x)?
        };
        let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
        sum += sign * binom * term;
    }
    Ok(sum.clamp(0.0, 1.0))
}

/// Admission probability, choosing the exact equal-exponent expression when
/// `|alpha_c - alpha_d| <= 1e-12` and the Gamma approximation otherwise.
pub fn p_d2d(d: f64, p: &ModeSelectionParams, geom: &CellGeometry) -> Result<f64> {
    if p.equal_exponents() {
        p_d2d_equal_alpha(d, p, geom)
    } else {
        p_d2d_general(d, p, geom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(xi_rel: f64, ac: f64, ad: f64) -> ModeSelectionParams {
        let mut p = ModeSelectionParams { alpha_c: ac, alpha_d: ad, ..Default::default() };
        p.xi = p.rho_d * xi_rel;
        p
    }

    /// Midpoint-rule integral of the admission indicator over the D2D disk.
    fn grid_oracle(d: f64, p: &ModeSelectionParams, g: &CellGeometry) -> f64 {
        let (nr, nt) = (600, 600);
        let rd = g.d2d_range;
        let mut acc = 0.0;
        for i in 0..nr {
            let r = (i as f64 + 0.5) / nr as f64 * rd;
            for j in 0..nt {
                let th = (j as f64 + 0.5) / nt as f64 * 2.0 * PI;
                let (x, y) = (d + r * th.cos(), r * th.sin());
                if is_underlay(r, x.hypot(y), p) {
                    acc += r;
                }
            }
        }
        acc * (rd / nr as f64) * (2.0 * PI / nt as f64) / (PI * rd * rd)
    }

    #[test]
    fn equal_alpha_matches_grid_in_every_branch() {
        let g = CellGeometry::default();
        for &xi in &[0.1, 1.0, 10.0] {
            let p = params(xi, 4.0, 4.0);
            let (rd1, rd2) = p.branch_radii(&g);
            for &d in &[(0.5 * rd1).max(3.0), 0.5 * (rd1 + rd2), 0.9 * rd2, rd2 + 5.0] {
                let a = p_d2d_equal_alpha(d, &p, &g).unwrap();
                let o = grid_oracle(d, &p, &g);
                assert!((a - o).abs() < 2e-3, "xi {xi} d {d}: {a} vs {o}");
            }
        }
    }

    #[test]
    fn equal_alpha_is_one_beyond_outer_radius() {
        let g = CellGeometry::default();
        for &xi in &[0.05, 0.5, 2.0, 30.0] {
            let p = params(xi, 3.0, 3.0);
            let (_, rd2) = p.branch_radii(&g);
            assert_eq!(p_d2d_equal_alpha(rd2, &p, &g).unwrap(), 1.0);
            assert_eq!(p_d2d_equal_alpha(rd2 * 1.5, &p, &g).unwrap(), 1.0);
        }
    }

    #[test]
    fn equal_alpha_is_continuous_at_branch_radii() {
        let g = CellGeometry::default();
        for &xi in &[0.1, 10.0] {
            let p = params(xi, 4.0, 4.0);
            let (rd1, rd2) = p.branch_radii(&g);
            for r in [rd1, rd2] {
                let lo = p_d2d_equal_alpha(r * (1.0 - 1e-9), &p, &g).unwrap();
                let hi = p_d2d_equal_alpha(r * (1.0 + 1e-9), &p, &g).unwrap();
                assert!((lo - hi).abs() < 1e-6, "xi {xi} r {r}: {lo} vs {hi}");
            }
        }
    }

    #[test]
    fn unit_threshold_uses_bisector() {
        let g = CellGeometry::default();
        let p = params(1.0, 4.0, 4.0);
        assert!((p_d2d_equal_alpha(0.0, &p, &g).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(p_d2d_equal_alpha(70.0, &p, &g).unwrap(), 1.0);
        let o = grid_oracle(20.0, &p, &g);
        assert!((p_d2d_equal_alpha(20.0, &p, &g).unwrap() - o).abs() < 2e-3);
    }

    #[test]
    fn monotone_in_threshold() {
        let g = CellGeometry::default();
        for &d in &[5.0, 30.0, 60.0, 200.0] {
            let mut last = -1.0;
            for k in -20..=20 {
                let xi = 10f64.powf(k as f64 / 5.0);
                let p = params(xi, 4.0, 4.0);
                let v = p_d2d_equal_alpha(d, &p, &g).unwrap();
                assert!(v >= last - 1e-12, "d {d} xi {xi}");
                last = v;
                let q = params(xi, 3.5, 4.0);
                let w = p_d2d_general(d, &q, &g).unwrap();
                assert!((0.0..=1.0).contains(&w));
            }
        }
    }

    #[test]
    fn general_vanishes_at_origin_and_saturates() {
        let g = CellGeometry::default();
        let p = params(1.0, 3.5, 4.0);
        assert!(p_d2d_general(0.0, &p, &g).unwrap().abs() < 1e-12);
        assert!((p_d2d_general(450.0, &p, &g).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn general_values_are_frozen() {
        // Reference values from a 30-digit evaluation of the same sum.
        let g = CellGeometry::default();
        let cases = [
            (200.0, 1.0, 3.5, 4.0, 1.0),
            (200.0, 0.01, 3.5, 4.0, 0.819_120_427_859_560_9),
            (20.0, 1.0, 3.5, 4.0, 0.152_935_031_808_460_9),
            (5.0, 0.1, 3.0, 4.0, 0.002_858_640_185_683_272),
            (100.0, 1.0, 2.5, 3.0, 0.993_986_986_107_909_7),
        ];
        for (d, xi, ac, ad, want) in cases {
            let got = p_d2d_general(d, &params(xi, ac, ad), &g).unwrap();
            assert!((got - want).abs() < 1e-10, "d {d} xi {xi}: {got} vs {want}");
        }
    }

    #[test]
    fn dispatch_follows_exponents() {
        let g = CellGeometry::default();
        let p = params(1.0, 4.0, 4.0);
        assert_eq!(p_d2d(20.0, &p, &g).unwrap(), p_d2d_equal_alpha(20.0, &p, &g).unwrap());
        let q = params(1.0, 3.5, 4.0);
        assert_eq!(p_d2d(20.0, &q, &g).unwrap(), p_d2d_general(20.0, &q, &g).unwrap());
        assert!(p_d2d_equal_alpha(20.0, &q, &g).is_err());
    }

    #[test]
    fn conversions() {
        assert!((dbm_to_watts(-70.0) - 1e-10).abs() < 1e-24);
        assert!((watts_to_dbm(1e-11) + 80.0).abs() < 1e-12);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-14);
        assert!((linear_to_db(100.0) - 20.0).abs() < 1e-14);
    }
}
