//! Linear-unit description of one network instance.

use crate::error::{Error, Result};
use crate::geometry::CellGeometry;
use crate::mode_selection::ModeSelectionParams;
use crate::specfun::QuadratureSettings;
use serde::{Deserialize, Serialize};

/// Which evaluation route the MGF engine takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MgfMethod {
    /// Closed forms where they exist, semi-closed one-dimensional integrals
    /// otherwise.
    #[default]
    ClosedForm,
    /// Nested numerical integration with the angular average done in closed
    /// form where that is possible.
    Quadrature,
    /// Brute-force numerical integration over every coordinate.
    Direct,
}

impl std::str::FromStr for MgfMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed_form" | "closed-form" => Ok(MgfMethod::ClosedForm),
            "quadrature" => Ok(MgfMethod::Quadrature),
            "direct" => Ok(MgfMethod::Direct),
            other => Err(Error::InvalidConfig(format!("unknown MGF method {other:?}"))),
        }
    }
}

/// Nakagami-m parameters of the cellular and D2D desired links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FadingSpec {
    pub m_cellular: u32,
    pub m_d2d: u32,
}

impl Default for FadingSpec {
    fn default() -> Self {
        FadingSpec { m_cellular: 1, m_d2d: 1 }
    }
}

impl FadingSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("m_cellular", self.m_cellular), ("m_d2d", self.m_d2d)] {
            if !(1..=5).contains(&m) {
                return Err(Error::InvalidConfig(format!("{name} must lie in 1..=5, got {m}")));
            }
        }
        Ok(())
    }
}

/// Everything the analytic model needs, in linear units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub geometry: CellGeometry,
    pub mode: ModeSelectionParams,
    /// Intensity of potential D2D users per square metre.
    pub lambda: f64,
    pub quadrature: QuadratureSettings,
    pub mgf_method: MgfMethod,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            geometry: CellGeometry::default(),
            mode: ModeSelectionParams::default(),
            lambda: 5e-5,
            quadrature: QuadratureSettings::default(),
            mgf_method: MgfMethod::ClosedForm,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.mode.validate()?;
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::InvalidConfig(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        let q = &self.quadrature;
        if !(q.rel_tol > 0.0 && q.abs_tol >= 0.0 && q.max_subdivisions >= 1) {
            return Err(Error::InvalidConfig("quadrature tolerances must be positive".into()));
        }
        Ok(())
    }

    /// Mean number of potential D2D users in the cell.
    pub fn mean_pdue_count(&self) -> f64 {
        self.lambda * self.geometry.area()
    }

    /// Largest link length that can pass admission anywhere in the cell,
    /// `min(R_D, R^(alpha_c/alpha_d) (xi/rho_d)^(1/alpha_d))`.
    pub fn effective_d2d_range(&self) -> f64 {
        let p = &self.mode;
        let r = self.geometry.cell_radius;
        let reach = r.powf(p.alpha_c / p.alpha_d) * (p.xi / p.rho_d).powf(1.0 / p.alpha_d);
        self.geometry.d2d_range.min(reach)
    }

    /// Smallest distance to the BS at which a user with link length `r_d`
    /// is admitted.
    pub fn admission_floor(&self, r_d: f64) -> f64 {
        let p = &self.mode;
        r_d.powf(p.alpha_d / p.alpha_c) * (p.rho_d / p.xi).powf(1.0 / p.alpha_c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode_selection::is_underlay;

    #[test]
    fn defaults_validate() {
        NetworkConfig::default().validate().unwrap();
        FadingSpec::default().validate().unwrap();
        assert!(FadingSpec { m_cellular: 6, m_d2d: 1 }.validate().is_err());
    }

    #[test]
    fn admission_floor_is_the_boundary() {
        let mut c = NetworkConfig::default();
        c.mode.alpha_c = 3.5;
        c.mode.xi = c.mode.rho_d * 0.3;
        let rd = 20.0;
        let f = c.admission_floor(rd);
        assert!(is_underlay(rd, f * (1.0 + 1e-9), &c.mode));
        assert!(!is_underlay(rd, f * (1.0 - 1e-9), &c.mode));
    }

    #[test]
    fn effective_range_caps_at_cell_edge() {
        let mut c = NetworkConfig::default();
        assert_eq!(c.effective_d2d_range(), 35.0);
        c.mode.xi = c.mode.rho_d * 1e-8;
        let rt = c.effective_d2d_range();
        assert!(rt < 35.0);
        assert!((c.admission_floor(rt) - 500.0).abs() < 1e-9);
    }

    #[test]
    fn method_names_parse() {
        assert_eq!("direct".parse::<MgfMethod>().unwrap(), MgfMethod::Direct);
        assert!("nope".parse::<MgfMethod>().is_err());
    }
}
