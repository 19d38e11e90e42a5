//! Cell geometry: the lens area of two disks, the displaced-receiver
//! density and the D2D link-length law.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Disk cell of radius `cell_radius` around the BS; every D2D receiver lies
/// within `d2d_range` of its transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellGeometry {
    pub cell_radius: f64,
    pub d2d_range: f64,
}

impl Default for CellGeometry {
    fn default() -> Self {
        CellGeometry { cell_radius: 500.0, d2d_range: 35.0 }
    }
}

impl CellGeometry {
    pub fn validate(&self) -> Result<()> {
        let (r, rd) = (self.cell_radius, self.d2d_range);
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidConfig(format!("cell radius must be positive, got {r}")));
        }
        if !(rd.is_finite() && rd > 0.0 && rd < r) {
            return Err(Error::InvalidConfig(format!("D2D range must lie in (0, {r}), got {rd}")));
        }
        Ok(())
    }

    /// Cell area `pi R^2`.
    pub fn area(&self) -> f64 {
        PI * self.cell_radius * self.cell_radius
    }
}

/// Area of the intersection of two disks with radii `r1`, `r2` whose centres
/// are `d` apart.
pub fn lens_area(r1: f64, r2: f64, d: f64) -> Result<f64> {
    if !(r1 >= 0.0 && r2 >= 0.0 && d >= 0.0) || !(r1.is_finite() && r2.is_finite() && d.is_finite()) {
        return Err(Error::Domain {
            function: "lens_area",
            detail: format!("r1 = {r1}, r2 = {r2}, d = {d}"),
        });
    }
    if d >= r1 + r2 {
        return Ok(0.0);
    }
    if d <= (r1 - r2).abs() {
        let r = r1.min(r2);
        return Ok(PI * r * r);
    }
    let c1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0);
    let c2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).clamp(-1.0, 1.0);
    let k = ((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)).max(0.0);
    Ok(r1 * r1 * c1.acos() + r2 * r2 * c2.acos() - 0.5 * k.sqrt())
}

/// Intensity of D2D receivers at distance `d` from the BS when transmitters
/// form a PPP of intensity `lambda` on the cell and receivers are displaced
/// uniformly within the D2D range.
pub fn drx_density(lambda: f64, geom: &CellGeometry, d: f64) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(Error::Domain { function: "drx_density", detail: format!("d = {d}") });
    }
    let (r, rd) = (geom.cell_radius, geom.d2d_range);
    if d <= r - rd {
        Ok(lambda)
    } else if d <= r + rd {
        Ok(lambda * lens_area(r, rd, d)? / (PI * rd * rd))
    } else {
        Ok(0.0)
    }
}

/// Density of the transmitter-receiver distance, uniform on the D2D disk.
pub fn d2d_distance_pdf(geom: &CellGeometry, r: f64) -> f64 {
    let rd = geom.d2d_range;
    if (0.0..=rd).contains(&r) {
        2.0 * r / (rd * rd)
    } else {
        0.0
    }
}
