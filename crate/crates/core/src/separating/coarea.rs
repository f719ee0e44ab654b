use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::position::margin_from;
use super::{minkowski_content, radius_schedule, separator_radii, PositionField};
use crate::error::{Error, Result};
use crate::mmspace::PointCloudSpace;
use crate::riesz::RieszMeasure;

pub const COAREA_TOLERANCE: f64 = 0.15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoareaReport {
    /// Riemann sum of the contents of `{pos ≤ t}` over `(0, width)`.
    pub lhs: f64,
    /// `∫ lip pos dm^L`.
    pub rhs: f64,
    /// `rhs − lhs`.
    pub margin: f64,
    /// Riesz mass of the region.
    pub region_mass: f64,
    /// `(t, content)` at the grid midpoints.
    pub levels: Vec<(f64, f64)>,
    pub passed: bool,
}

/// Integrated sublevel contents against the integrated local Lipschitz
/// constant of the field.
pub fn coarea_check(space: &PointCloudSpace, field: &PositionField, riesz: &RieszMeasure) -> Result<CoareaReport> {
    if field.values.len() != space.len() {
        return Err(Error::input("field length differs from the space"));
    }
    let h = space.resolution();
    let width = field.width();
    let region_mass = riesz.mass_of_mask(field.region.mask());
    let finite: Vec<f64> = field.values.iter().map(|&v| if v.is_finite() { v } else { 0.0 }).collect();
    let rhs = riesz.integrate(&space.local_lip(&finite));
    if !(width > 0.0) {
        return Ok(CoareaReport { lhs: 0.0, rhs, margin: rhs, region_mass, levels: Vec::new(), passed: true });
    }
    let steps = (width / h).ceil().max(1.0) as usize;
    let dt = width / steps as f64;
    let schedule = radius_schedule(h, riesz.pole_distance() / 4.0);
    let dx = space.distances_from(field.source);
    let dy = space.distances_from(field.target);
    let levels = (0..steps)
        .into_par_iter()
        .map(|i| {
            let t = (i as f64 + 0.5) * dt;
            let omega = field.sublevel(t);
            let mut radii = separator_radii(&schedule, margin_from(&dx, &dy, &omega), h);
            if radii.is_empty() {
                radii.push(2.0 * h);
            }
            minkowski_content(space, &omega, riesz, &radii).map(|c| (t, c.estimate))
        })
        .collect::<Result<Vec<_>>>()?;
    let lhs: f64 = levels.iter().map(|p| p.1 * dt).sum();
    let margin = rhs - lhs;
    Ok(CoareaReport {
        lhs,
        rhs,
        margin,
        region_mass,
        levels,
        passed: margin >= -COAREA_TOLERANCE * rhs,
    })
}
