//! Widths and separating ratios of vertex sets, position fields and their
//! level-set separators, Minkowski contents, and the checks built on them.

mod coarea;
mod isoperimetric;
mod minkowski;
mod obstacle;
mod position;
pub mod region;
mod sandwich;

pub use coarea::{coarea_check, CoareaReport, COAREA_TOLERANCE};
pub use isoperimetric::{relative_isoperimetric_check, IsoperimetricReport};
pub use minkowski::{
    minkowski_content, outer_distances, radius_schedule, separator_radii, two_sided_content, tube, MinkowskiContent,
};
pub use obstacle::{constrained_width, obstacle_avoidance_check, ObstacleReport, DEFAULT_LABEL_BUDGET};
pub use position::{
    level_crossing_check, level_set_separator, lip_bound_check, position_function, LipCheck, PositionField,
    SeparatingSet,
};
pub(crate) use position::margin_from;
pub use sandwich::{sandwich_check, standard_candidates, CandidateSuite, SandwichReport, SANDWICH_TOLERANCE};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mmspace::{PointCloudSpace, VertexId};
use crate::riesz::{riesz_measure, RieszMeasure};
use crate::shortest;

/// Vertex set stored as a membership mask.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegionSet {
    mask: Vec<bool>,
}

impl RegionSet {
    pub fn empty(n: usize) -> Self {
        Self { mask: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        Self { mask: vec![true; n] }
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        Self { mask }
    }

    pub fn from_vertices(n: usize, ids: &[VertexId]) -> Result<Self> {
        let mut mask = vec![false; n];
        for &i in ids {
            if i >= n {
                return Err(Error::input(format!("region vertex {i} out of range")));
            }
            mask[i] = true;
        }
        Ok(Self { mask })
    }

    pub fn ball(space: &PointCloudSpace, center: VertexId, r: f64) -> Result<Self> {
        Self::from_vertices(space.len(), &space.ball(center, r)?)
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.mask[v]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn members(&self) -> Vec<VertexId> {
        (0..self.mask.len()).filter(|&i| self.mask[i]).collect()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_mask(self.mask.iter().zip(&other.mask).map(|(a, b)| *a || *b).collect())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self::from_mask(self.mask.iter().zip(&other.mask).map(|(a, b)| *a && *b).collect())
    }

    pub fn complement(&self) -> Self {
        Self::from_mask(self.mask.iter().map(|a| !a).collect())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.mask.iter().zip(&other.mask).all(|(a, b)| !a || *b)
    }

    /// In-region length of the edge `(u, v)`: `ℓ · (χ(u) + χ(v)) / 2`.
    pub fn inside_length(&self, u: VertexId, v: VertexId, len: f64) -> f64 {
        match (self.mask[u], self.mask[v]) {
            (true, true) => len,
            (false, false) => 0.0,
            _ => 0.5 * len,
        }
    }
}

/// Which curves the width infimum runs over.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "over")]
pub enum WidthOver {
    AllPaths,
    Quasigeodesics { truncation: f64 },
}

fn check_region(space: &PointCloudSpace, region: &RegionSet) -> Result<()> {
    if region.len() != space.len() {
        return Err(Error::input(format!(
            "region has {} entries, space has {} vertices",
            region.len(),
            space.len()
        )));
    }
    Ok(())
}

/// Minimal in-region length over neighbor-graph paths from `x` to `y`.
pub fn width(space: &PointCloudSpace, x: VertexId, y: VertexId, region: &RegionSet) -> Result<f64> {
    space.check_vertex(x)?;
    space.check_vertex(y)?;
    check_region(space, region)?;
    let sp = shortest::dijkstra(space.adjacency(), &[(x, 0.0)], f64::INFINITY, |u, v, l| {
        region.inside_length(u, v, l)
    });
    let w = sp.dist[y];
    if !w.is_finite() {
        return Err(Error::input(format!("vertices {x} and {y} are not connected")));
    }
    Ok(w)
}

/// Width over all paths or over paths of length at most `L·d(x, y)`.
pub fn width_over(space: &PointCloudSpace, x: VertexId, y: VertexId, region: &RegionSet, over: WidthOver) -> Result<f64> {
    match over {
        WidthOver::AllPaths => width(space, x, y, region),
        WidthOver::Quasigeodesics { truncation } => {
            let bound = truncation * space.distance(x, y);
            Ok(constrained_width(space, x, y, region, bound, DEFAULT_LABEL_BUDGET)?.unwrap_or(f64::INFINITY))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatingRatio {
    pub ratio: f64,
    pub mass: f64,
    pub width: f64,
}

/// `SR(A) = m^L(A) / width(A)`, `+∞` when the width vanishes.
pub fn separating_ratio(space: &PointCloudSpace, x: VertexId, y: VertexId, truncation: f64, region: &RegionSet) -> Result<SeparatingRatio> {
    let riesz = riesz_measure(space, x, y, truncation)?;
    separating_ratio_with(space, &riesz, region)
}

pub fn separating_ratio_with(space: &PointCloudSpace, riesz: &RieszMeasure, region: &RegionSet) -> Result<SeparatingRatio> {
    let (x, y) = riesz.poles();
    let w = width(space, x, y, region)?;
    let mass = riesz.mass_of_mask(region.mask());
    let ratio = if w > 0.0 { mass / w } else { f64::INFINITY };
    Ok(SeparatingRatio { ratio, mass, width: w })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub infimum: f64,
    pub argmin: usize,
    pub ratios: Vec<f64>,
}

/// Minimum separating ratio over a candidate list.
pub fn set_connectedness_scan(space: &PointCloudSpace, riesz: &RieszMeasure, candidates: &[RegionSet]) -> Result<ScanResult> {
    if candidates.is_empty() {
        return Err(Error::precondition("candidate list is empty"));
    }
    let ratios = candidates
        .par_iter()
        .map(|a| separating_ratio_with(space, riesz, a).map(|r| r.ratio))
        .collect::<Result<Vec<f64>>>()?;
    let (argmin, infimum) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, r)| if r < best.1 { (i, r) } else { best });
    Ok(ScanResult { infimum, argmin, ratios })
}
