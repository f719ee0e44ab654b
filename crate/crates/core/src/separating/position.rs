use serde::{Deserialize, Serialize};

use super::{check_region, RegionSet};
use crate::error::{Error, Result};
use crate::mmspace::{PointCloudSpace, VertexId};
use crate::shortest;

/// In-region distance from `x`, with the width at `y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositionField {
    pub values: Vec<f64>,
    pub source: VertexId,
    pub target: VertexId,
    pub region: RegionSet,
}

impl PositionField {
    pub fn width(&self) -> f64 {
        self.values[self.target]
    }

    pub fn value(&self, z: VertexId) -> f64 {
        self.values[z]
    }

    /// `{pos ≤ t}` as a mask.
    pub fn sublevel(&self, t: f64) -> Vec<bool> {
        self.values.iter().map(|&p| p <= t).collect()
    }
}

/// Single-source shortest in-region distance from `x`; unreachable
/// vertices get `+∞`.
pub fn position_function(space: &PointCloudSpace, x: VertexId, y: VertexId, region: &RegionSet) -> Result<PositionField> {
    space.check_vertex(x)?;
    space.check_vertex(y)?;
    check_region(space, region)?;
    let sp = shortest::dijkstra(space.adjacency(), &[(x, 0.0)], f64::INFINITY, |u, v, l| {
        region.inside_length(u, v, l)
    });
    if !sp.dist[y].is_finite() {
        return Err(Error::input(format!("vertices {x} and {y} are not connected")));
    }
    Ok(PositionField {
        values: sp.dist,
        source: x,
        target: y,
        region: region.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipCheck {
    pub max_lip: f64,
    /// Over vertices with no neighbor in the region (and not in it).
    pub max_lip_outside: f64,
    pub bound: f64,
    pub passed: bool,
}

/// Local Lipschitz constants of the field against `Λ̂`, with grid slack
/// `Λ̂ · 2h / (shortest edge)`.
pub fn lip_bound_check(space: &PointCloudSpace, field: &PositionField, lambda: f64) -> Result<LipCheck> {
    if field.values.len() != space.len() {
        return Err(Error::input("field length differs from the space"));
    }
    let finite: Vec<f64> = field.values.iter().map(|&v| if v.is_finite() { v } else { 0.0 }).collect();
    let lip = space.local_lip(&finite);
    let region = field.region.mask();
    let mut max_lip: f64 = 0.0;
    let mut max_out: f64 = 0.0;
    for i in 0..space.len() {
        if !field.values[i].is_finite() {
            continue;
        }
        max_lip = max_lip.max(lip[i]);
        let touches = region[i] || space.neighbors(i).iter().any(|&(j, _)| region[j]);
        if !touches {
            max_out = max_out.max(lip[i]);
        }
    }
    let min_edge = space.min_edge_length();
    let slack = if min_edge > 0.0 { 2.0 * space.resolution() / min_edge } else { 0.0 };
    let bound = lambda * (1.0 + slack);
    Ok(LipCheck {
        max_lip,
        max_lip_outside: max_out,
        bound,
        passed: max_lip <= bound && max_out <= 1e-12,
    })
}

/// Sublevel set `{pos ≤ t}` with its margin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatingSet {
    pub members: RegionSet,
    pub level: f64,
    /// `min(d(x, Ω^c), d(y, Ω))`.
    pub margin: f64,
    pub source: VertexId,
    pub target: VertexId,
    /// `x ∈ Ω`, `y ∉ Ω` and margin at least `2h`.
    pub valid: bool,
}

impl SeparatingSet {
    /// Margin and validity of an arbitrary vertex set.
    pub fn from_mask(space: &PointCloudSpace, x: VertexId, y: VertexId, mask: Vec<bool>, level: f64) -> Self {
        let margin = separation_margin(space, x, y, &mask);
        let valid = mask[x] && !mask[y] && margin >= 2.0 * space.resolution() * (1.0 - crate::mmspace::TIE_RTOL);
        Self {
            members: RegionSet::from_mask(mask),
            level,
            margin,
            source: x,
            target: y,
            valid,
        }
    }
}

pub(crate) fn separation_margin(space: &PointCloudSpace, x: VertexId, y: VertexId, mask: &[bool]) -> f64 {
    if !mask[x] || mask[y] {
        return 0.0;
    }
    margin_from(&space.distances_from(x), &space.distances_from(y), mask)
}

/// `min(d(x, Ω^c), d(y, Ω))` from precomputed pole distances.
pub(crate) fn margin_from(dx: &[f64], dy: &[f64], mask: &[bool]) -> f64 {
    let mut to_out = f64::INFINITY;
    let mut to_in = f64::INFINITY;
    for i in 0..mask.len() {
        if mask[i] {
            to_in = to_in.min(dy[i]);
        } else {
            to_out = to_out.min(dx[i]);
        }
    }
    to_out.min(to_in)
}

/// `Ω_t = {pos ≤ t}` for `0 < t < pos(y)`.
pub fn level_set_separator(space: &PointCloudSpace, field: &PositionField, t: f64) -> Result<SeparatingSet> {
    let w = field.width();
    if !(t > 0.0 && t < w) {
        return Err(Error::precondition(format!("level {t} outside (0, {w})")));
    }
    Ok(SeparatingSet::from_mask(space, field.source, field.target, field.sublevel(t), t))
}

/// For each path from `x` to `y`, whether it has an edge crossing level `t`
/// with an endpoint in the region whose position is within one edge
/// length of `t`.
pub fn level_crossing_check(space: &PointCloudSpace, field: &PositionField, t: f64, paths: &[Vec<VertexId>]) -> Vec<bool> {
    let pos = &field.values;
    let region = field.region.mask();
    paths
        .iter()
        .map(|p| {
            p.windows(2).any(|e| {
                let (u, v) = (e[0], e[1]);
                let (lo, hi) = if pos[u] <= pos[v] { (u, v) } else { (v, u) };
                if !(pos[lo] <= t && t < pos[hi]) {
                    return false;
                }
                let len = space.neighbors(u).iter().find(|&&(j, _)| j == v).map_or(f64::INFINITY, |&(_, l)| l);
                [u, v].iter().any(|&z| region[z] && (pos[z] - t).abs() <= len)
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{self, GridBuilder};
    use crate::mmspace::MetricKind;
    use crate::modulus::enumerate_quasigeodesics;

    fn segment_field(a: f64, b: f64) -> (PointCloudSpace, PositionField) {
        let s = gallery::segment(101).unwrap();
        let region = RegionSet::from_mask((0..s.len()).map(|i| {
            let z = s.coords(i)[0];
            z >= a - 1e-9 && z <= b + 1e-9
        }).collect());
        let f = position_function(&s, 0, 100, &region).unwrap();
        (s, f)
    }

    #[test]
    fn empty_region_is_flat() {
        let s = gallery::euclidean_grid(2, 1.0, 0.1).unwrap();
        let f = position_function(&s, 0, s.len() - 1, &RegionSet::empty(s.len())).unwrap();
        assert!(f.values.iter().all(|&v| v == 0.0));
        let c = lip_bound_check(&s, &f, 1.0).unwrap();
        assert_eq!((c.max_lip, c.max_lip_outside), (0.0, 0.0));
    }

    #[test]
    fn segment_closed_form() {
        let (s, f) = segment_field(0.3, 0.6);
        for i in 0..s.len() {
            let z = s.coords(i)[0];
            let want = (z - 0.3).clamp(0.0, 0.3);
            assert!((f.values[i] - want).abs() <= 0.01 + 1e-12, "{z}: {}", f.values[i]);
        }
        assert!((f.width() - 0.3).abs() <= 0.01 + 1e-12);
        let c = lip_bound_check(&s, &f, 1.0).unwrap();
        assert!((c.max_lip - 1.0).abs() < 1e-9);
        assert_eq!(c.max_lip_outside, 0.0);
        assert!(c.passed);
        let sep = level_set_separator(&s, &f, 0.1).unwrap();
        let top = sep.members.members().into_iter().map(|i| s.coords(i)[0]).fold(0.0, f64::max);
        assert!((top - 0.4).abs() <= 0.01 + 1e-12);
        assert!(sep.valid);
        assert!(level_set_separator(&s, &f, 0.0).is_err());
        assert!(level_set_separator(&s, &f, f.width()).is_err());
    }

    #[test]
    fn half_plane_on_grid_path_metric_is_one_lipschitz() {
        let s = GridBuilder::new(2, 1.0, 0.05).metric(MetricKind::GraphPath).build().unwrap();
        let x = s.nearest_vertex(&[-0.4, 0.0]).unwrap();
        let y = s.nearest_vertex(&[0.4, 0.0]).unwrap();
        let a = RegionSet::from_mask((0..s.len()).map(|i| s.coords(i)[0] > 0.0).collect());
        let f = position_function(&s, x, y, &a).unwrap();
        let c = lip_bound_check(&s, &f, 1.0).unwrap();
        assert!(c.max_lip <= 1.0 + 1e-12, "{}", c.max_lip);
    }

    #[test]
    fn every_enumerated_path_crosses_in_the_region() {
        let s = gallery::euclidean_grid(2, 0.6, 0.05).unwrap();
        let x = s.nearest_vertex(&[-0.2, 0.0]).unwrap();
        let y = s.nearest_vertex(&[0.2, 0.0]).unwrap();
        let a = RegionSet::from_mask((0..s.len()).map(|i| s.coords(i)[0].abs() < 0.08).collect());
        let f = position_function(&s, x, y, &a).unwrap();
        let fam = enumerate_quasigeodesics(&s, x, y, 1.5, 200).unwrap();
        let w = f.width();
        for t in [0.25 * w, 0.5 * w, 0.9 * w] {
            assert!(level_crossing_check(&s, &f, t, &fam.paths).iter().all(|&ok| ok));
        }
    }

    #[test]
    fn sublevels_are_nested() {
        let (_, f) = segment_field(0.2, 0.9);
        let a = f.sublevel(0.1);
        let b = f.sublevel(0.3);
        assert!(a.iter().zip(&b).all(|(p, q)| !p || *q));
    }
}
