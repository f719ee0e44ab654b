use serde::{Deserialize, Serialize};

use super::RegionSet;
use crate::error::{Error, Result};
use crate::mmspace::{in_open_ball, MetricKind, PointCloudSpace, SpatialHash, VertexId, TIE_RTOL};
use crate::riesz::RieszMeasure;
use crate::shortest;

/// Radii `2h, 4h, 8h, …` up to `upper`, largest first. Never empty.
pub fn radius_schedule(h: f64, upper: f64) -> Vec<f64> {
    let mut out = vec![2.0 * h];
    let mut r = 4.0 * h;
    while r <= upper * (1.0 + TIE_RTOL) {
        out.push(r);
        r *= 2.0;
    }
    out.reverse();
    out
}

/// Schedule radii whose layer stays clear of the far pole:
/// `r + h/2 ≤ margin`.
pub fn separator_radii(schedule: &[f64], margin: f64, h: f64) -> Vec<f64> {
    schedule
        .iter()
        .copied()
        .filter(|&r| r + 0.5 * h <= margin * (1.0 + TIE_RTOL))
        .collect()
}

/// Vertices of `mask` with at least one neighbor outside it.
pub(crate) fn inner_boundary(space: &PointCloudSpace, mask: &[bool]) -> Vec<VertexId> {
    (0..space.len())
        .filter(|&i| mask[i] && space.neighbors(i).iter().any(|&(j, _)| !mask[j]))
        .collect()
}

/// Distance from every vertex to the nearest of `sources`, searched out to
/// `max_r`; farther vertices get `+∞`.
pub(crate) fn distance_to_sources(space: &PointCloudSpace, sources: &[VertexId], max_r: f64) -> Vec<f64> {
    let n = space.len();
    if sources.is_empty() {
        return vec![f64::INFINITY; n];
    }
    match space.metric_kind() {
        MetricKind::GraphPath => {
            let seeds: Vec<(usize, f64)> = sources.iter().map(|&s| (s, 0.0)).collect();
            let mut d = shortest::dijkstra(space.adjacency(), &seeds, max_r, |_, _, l| l).dist;
            for v in d.iter_mut() {
                if *v > max_r {
                    *v = f64::INFINITY;
                }
            }
            d
        }
        MetricKind::AmbientEuclidean => {
            let hash = SpatialHash::of_subset(space, sources, max_r.max(space.resolution()));
            (0..n)
                .map(|i| hash.nearest_within(space.coords(i), max_r).map_or(f64::INFINITY, |(_, d)| d))
                .collect()
        }
    }
}

/// `d(z, Ω)` for every vertex, `0` on `Ω` and `+∞` beyond `max_r`. The
/// nearest point of `Ω` is sought among its vertices with a neighbor outside.
pub fn outer_distances(space: &PointCloudSpace, omega: &[bool], max_r: f64) -> Vec<f64> {
    let mut d = distance_to_sources(space, &inner_boundary(space, omega), max_r);
    for (i, &m) in omega.iter().enumerate() {
        if m {
            d[i] = 0.0;
        }
    }
    d
}

/// Outer layer `{z ∉ Ω : d(z, Ω) < r + h/2}`.
pub fn tube(space: &PointCloudSpace, omega: &[bool], r: f64) -> RegionSet {
    let reach = r + 0.5 * space.resolution();
    let d = outer_distances(space, omega, reach);
    RegionSet::from_mask((0..space.len()).map(|i| !omega[i] && in_open_ball(d[i], reach)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiContent {
    /// Minimum of the profile.
    pub estimate: f64,
    /// `(r, mass of the outer layer / r)`, in schedule order.
    pub profile: Vec<(f64, f64)>,
    pub argmin_radius: f64,
    pub diagnostic: Option<String>,
}

fn check_radii(space: &PointCloudSpace, radii: &[f64]) -> Result<f64> {
    if radii.is_empty() {
        return Err(Error::precondition("radius schedule is empty"));
    }
    let h = space.resolution();
    if let Some(r) = radii.iter().find(|&&r| !(r >= 2.0 * h * (1.0 - TIE_RTOL))) {
        return Err(Error::precondition(format!("radius {r} is below twice the resolution {h}")));
    }
    Ok(radii.iter().copied().fold(0.0, f64::max))
}

/// Outer Minkowski content of `Ω` with respect to the weights `w`:
/// `r ↦ w(layer_r(Ω)) / r` over the schedule, estimate = minimum.
fn layer_content(space: &PointCloudSpace, omega: &[bool], w: impl Fn(VertexId) -> f64, radii: &[f64]) -> Result<MinkowskiContent> {
    let top = check_radii(space, radii)?;
    let inside = omega.iter().filter(|&&m| m).count();
    if inside == 0 || inside == space.len() {
        return Ok(MinkowskiContent {
            estimate: 0.0,
            profile: radii.iter().map(|&r| (r, 0.0)).collect(),
            argmin_radius: radii[0],
            diagnostic: Some(if inside == 0 { "empty set has no boundary" } else { "whole space has no boundary" }.into()),
        });
    }
    let half = 0.5 * space.resolution();
    let d = outer_distances(space, omega, top + half);
    let mut layer: Vec<(f64, f64)> = (0..space.len())
        .filter(|&i| !omega[i] && d[i].is_finite())
        .map(|i| (d[i], w(i)))
        .filter(|p| p.1 > 0.0)
        .collect();
    layer.sort_by(|a, b| a.0.total_cmp(&b.0));
    let profile: Vec<(f64, f64)> = radii
        .iter()
        .map(|&r| {
            let mass: f64 = layer.iter().take_while(|p| in_open_ball(p.0, r + half)).map(|p| p.1).sum();
            (r, mass / r)
        })
        .collect();
    let (argmin_radius, estimate) = profile
        .iter()
        .copied()
        .fold((radii[0], f64::INFINITY), |b, p| if p.1 < b.1 { p } else { b });
    Ok(MinkowskiContent { estimate, profile, argmin_radius, diagnostic: None })
}

/// Minkowski content of `Ω` under the Riesz measure.
pub fn minkowski_content(space: &PointCloudSpace, omega: &[bool], riesz: &RieszMeasure, radii: &[f64]) -> Result<MinkowskiContent> {
    if omega.len() != space.len() {
        return Err(Error::input("set mask length differs from the space"));
    }
    layer_content(space, omega, |i| riesz.weight(i), radii)
}

/// `s ↦ m(B_s(S)) / (2s)` for a thin vertex set `S` under the base measure,
/// minimum over the schedule.
pub fn two_sided_content(space: &PointCloudSpace, set: &[VertexId], radii: &[f64]) -> Result<MinkowskiContent> {
    let top = check_radii(space, radii)?;
    if set.is_empty() {
        return Ok(MinkowskiContent {
            estimate: 0.0,
            profile: radii.iter().map(|&r| (r, 0.0)).collect(),
            argmin_radius: radii[0],
            diagnostic: Some("empty set".into()),
        });
    }
    let d = distance_to_sources(space, set, top);
    let mut near: Vec<(f64, f64)> = (0..space.len())
        .filter(|&i| d[i].is_finite())
        .map(|i| (d[i], space.weight(i)))
        .collect();
    near.sort_by(|a, b| a.0.total_cmp(&b.0));
    let profile: Vec<(f64, f64)> = radii
        .iter()
        .map(|&s| {
            let mass: f64 = near.iter().take_while(|p| in_open_ball(p.0, s)).map(|p| p.1).sum();
            (s, mass / (2.0 * s))
        })
        .collect();
    let (argmin_radius, estimate) = profile
        .iter()
        .copied()
        .fold((radii[0], f64::INFINITY), |b, p| if p.1 < b.1 { p } else { b });
    Ok(MinkowskiContent { estimate, profile, argmin_radius, diagnostic: None })
}
