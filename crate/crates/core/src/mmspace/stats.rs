use serde::{Deserialize, Serialize};

use super::{BallProfile, MetricKind, PointCloudSpace, VertexId};
use crate::error::Result;

/// Empirical doubling constant `max m(B_2r(x)) / m(B_r(x))` over the samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingEstimate {
    pub value: f64,
    /// Maximizing `(center, r)`; `None` when no admissible sample existed.
    pub argmax: Option<(VertexId, f64)>,
    pub samples: usize,
    /// Radii dropped because they fell outside `[2h, diameter/2]`.
    pub skipped_radii: usize,
}

/// Empirical quasiconvexity constant `max graph length / ambient distance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiconvexityEstimate {
    pub value: f64,
    pub argmax: Option<(VertexId, VertexId)>,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceStats {
    pub doubling: f64,
    pub quasiconvexity: f64,
    pub centers: Vec<VertexId>,
    pub radii: Vec<f64>,
    pub pairs: Vec<(VertexId, VertexId)>,
}

impl SpaceStats {
    pub fn estimate(
        space: &PointCloudSpace,
        centers: &[VertexId],
        radii: &[f64],
        pairs: &[(VertexId, VertexId)],
    ) -> Result<Self> {
        let d = doubling_estimate(space, centers, radii)?;
        let q = quasiconvexity_estimate(space, pairs)?;
        Ok(Self {
            doubling: d.value,
            quasiconvexity: q.value,
            centers: centers.to_vec(),
            radii: radii.to_vec(),
            pairs: pairs.to_vec(),
        })
    }
}

pub fn doubling_estimate(
    space: &PointCloudSpace,
    centers: &[VertexId],
    radii: &[f64],
) -> Result<DoublingEstimate> {
    for &c in centers {
        space.check_vertex(c)?;
    }
    let h = space.resolution();
    let half_diam = 0.5 * space.diameter_estimate();
    let usable: Vec<f64> = radii
        .iter()
        .copied()
        .filter(|&r| r >= 2.0 * h && r <= half_diam)
        .collect();
    let mut est = DoublingEstimate {
        value: 1.0,
        argmax: None,
        samples: 0,
        skipped_radii: radii.len() - usable.len(),
    };
    if usable.is_empty() {
        return Ok(est);
    }
    for &c in centers {
        let prof = BallProfile::new(space, c);
        for &r in &usable {
            let ratio = prof.mass_open(2.0 * r) / prof.mass_open(r);
            est.samples += 1;
            if ratio > est.value || est.argmax.is_none() {
                est.value = est.value.max(ratio);
                est.argmax = Some((c, r));
            }
        }
    }
    Ok(est)
}

pub fn quasiconvexity_estimate(
    space: &PointCloudSpace,
    pairs: &[(VertexId, VertexId)],
) -> Result<QuasiconvexityEstimate> {
    for &(a, b) in pairs {
        space.check_vertex(a)?;
        space.check_vertex(b)?;
    }
    let mut est = QuasiconvexityEstimate {
        value: 1.0,
        argmax: None,
        samples: 0,
    };
    if space.metric_kind() == MetricKind::GraphPath {
        // path metric: shortest paths realize the distance
        est.samples = pairs.len();
        return Ok(est);
    }
    let mut sorted: Vec<(VertexId, VertexId)> = pairs.iter().copied().filter(|(a, b)| a != b).collect();
    sorted.sort_unstable();
    let mut cached: Option<(VertexId, Vec<f64>)> = None;
    for (a, b) in sorted {
        if cached.as_ref().map(|(s, _)| *s) != Some(a) {
            cached = Some((a, space.graph_lengths_from(a)));
        }
        let lengths = &cached.as_ref().unwrap().1;
        let ratio = lengths[b] / space.ambient_distance(a, b);
        est.samples += 1;
        if ratio > est.value || (est.argmax.is_none() && ratio >= est.value) {
            est.value = est.value.max(ratio);
            est.argmax = Some((a, b));
        }
    }
    Ok(est)
}
