use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{check_region, RegionSet};
use crate::error::{Error, Result};
use crate::mmspace::{PointCloudSpace, VertexId, TIE_RTOL};
use crate::riesz::{maximal_function, safe_ratio};
use crate::shortest;

/// Label pops allowed before a bi-criteria search gives up.
pub const DEFAULT_LABEL_BUDGET: usize = 20_000_000;

#[derive(PartialEq)]
struct Label {
    inside: f64,
    total: f64,
    node: usize,
}

impl Eq for Label {}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .inside
            .total_cmp(&self.inside)
            .then_with(|| other.total.total_cmp(&self.total))
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Least in-region length over paths from `x` to `y` of total length at
/// most `max_length`; `None` if no such path exists.
///
/// Labels are settled in increasing in-region length, so a label at a
/// vertex is dominated exactly when an earlier settled label there was
/// shorter in total.
pub fn constrained_width(
    space: &PointCloudSpace,
    x: VertexId,
    y: VertexId,
    region: &RegionSet,
    max_length: f64,
    budget: usize,
) -> Result<Option<f64>> {
    space.check_vertex(x)?;
    space.check_vertex(y)?;
    check_region(space, region)?;
    let cap = max_length * (1.0 + TIE_RTOL);
    let adj = space.adjacency();
    let to_y = shortest::dijkstra(adj, &[(y, 0.0)], cap, |_, _, l| l).dist;
    if !(to_y[x] <= cap) {
        return Ok(None);
    }
    let mut best_total = vec![f64::INFINITY; space.len()];
    let mut heap = BinaryHeap::new();
    heap.push(Label { inside: 0.0, total: 0.0, node: x });
    let mut pops = 0usize;
    while let Some(Label { inside, total, node }) = heap.pop() {
        if total >= best_total[node] {
            continue;
        }
        best_total[node] = total;
        if node == y {
            return Ok(Some(inside));
        }
        pops += 1;
        if pops > budget {
            return Err(Error::Budget { budget });
        }
        for &(v, l) in &adj[node] {
            let t = total + l;
            if t + to_y[v] > cap || t >= best_total[v] {
                continue;
            }
            heap.push(Label {
                inside: inside + region.inside_length(node, v, l),
                total: t,
                node: v,
            });
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstacleReport {
    /// Least in-obstacle length over `L`-quasigeodesics (`∞` if none).
    pub inside_length: f64,
    /// `C · d(x, y) · (M χ_E(x) + M χ_E(y))` at scale `C · d(x, y)`.
    pub bound: f64,
    pub maximal_x: f64,
    pub maximal_y: f64,
    pub ratio: f64,
}

/// In-obstacle length of the best `L`-quasigeodesic against the
/// maximal-function bound.
pub fn obstacle_avoidance_check(
    space: &PointCloudSpace,
    x: VertexId,
    y: VertexId,
    obstacle: &RegionSet,
    constant: f64,
    truncation: f64,
) -> Result<ObstacleReport> {
    if !(constant > 0.0 && truncation >= 1.0) {
        return Err(Error::precondition(format!("need C > 0 and L >= 1, got C={constant}, L={truncation}")));
    }
    let d = space.distance(x, y);
    let inside_length = constrained_width(space, x, y, obstacle, truncation * d, DEFAULT_LABEL_BUDGET)?
        .unwrap_or(f64::INFINITY);
    let chi: Vec<f64> = obstacle.mask().iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
    let scale = constant * d;
    let maximal_x = maximal_function(space, &chi, scale, x)?;
    let maximal_y = maximal_function(space, &chi, scale, y)?;
    let bound = constant * d * (maximal_x + maximal_y);
    Ok(ObstacleReport {
        inside_length,
        bound,
        maximal_x,
        maximal_y,
        ratio: safe_ratio(inside_length, bound),
    })
}
