//! Discrete metric measure spaces: weighted point clouds with a neighbor
//! graph and either the ambient Euclidean metric or the graph path metric.

mod io;
mod local;
mod net;
mod stats;

pub use io::{read_point_cloud, write_point_cloud, parse_point_cloud, format_point_cloud};
pub use local::{BallQuery, BoundedSearch, SpatialHash};
pub use net::delta_net;
pub use stats::{
    doubling_estimate, quasiconvexity_estimate, DoublingEstimate, QuasiconvexityEstimate,
    SpaceStats,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shortest;

pub type VertexId = usize;

/// Relative tolerance used to decide ties `d == r` in open-ball membership.
/// A distance within this relative band of `r` counts as "on the sphere" and is
/// excluded from the open ball.
pub const TIE_RTOL: f64 = 1e-9;

/// Open-ball membership test `d < r` with ties at `r` excluded robustly.
#[inline]
pub fn in_open_ball(d: f64, r: f64) -> bool {
    d < r * (1.0 - TIE_RTOL)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    AmbientEuclidean,
    GraphPath,
}

impl MetricKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::AmbientEuclidean => "ambient-euclidean",
            MetricKind::GraphPath => "graph-path",
        }
    }
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ambient-euclidean" | "euclidean" => Ok(MetricKind::AmbientEuclidean),
            "graph-path" | "graph" => Ok(MetricKind::GraphPath),
            other => Err(Error::input(format!("unknown metric kind `{other}`"))),
        }
    }
}

/// Weighted point cloud with a symmetric neighbor graph. Immutable once built.
#[derive(Clone, Debug)]
pub struct PointCloudSpace {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
    metric: MetricKind,
    adjacency: Vec<Vec<(VertexId, f64)>>,
    resolution: f64,
}

/// Incremental constructor for [`PointCloudSpace`].
#[derive(Clone, Debug)]
pub struct SpaceBuilder {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
    edges: Vec<(VertexId, VertexId, Option<f64>)>,
    metric: MetricKind,
    resolution: Option<f64>,
}

impl SpaceBuilder {
    pub fn new(dim: usize, metric: MetricKind) -> Self {
        Self {
            dim,
            coords: Vec::new(),
            weights: Vec::new(),
            edges: Vec::new(),
            metric,
            resolution: None,
        }
    }

    pub fn with_capacity(mut self, vertices: usize, edges: usize) -> Self {
        self.coords.reserve(vertices * self.dim);
        self.weights.reserve(vertices);
        self.edges.reserve(edges);
        self
    }

    pub fn resolution(mut self, h: f64) -> Self {
        self.resolution = Some(h);
        self
    }

    pub fn set_resolution(&mut self, h: f64) {
        self.resolution = Some(h);
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Appends a vertex and returns its id.
    pub fn add_vertex(&mut self, coords: &[f64], weight: f64) -> VertexId {
        assert_eq!(coords.len(), self.dim, "coordinate dimension mismatch");
        self.coords.extend_from_slice(coords);
        self.weights.push(weight);
        self.weights.len() - 1
    }

    pub fn set_weight(&mut self, id: VertexId, weight: f64) {
        self.weights[id] = weight;
    }

    /// Undirected edge; `None` length means the ambient distance.
    pub fn add_edge(&mut self, a: VertexId, b: VertexId, length: Option<f64>) {
        self.edges.push((a, b, length));
    }

    pub fn build(self) -> Result<PointCloudSpace> {
        let n = self.weights.len();
        if n == 0 {
            return Err(Error::input("space has no vertices"));
        }
        if self.dim == 0 && self.metric == MetricKind::AmbientEuclidean {
            return Err(Error::input("ambient metric requires coordinates"));
        }
        for (i, &w) in self.weights.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::input(format!("vertex {i} has non-positive or non-finite weight {w}")));
            }
        }
        if let Some(c) = self.coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::input(format!("non-finite coordinate {c}")));
        }
        let mut adjacency: Vec<Vec<(VertexId, f64)>> = vec![Vec::new(); n];
        for &(a, b, len) in &self.edges {
            if a >= n || b >= n {
                return Err(Error::input(format!("edge ({a}, {b}) references a missing vertex")));
            }
            if a == b {
                return Err(Error::input(format!("self-loop at vertex {a}")));
            }
            let len = match len {
                Some(l) => l,
                None => {
                    if self.dim == 0 {
                        return Err(Error::input(format!("edge ({a}, {b}) needs an explicit length")));
                    }
                    euclid(&self.coords[a * self.dim..(a + 1) * self.dim], &self.coords[b * self.dim..(b + 1) * self.dim])
                }
            };
            if !(len.is_finite() && len > 0.0) {
                return Err(Error::input(format!("edge ({a}, {b}) has invalid length {len}")));
            }
            if let Some(&(_, existing)) = adjacency[a].iter().find(|&&(v, _)| v == b) {
                if existing != len {
                    return Err(Error::input(format!(
                        "edge ({a}, {b}) given twice with lengths {existing} and {len}"
                    )));
                }
                continue;
            }
            adjacency[a].push((b, len));
            adjacency[b].push((a, len));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(v, _)| v);
        }
        let resolution = match self.resolution {
            Some(h) if h.is_finite() && h > 0.0 => h,
            Some(h) => return Err(Error::input(format!("invalid resolution {h}"))),
            None => {
                // median edge length, or 1 for edgeless spaces
                let mut lens: Vec<f64> = adjacency.iter().flatten().map(|&(_, l)| l).collect();
                if lens.is_empty() {
                    1.0
                } else {
                    lens.sort_by(f64::total_cmp);
                    lens[lens.len() / 2]
                }
            }
        };
        Ok(PointCloudSpace {
            dim: self.dim,
            coords: self.coords,
            weights: self.weights,
            metric: self.metric,
            adjacency,
            resolution,
        })
    }
}

#[inline]
pub(crate) fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

impl PointCloudSpace {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric_kind(&self) -> MetricKind {
        self.metric
    }

    /// Characteristic spacing `h`.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn coords(&self, i: VertexId) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: VertexId) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn neighbors(&self, i: VertexId) -> &[(VertexId, f64)] {
        &self.adjacency[i]
    }

    pub fn adjacency(&self) -> &[Vec<(VertexId, f64)>] {
        &self.adjacency
    }

    pub fn degree(&self, i: VertexId) -> usize {
        self.adjacency[i].len()
    }

    /// Undirected edges `(i, j, length)` with `i < j`, in id order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, nb)| nb.iter().filter(move |&&(j, _)| j > i).map(move |&(j, l)| (i, j, l)))
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn min_edge_length(&self) -> f64 {
        self.adjacency
            .iter()
            .flatten()
            .map(|&(_, l)| l)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_edge_length(&self) -> f64 {
        self.adjacency.iter().flatten().map(|&(_, l)| l).fold(0.0, f64::max)
    }

    pub fn check_vertex(&self, i: VertexId) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::input(format!("vertex id {i} out of range (space has {} vertices)", self.len())))
        }
    }

    pub fn ambient_distance(&self, i: VertexId, j: VertexId) -> f64 {
        euclid(self.coords(i), self.coords(j))
    }

    /// Metric distance `d(i, j)`. Under the graph metric this runs a
    /// Dijkstra search; prefer [`Self::distances_from`] for repeated queries.
    pub fn distance(&self, i: VertexId, j: VertexId) -> f64 {
        match self.metric {
            MetricKind::AmbientEuclidean => self.ambient_distance(i, j),
            MetricKind::GraphPath => {
                if i == j {
                    return 0.0;
                }
                shortest::dijkstra(&self.adjacency, &[(i, 0.0)], f64::INFINITY, |_, _, l| l).dist[j]
            }
        }
    }

    /// `d(center, ·)` for every vertex.
    pub fn distances_from(&self, center: VertexId) -> Vec<f64> {
        match self.metric {
            MetricKind::AmbientEuclidean => {
                let c = self.coords(center);
                (0..self.len()).map(|j| euclid(c, self.coords(j))).collect()
            }
            MetricKind::GraphPath => shortest::lengths_from(&self.adjacency, center),
        }
    }

    /// Shortest path length in the neighbor graph, regardless of metric kind.
    pub fn graph_lengths_from(&self, center: VertexId) -> Vec<f64> {
        shortest::lengths_from(&self.adjacency, center)
    }

    /// Open ball `B_r(center) = {i : d(center, i) < r}`.
    pub fn ball(&self, center: VertexId, r: f64) -> Result<Vec<VertexId>> {
        self.check_vertex(center)?;
        if !(r > 0.0) {
            return Err(Error::precondition(format!("ball radius must be positive, got {r}")));
        }
        let d = self.distances_from(center);
        Ok((0..self.len()).filter(|&i| in_open_ball(d[i], r)).collect())
    }

    /// Sum of weights over `set`.
    pub fn measure(&self, set: &[VertexId]) -> f64 {
        set.iter().map(|&i| self.weights[i]).sum()
    }

    /// Sum of weights over a membership mask.
    pub fn measure_mask(&self, mask: &[bool]) -> f64 {
        mask.iter()
            .zip(&self.weights)
            .filter(|(m, _)| **m)
            .map(|(_, w)| w)
            .sum()
    }

    /// Discrete local Lipschitz constant: max over neighbors of the
    /// difference quotient along the edge; isolated vertices get 0.
    pub fn local_lip(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.len(), "field length mismatch");
        self.adjacency
            .iter()
            .enumerate()
            .map(|(i, nb)| {
                nb.iter()
                    .map(|&(j, l)| (u[j] - u[i]).abs() / l)
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    /// Vertex nearest (in coordinates) to `point`; ties go to the lowest id.
    pub fn nearest_vertex(&self, point: &[f64]) -> Result<VertexId> {
        if point.len() != self.dim || self.dim == 0 {
            return Err(Error::input(format!(
                "point has dimension {}, space has {}",
                point.len(),
                self.dim
            )));
        }
        let mut best = (f64::INFINITY, 0);
        for i in 0..self.len() {
            let d = euclid(point, self.coords(i));
            if d < best.0 {
                best = (d, i);
            }
        }
        Ok(best.1)
    }

    /// Double-sweep diameter estimate (exact on boxes and trees).
    pub fn diameter_estimate(&self) -> f64 {
        let far = |from: VertexId| {
            let d = self.distances_from(from);
            let mut best = (0.0, from);
            for (i, &v) in d.iter().enumerate() {
                if v.is_finite() && v > best.0 {
                    best = (v, i);
                }
            }
            best
        };
        let (_, a) = far(0);
        far(a).0
    }

    /// Vertices whose degree is below the maximum degree of the graph.
    /// On grids these are the box faces and the rims of holes.
    pub fn boundary_mask(&self) -> Vec<bool> {
        let max_deg = self.adjacency.iter().map(Vec::len).max().unwrap_or(0);
        self.adjacency.iter().map(|nb| nb.len() < max_deg).collect()
    }

    /// Distance from `center` to the nearest boundary vertex.
    pub fn distance_to_boundary(&self, center: VertexId) -> f64 {
        let mask = self.boundary_mask();
        let d = self.distances_from(center);
        d.iter()
            .zip(&mask)
            .filter(|(_, b)| **b)
            .map(|(d, _)| *d)
            .fold(f64::INFINITY, f64::min)
    }

    /// Connected components of the neighbor graph, as a label per vertex.
    pub fn component_labels(&self) -> Vec<usize> {
        let n = self.len();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &(w, _) in &self.adjacency[v] {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Copy of the space with the listed vertices (and their edges) removed.
    /// Returns the new space and the old-to-new id map.
    pub fn without_vertices(&self, removed: &[VertexId]) -> Result<(PointCloudSpace, Vec<Option<VertexId>>)> {
        let mut gone = vec![false; self.len()];
        for &r in removed {
            self.check_vertex(r)?;
            gone[r] = true;
        }
        let mut b = SpaceBuilder::new(self.dim, self.metric).resolution(self.resolution);
        let mut map = vec![None; self.len()];
        for i in 0..self.len() {
            if !gone[i] {
                map[i] = Some(b.add_vertex(self.coords(i), self.weights[i]));
            }
        }
        for (i, j, l) in self.edges() {
            if let (Some(a), Some(c)) = (map[i], map[j]) {
                b.add_edge(a, c, Some(l));
            }
        }
        Ok((b.build()?, map))
    }

    /// Stable content hash of vertices, weights, edges and metric kind.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update(self.metric.as_str().as_bytes());
        hasher.update((self.dim as u64).to_le_bytes());
        hasher.update(self.resolution.to_le_bytes());
        for c in &self.coords {
            hasher.update(c.to_le_bytes());
        }
        for w in &self.weights {
            hasher.update(w.to_le_bytes());
        }
        for (i, j, l) in self.edges() {
            hasher.update((i as u64).to_le_bytes());
            hasher.update((j as u64).to_le_bytes());
            hasher.update(l.to_le_bytes());
        }
        hex::encode(hasher.finalize())
    }
}

/// Distances from a center sorted ascending, with prefix masses, so that
/// `m(B_r(center))` is a binary search.
#[derive(Clone, Debug)]
pub struct BallProfile {
    center: VertexId,
    dist: Vec<f64>,
    order: Vec<VertexId>,
    sorted: Vec<f64>,
    prefix: Vec<f64>,
}

impl BallProfile {
    pub fn new(space: &PointCloudSpace, center: VertexId) -> Self {
        Self::from_distances(space, center, space.distances_from(center))
    }

    pub fn from_distances(space: &PointCloudSpace, center: VertexId, dist: Vec<f64>) -> Self {
        let mut order: Vec<VertexId> = (0..dist.len()).collect();
        order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
        let sorted: Vec<f64> = order.iter().map(|&i| dist[i]).collect();
        let mut prefix = Vec::with_capacity(order.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for &i in &order {
            acc += space.weight(i);
            prefix.push(acc);
        }
        Self {
            center,
            dist,
            order,
            sorted,
            prefix,
        }
    }

    pub fn center(&self) -> VertexId {
        self.center
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    /// Number of vertices in the open ball of radius `r`.
    pub fn count_open(&self, r: f64) -> usize {
        self.sorted.partition_point(|&d| in_open_ball(d, r))
    }

    /// `m(B_r(center))`.
    pub fn mass_open(&self, r: f64) -> f64 {
        self.prefix[self.count_open(r)]
    }

    /// Members of the open ball of radius `r`, nearest first.
    pub fn ball(&self, r: f64) -> &[VertexId] {
        &self.order[..self.count_open(r)]
    }

    /// Vertices in ascending distance order.
    pub fn order(&self) -> &[VertexId] {
        &self.order
    }

    pub fn sorted_distances(&self) -> &[f64] {
        &self.sorted
    }

    /// Prefix masses aligned with [`Self::order`]; entry `k` is the mass of the
    /// first `k` vertices.
    pub fn prefix_masses(&self) -> &[f64] {
        &self.prefix
    }
}
