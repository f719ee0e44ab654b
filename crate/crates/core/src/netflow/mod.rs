//! δ-net capacity graphs between two poles, max-flow / min-cut and the
//! decomposition of a flow into a weighted family of net paths.

mod maxflow;
mod pencil;

pub use maxflow::{max_flow, min_cut, Cut, Flow};
pub use pencil::{flow_to_pencil, pencil_inequality_ratio, DiscretePencil, PencilPath};

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mmspace::{delta_net, in_open_ball, BallQuery, MetricKind, PointCloudSpace, SpatialHash, VertexId};
use crate::riesz::RieszKernel;

/// Undirected net edge carrying one capacity per direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetEdge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
    /// Capacity of the arc `a → b`.
    pub forward: f64,
    /// Capacity of the arc `b → a`.
    pub backward: f64,
}

impl NetEdge {
    /// Capacity of the arc leaving `from`.
    pub fn capacity_from(&self, from: usize) -> f64 {
        if from == self.a {
            self.forward
        } else {
            self.backward
        }
    }

    pub fn other(&self, v: usize) -> usize {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetGraph {
    pub delta: f64,
    pub truncation: f64,
    /// Space ids of the net points; local index 0 is the source, 1 the sink.
    pub points: Vec<VertexId>,
    /// Flattened coordinates of the net points (empty for synthetic graphs).
    pub coords: Vec<f64>,
    pub dim: usize,
    pub edges: Vec<NetEdge>,
    pub source: usize,
    pub sink: usize,
    /// Set when `δ ≥ d(x, y)/4`.
    pub coarse_scale: bool,
    #[serde(skip)]
    incidence: Vec<Vec<usize>>,
}

impl NetGraph {
    /// Graph from explicit edges `(a, b, length, cap a→b, cap b→a)` on
    /// local vertices `0..n`.
    pub fn from_edges(n: usize, source: usize, sink: usize, edges: &[(usize, usize, f64, f64, f64)]) -> Result<Self> {
        if source >= n || sink >= n || source == sink {
            return Err(Error::input("source and sink must be distinct vertices"));
        }
        let edges = edges
            .iter()
            .map(|&(a, b, length, forward, backward)| NetEdge {
                a,
                b,
                length,
                forward,
                backward,
            })
            .collect();
        let g = Self::assemble(0.0, 1.0, (0..n).collect(), Vec::new(), 0, edges, source, sink, false)?;
        Ok(g)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        delta: f64,
        truncation: f64,
        points: Vec<VertexId>,
        coords: Vec<f64>,
        dim: usize,
        edges: Vec<NetEdge>,
        source: usize,
        sink: usize,
        coarse_scale: bool,
    ) -> Result<Self> {
        let n = points.len();
        let mut incidence = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            if e.a >= n || e.b >= n || e.a == e.b {
                return Err(Error::input(format!("bad edge ({}, {})", e.a, e.b)));
            }
            for c in [e.forward, e.backward] {
                if !(c >= 0.0 && c.is_finite()) {
                    return Err(Error::input(format!("capacity {c} on edge ({}, {})", e.a, e.b)));
                }
            }
            incidence[e.a].push(k);
            incidence[e.b].push(k);
        }
        Ok(Self {
            delta,
            truncation,
            points,
            coords,
            dim,
            edges,
            source,
            sink,
            coarse_scale,
            incidence,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Edge indices incident to local vertex `v`.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    pub fn point_coords(&self, v: usize) -> &[f64] {
        &self.coords[v * self.dim..(v + 1) * self.dim]
    }

    /// Local vertices reachable from the source along edges.
    pub fn source_component(&self) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([self.source]);
        seen[self.source] = true;
        while let Some(v) = queue.pop_front() {
            for &k in &self.incidence[v] {
                let w = self.edges[k].other(v);
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// `C(S) = Σ` of arc capacities leaving `S`.
    pub fn cut_value(&self, in_s: &[bool]) -> f64 {
        self.edges
            .iter()
            .map(|e| match (in_s[e.a], in_s[e.b]) {
                (true, false) => e.forward,
                (false, true) => e.backward,
                _ => 0.0,
            })
            .sum()
    }

    /// Plain-text dump: net points with coordinates, then edges with both
    /// capacities and the length.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# net delta {} truncation {}", self.delta, self.truncation).unwrap();
        writeln!(out, "# source {} sink {}", self.source, self.sink).unwrap();
        for (i, &p) in self.points.iter().enumerate() {
            write!(out, "v {i} {p}").unwrap();
            if self.dim > 0 && !self.coords.is_empty() {
                for c in self.point_coords(i) {
                    write!(out, " {c}").unwrap();
                }
            }
            writeln!(out).unwrap();
        }
        for e in &self.edges {
            writeln!(out, "e {} {} {} {} {}", e.a, e.b, e.forward, e.backward, e.length).unwrap();
        }
        out
    }

    /// Restores the incidence lists after deserialization.
    pub fn rebuild_incidence(&mut self) {
        let mut incidence = vec![Vec::new(); self.points.len()];
        for (k, e) in self.edges.iter().enumerate() {
            incidence[e.a].push(k);
            incidence[e.b].push(k);
        }
        self.incidence = incidence;
    }
}

/// Pole cell term: the kernel mass of `B_δ(pole)` over `δ`, standing in for
/// the undefined `m(B_δ(p)) · d(p, p)/m(B_0(p))`.
fn pole_cell_term(space: &PointCloudSpace, query: &mut BallQuery, pole: &crate::riesz::PoleKernel, delta: f64) -> f64 {
    let mut mass = 0.0;
    query.for_each_within(space, pole.pole(), delta, |z, _| mass += pole.value(z) * space.weight(z));
    mass / delta
}

/// δ-net capacity graph between `x` and `y`.
///
/// Net points are kept inside the support ball `B_{2L d(x,y)}(x)`. Edges join
/// net points at distance `< 4δ`. The arc `i → j` has capacity
/// `m(B_δ(i))/δ · R_x(i) + m(B_δ(j))/δ · R_y(j)`; at a pole the product is
/// replaced by the kernel mass of its δ-ball.
pub fn build_net_graph(space: &PointCloudSpace, x: VertexId, y: VertexId, delta: f64, truncation: f64) -> Result<NetGraph> {
    let kernel = RieszKernel::new(space, x, y)?;
    build_net_graph_with(space, &kernel, delta, truncation)
}

pub fn build_net_graph_with(space: &PointCloudSpace, kernel: &RieszKernel, delta: f64, truncation: f64) -> Result<NetGraph> {
    let x = kernel.px.pole();
    let y = kernel.py.pole();
    if !(truncation >= 1.0 && truncation.is_finite()) {
        return Err(Error::precondition(format!("truncation L must be >= 1, got {truncation}")));
    }
    let dxy = kernel.pole_distance();
    let raw = delta_net(space, delta, x, y)?;
    let support = 2.0 * truncation * dxy;
    let points: Vec<VertexId> = raw
        .into_iter()
        .filter(|&p| p == x || p == y || in_open_ball(kernel.px.distance(p), support))
        .collect();
    let n = points.len();

    let mut query = BallQuery::new(space, delta);
    let cell_term = |query: &mut BallQuery, p: VertexId, pole: &crate::riesz::PoleKernel| {
        if p == pole.pole() {
            pole_cell_term(space, query, pole, delta)
        } else {
            query.mass(space, p, delta) / delta * pole.value(p)
        }
    };
    let out_term: Vec<f64> = points.iter().map(|&p| cell_term(&mut query, p, &kernel.px)).collect();
    let in_term: Vec<f64> = points.iter().map(|&p| cell_term(&mut query, p, &kernel.py)).collect();

    let mut local = vec![usize::MAX; space.len()];
    for (i, &p) in points.iter().enumerate() {
        local[p] = i;
    }
    let reach = 4.0 * delta;
    let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
    match space.metric_kind() {
        MetricKind::AmbientEuclidean => {
            let hash = SpatialHash::of_subset(space, &points, reach);
            for (i, &p) in points.iter().enumerate() {
                hash.for_each_within(space.coords(p), reach, |q, d| {
                    let j = local[q];
                    if j > i {
                        pairs.push((i, j, d));
                    }
                });
            }
        }
        MetricKind::GraphPath => {
            let mut search = crate::mmspace::BoundedSearch::new(space.len());
            for (i, &p) in points.iter().enumerate() {
                search.for_each_within(space.adjacency(), p, reach, |q, d| {
                    let j = local[q];
                    if j != usize::MAX && j > i {
                        pairs.push((i, j, d));
                    }
                });
            }
        }
    }
    pairs.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let edges: Vec<NetEdge> = pairs
        .into_iter()
        .map(|(a, b, length)| NetEdge {
            a,
            b,
            length,
            forward: out_term[a] + in_term[b],
            backward: out_term[b] + in_term[a],
        })
        .collect();

    let mut coords = Vec::with_capacity(n * space.dim());
    for &p in &points {
        coords.extend_from_slice(space.coords(p));
    }
    let coarse = delta >= dxy / 4.0;
    let g = NetGraph::assemble(delta, truncation, points, coords, space.dim(), edges, 0, 1, coarse)?;
    if !g.source_component()[g.sink] {
        return Err(Error::NoDiscretePath {
            delta,
            source_id: x,
            sink_id: y,
        });
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn three_point_path_capacities_by_hand() {
        // segment with 21 points, x = 0, y = 1, net at δ = 0.45: {0, 1, 0.5}
        let s = gallery::segment(21).unwrap();
        let g = build_net_graph(&s, 0, 20, 0.45, 1.0).unwrap();
        assert_eq!(g.points, vec![0, 20, 10]);
        assert!(g.coarse_scale);
        // edges: all pairs within 1.8
        assert_eq!(g.edges.len(), 3);
        // m(B_δ(mid)) = 17/21 and R_x(mid) = 0.5 / (10/21): mid term 17/9.
        // m(B_δ(x)) = 9/21 and R_y(x) = 21/20: term 1.
        // Pole cell: eight points each with kernel mass 1/20, over δ: 8/9.
        let find = |a: usize, b: usize| g.edges.iter().find(|e| e.a == a && e.b == b).unwrap();
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        let xm = find(0, 2);
        assert!(close(xm.forward, 25.0 / 9.0) && close(xm.backward, 26.0 / 9.0), "{xm:?}");
        let ym = find(1, 2);
        assert!(close(ym.forward, 1.0 + 17.0 / 9.0) && close(ym.backward, 17.0 / 9.0 + 8.0 / 9.0), "{ym:?}");
        let xy = find(0, 1);
        assert!(close(xy.forward, 16.0 / 9.0) && close(xy.backward, 2.0), "{xy:?}");
    }

    #[test]
    fn isolated_cluster_is_disconnected() {
        let mut b = crate::mmspace::SpaceBuilder::new(1, MetricKind::AmbientEuclidean);
        for i in 0..5 {
            b.add_vertex(&[i as f64 * 0.1], 1.0);
        }
        for i in 0..5 {
            b.add_vertex(&[10.0 + i as f64 * 0.1], 1.0);
        }
        let s = b.build().unwrap();
        let err = build_net_graph(&s, 0, 9, 0.15, 1.0).unwrap_err();
        assert!(matches!(err, Error::NoDiscretePath { .. }), "{err}");
        assert!(matches!(build_net_graph(&s, 0, 2, 0.5, 1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn edge_rule_matches_pair_scan() {
        let s = gallery::euclidean_grid(2, 1.6, 0.02).unwrap();
        let x = s.nearest_vertex(&[-0.5, 0.0]).unwrap();
        let y = s.nearest_vertex(&[0.5, 0.0]).unwrap();
        let g = build_net_graph(&s, x, y, 0.1, 2.0).unwrap();
        assert!(!g.coarse_scale);
        let mut brute = 0;
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                if s.distance(g.points[i], g.points[j]) < 0.4 * (1.0 - 1e-9) {
                    brute += 1;
                }
            }
        }
        assert_eq!(g.edges.len(), brute);
        for e in &g.edges {
            assert!(e.forward > 0.0 && e.backward > 0.0 && e.forward.is_finite());
        }
    }

    #[test]
    fn graph_metric_edges_match_ambient_on_glued_planes() {
        let gp = gallery::glued_planes(0, 1.0, 0.05).unwrap();
        let x = gp.vertex_at(0, -0.4, 0.0);
        let y = gp.vertex_at(1, 0.4, 0.0);
        let g = build_net_graph(&gp.space, x, y, 0.1, 2.0).unwrap();
        let mut brute = 0;
        for i in 0..g.len() {
            let d = gp.space.distances_from(g.points[i]);
            for j in i + 1..g.len() {
                if d[g.points[j]] < 0.4 * (1.0 - 1e-9) {
                    brute += 1;
                }
            }
        }
        assert_eq!(g.edges.len(), brute);
    }

    #[test]
    fn dump_lists_everything() {
        let s = gallery::segment(21).unwrap();
        let g = build_net_graph(&s, 0, 20, 0.2, 1.0).unwrap();
        let text = g.dump();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), g.len());
        assert_eq!(text.lines().filter(|l| l.starts_with("e ")).count(), g.edges.len());
    }
}
