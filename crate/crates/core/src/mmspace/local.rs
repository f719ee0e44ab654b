//! Bounded neighborhood queries: a uniform-cell hash for coordinates and a
//! reusable truncated Dijkstra for the graph metric.

use std::collections::{BinaryHeap, HashMap};

use super::{euclid, in_open_ball, MetricKind, PointCloudSpace, VertexId};

/// Uniform cell hash over a list of points of a fixed dimension.
#[derive(Clone, Debug)]
pub struct SpatialHash {
    dim: usize,
    cell: f64,
    points: Vec<f64>,
    ids: Vec<usize>,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl SpatialHash {
    /// `points` yields `(id, coordinates)`.
    pub fn new<'a>(dim: usize, cell: f64, points: impl IntoIterator<Item = (usize, &'a [f64])>) -> Self {
        assert!(cell > 0.0, "cell size must be positive");
        let mut out = Self {
            dim,
            cell,
            points: Vec::new(),
            ids: Vec::new(),
            cells: HashMap::new(),
        };
        for (id, p) in points {
            let slot = out.ids.len();
            out.ids.push(id);
            out.points.extend_from_slice(p);
            out.cells.entry(out.key(p)).or_default().push(slot);
        }
        out
    }

    pub fn of_space(space: &PointCloudSpace, cell: f64) -> Self {
        Self::new(space.dim(), cell, (0..space.len()).map(|i| (i, space.coords(i))))
    }

    pub fn of_subset(space: &PointCloudSpace, subset: &[VertexId], cell: f64) -> Self {
        Self::new(space.dim(), cell, subset.iter().map(|&i| (i, space.coords(i))))
    }

    fn key(&self, p: &[f64]) -> Vec<i64> {
        p.iter().map(|c| (c / self.cell).floor() as i64).collect()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Calls `f(id, distance)` for every indexed point with `distance < r`
    /// under the open-ball tie rule.
    pub fn for_each_within(&self, p: &[f64], r: f64, mut f: impl FnMut(usize, f64)) {
        self.scan(p, r, |slot, d| {
            if in_open_ball(d, r) {
                f(self.ids[slot], d);
            }
        });
    }

    /// Smallest distance from `p` to an indexed point, searched out to
    /// `max_r`; `None` if nothing lies within it.
    pub fn nearest_within(&self, p: &[f64], max_r: f64) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut reach = self.cell;
        loop {
            let r = reach.min(max_r);
            self.scan(p, r, |slot, d| {
                if d <= r && best.map_or(true, |b| d < b.1) {
                    best = Some((self.ids[slot], d));
                }
            });
            if best.is_some() || reach >= max_r {
                return best;
            }
            reach *= 2.0;
        }
    }

    fn scan(&self, p: &[f64], r: f64, mut f: impl FnMut(usize, f64)) {
        let lo: Vec<i64> = p.iter().map(|c| ((c - r) / self.cell).floor() as i64).collect();
        let hi: Vec<i64> = p.iter().map(|c| ((c + r) / self.cell).floor() as i64).collect();
        let mut key = lo.clone();
        loop {
            if let Some(slots) = self.cells.get(&key) {
                for &s in slots {
                    let q = &self.points[s * self.dim..(s + 1) * self.dim];
                    f(s, euclid(p, q));
                }
            }
            let mut k = 0;
            loop {
                if k == self.dim {
                    return;
                }
                key[k] += 1;
                if key[k] <= hi[k] {
                    break;
                }
                key[k] = lo[k];
                k += 1;
            }
        }
    }
}

/// Truncated single-source Dijkstra reusing its buffers between calls.
#[derive(Clone, Debug)]
pub struct BoundedSearch {
    dist: Vec<f64>,
    touched: Vec<usize>,
}

impl BoundedSearch {
    pub fn new(n: usize) -> Self {
        Self {
            dist: vec![f64::INFINITY; n],
            touched: Vec::new(),
        }
    }

    /// Calls `f(v, d)` for every vertex with graph distance `d < r` from
    /// `source` (open-ball tie rule), in nondecreasing order of `d`.
    pub fn for_each_within(
        &mut self,
        adj: &[Vec<(usize, f64)>],
        source: usize,
        r: f64,
        mut f: impl FnMut(usize, f64),
    ) {
        #[derive(PartialEq)]
        struct St(f64, usize);
        impl Eq for St {}
        impl PartialOrd for St {
            fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(o))
            }
        }
        impl Ord for St {
            fn cmp(&self, o: &Self) -> std::cmp::Ordering {
                o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
            }
        }
        for &v in &self.touched {
            self.dist[v] = f64::INFINITY;
        }
        self.touched.clear();
        let mut heap = BinaryHeap::new();
        self.dist[source] = 0.0;
        self.touched.push(source);
        heap.push(St(0.0, source));
        while let Some(St(d, v)) = heap.pop() {
            if d > self.dist[v] {
                continue;
            }
            f(v, d);
            for &(w, l) in &adj[v] {
                let nd = d + l;
                if nd < self.dist[w] && in_open_ball(nd, r) {
                    if self.dist[w].is_infinite() {
                        self.touched.push(w);
                    }
                    self.dist[w] = nd;
                    heap.push(St(nd, w));
                }
            }
        }
    }
}

/// Metric balls around vertices for either metric kind, sized for repeated
/// queries with radii up to `max_radius`.
#[derive(Clone, Debug)]
pub enum BallQuery {
    Ambient(SpatialHash),
    Graph(BoundedSearch),
}

impl BallQuery {
    pub fn new(space: &PointCloudSpace, max_radius: f64) -> Self {
        match space.metric_kind() {
            MetricKind::AmbientEuclidean => {
                let cell = max_radius.max(space.resolution()).max(f64::MIN_POSITIVE);
                BallQuery::Ambient(SpatialHash::of_space(space, cell))
            }
            MetricKind::GraphPath => BallQuery::Graph(BoundedSearch::new(space.len())),
        }
    }

    pub fn for_each_within(&mut self, space: &PointCloudSpace, center: VertexId, r: f64, f: impl FnMut(usize, f64)) {
        match self {
            BallQuery::Ambient(h) => h.for_each_within(space.coords(center), r, f),
            BallQuery::Graph(s) => s.for_each_within(space.adjacency(), center, r, f),
        }
    }

    /// `m(B_r(center))`.
    pub fn mass(&mut self, space: &PointCloudSpace, center: VertexId, r: f64) -> f64 {
        let mut m = 0.0;
        self.for_each_within(space, center, r, |v, _| m += space.weight(v));
        m
    }
}
