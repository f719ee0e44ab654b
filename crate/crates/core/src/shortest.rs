//! Single- and multi-source Dijkstra over adjacency lists with caller-chosen
//! nonnegative edge weights. Shared by the metric, width and position-function
//! computations.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

pub type Adjacency = [Vec<(usize, f64)>];

#[derive(Copy, Clone, Debug)]
struct State {
    cost: f64,
    node: usize,
}

impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on cost, ties broken by node id for determinism
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug)]
pub struct ShortestPaths {
    pub dist: Vec<f64>,
    pub pred: Vec<Option<usize>>,
}

impl ShortestPaths {
    /// Vertex sequence from the source set to `target`, if reachable.
    pub fn path_to(&self, target: usize) -> Option<Vec<usize>> {
        if !self.dist[target].is_finite() {
            return None;
        }
        let mut path = vec![target];
        let mut cur = target;
        while let Some(p) = self.pred[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }
}

/// Dijkstra from a set of `(source, initial cost)` pairs. `weight(u, v, len)`
/// must be nonnegative. Vertices farther than `bound` keep `f64::INFINITY`.
pub fn dijkstra<W>(adj: &Adjacency, sources: &[(usize, f64)], bound: f64, weight: W) -> ShortestPaths
where
    W: Fn(usize, usize, f64) -> f64,
{
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![None; n];
    let mut heap = BinaryHeap::new();
    for &(s, c) in sources {
        if c < dist[s] {
            dist[s] = c;
            heap.push(State { cost: c, node: s });
        }
    }
    while let Some(State { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        for &(next, len) in &adj[node] {
            let w = weight(node, next, len);
            debug_assert!(w >= 0.0, "negative edge weight");
            let nc = cost + w;
            if nc < dist[next] && nc <= bound {
                dist[next] = nc;
                pred[next] = Some(node);
                heap.push(State { cost: nc, node: next });
            }
        }
    }
    ShortestPaths { dist, pred }
}

/// Plain edge-length distances from one source.
pub fn lengths_from(adj: &Adjacency, source: usize) -> Vec<f64> {
    dijkstra(adj, &[(source, 0.0)], f64::INFINITY, |_, _, len| len).dist
}

/// Relaxes `mindist` from a newly inserted center, visiting only vertices
/// whose current value can improve. Used for incremental farthest-point
/// insertion under the graph metric.
pub fn relax_min_distances(adj: &Adjacency, source: usize, mindist: &mut [f64]) {
    let mut heap = BinaryHeap::new();
    mindist[source] = 0.0;
    heap.push(State {
        cost: 0.0,
        node: source,
    });
    while let Some(State { cost, node }) = heap.pop() {
        if cost > mindist[node] {
            continue;
        }
        for &(next, len) in &adj[node] {
            let nc = cost + len;
            if nc < mindist[next] {
                mindist[next] = nc;
                heap.push(State { cost: nc, node: next });
            }
        }
    }
}
