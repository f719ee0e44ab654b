use serde::{Deserialize, Serialize};

use super::NetGraph;

/// Flow stored as one signed value per edge: positive means `a → b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flow {
    pub edge_flow: Vec<f64>,
    pub value: f64,
}

impl Flow {
    /// Flow on the arc leaving `from` along edge `k` (zero if it runs the
    /// other way).
    pub fn arc(&self, net: &NetGraph, k: usize, from: usize) -> f64 {
        let f = self.edge_flow[k];
        if from == net.edges[k].a {
            f.max(0.0)
        } else {
            (-f).max(0.0)
        }
    }

    /// Net outflow at `v`.
    pub fn divergence(&self, net: &NetGraph, v: usize) -> f64 {
        net.incident(v)
            .iter()
            .map(|&k| if net.edges[k].a == v { self.edge_flow[k] } else { -self.edge_flow[k] })
            .sum()
    }

    /// Largest `|divergence|` over vertices other than source and sink.
    pub fn conservation_residual(&self, net: &NetGraph) -> f64 {
        (0..net.len())
            .filter(|&v| v != net.source && v != net.sink)
            .map(|v| self.divergence(net, v).abs())
            .fold(0.0, f64::max)
    }

    /// Largest violation of the arc capacities (0 when feasible).
    pub fn capacity_excess(&self, net: &NetGraph) -> f64 {
        net.edges
            .iter()
            .zip(&self.edge_flow)
            .map(|(e, &f)| if f >= 0.0 { f - e.forward } else { -f - e.backward })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    /// Local vertices of the source side `S`.
    pub members: Vec<usize>,
    pub value: f64,
}

impl Cut {
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.members {
            m[v] = true;
        }
        m
    }
}

fn residual(net: &NetGraph, flow: &[f64], k: usize, from: usize) -> f64 {
    let e = &net.edges[k];
    if from == e.a {
        e.forward - flow[k]
    } else {
        e.backward + flow[k]
    }
}

fn push(net: &NetGraph, flow: &mut [f64], k: usize, from: usize, amount: f64) {
    if from == net.edges[k].a {
        flow[k] += amount;
    } else {
        flow[k] -= amount;
    }
}

fn tolerance(net: &NetGraph) -> f64 {
    let max_cap = net
        .edges
        .iter()
        .map(|e| e.forward.max(e.backward))
        .fold(0.0, f64::max);
    1e-13 * max_cap
}

/// Maximum flow from source to sink by blocking flows along shortest
/// residual paths. The returned flow carries no circulation.
pub fn max_flow(net: &NetGraph) -> Flow {
    let n = net.len();
    let eps = tolerance(net);
    let mut flow = vec![0.0; net.edges.len()];
    let mut level = vec![usize::MAX; n];
    let mut next = vec![0usize; n];
    let mut queue = Vec::with_capacity(n);
    loop {
        level.iter_mut().for_each(|l| *l = usize::MAX);
        level[net.source] = 0;
        queue.clear();
        queue.push(net.source);
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            for &k in net.incident(v) {
                let w = net.edges[k].other(v);
                if level[w] == usize::MAX && residual(net, &flow, k, v) > eps {
                    level[w] = level[v] + 1;
                    queue.push(w);
                }
            }
        }
        if level[net.sink] == usize::MAX {
            break;
        }
        next.iter_mut().for_each(|i| *i = 0);
        // path as (tail vertex, edge) pairs
        let mut path: Vec<(usize, usize)> = Vec::new();
        let mut v = net.source;
        loop {
            if v == net.sink {
                let bottleneck = path
                    .iter()
                    .map(|&(u, k)| residual(net, &flow, k, u))
                    .fold(f64::INFINITY, f64::min);
                for &(u, k) in &path {
                    push(net, &mut flow, k, u, bottleneck);
                }
                let cut_at = path
                    .iter()
                    .position(|&(u, k)| residual(net, &flow, k, u) <= eps)
                    .unwrap_or(0);
                path.truncate(cut_at);
                v = path.last().map_or(net.source, |&(u, k)| net.edges[k].other(u));
                continue;
            }
            let inc = net.incident(v);
            let mut advanced = false;
            while next[v] < inc.len() {
                let k = inc[next[v]];
                let w = net.edges[k].other(v);
                if level[w] == level[v] + 1 && residual(net, &flow, k, v) > eps {
                    path.push((v, k));
                    v = w;
                    advanced = true;
                    break;
                }
                next[v] += 1;
            }
            if advanced {
                continue;
            }
            level[v] = usize::MAX;
            match path.pop() {
                Some((u, _)) => {
                    next[u] += 1;
                    v = u;
                }
                None => break,
            }
        }
    }
    for (f, e) in flow.iter_mut().zip(&net.edges) {
        if f.abs() <= eps {
            *f = 0.0;
        }
        *f = f.clamp(-e.backward, e.forward);
    }
    cancel_cycles(net, &mut flow);
    let mut out = Flow { edge_flow: flow, value: 0.0 };
    out.value = out.divergence(net, net.source);
    out
}

/// Removes every directed cycle from the support of `flow`.
fn cancel_cycles(net: &NetGraph, flow: &mut [f64]) {
    let n = net.len();
    // 0 unvisited, 1 on stack, 2 finished
    let mut color = vec![0u8; n];
    let mut next = vec![0usize; n];
    let out_along = |flow: &[f64], v: usize, k: usize| {
        let e = &net.edges[k];
        (v == e.a && flow[k] > 0.0) || (v == e.b && flow[k] < 0.0)
    };
    for start in 0..n {
        if color[start] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = Vec::new(); // (vertex, edge used to enter)
        stack.push((start, usize::MAX));
        color[start] = 1;
        while let Some(&(v, _)) = stack.last() {
            let inc = net.incident(v);
            while next[v] < inc.len() && !(out_along(flow, v, inc[next[v]]) && color[net.edges[inc[next[v]]].other(v)] != 2) {
                next[v] += 1;
            }
            if next[v] == inc.len() {
                color[v] = 2;
                stack.pop();
                continue;
            }
            let k = inc[next[v]];
            let w = net.edges[k].other(v);
            if color[w] == 0 {
                color[w] = 1;
                stack.push((w, k));
                continue;
            }
            // cycle w → … → v → w
            let pos = stack.iter().position(|&(u, _)| u == w).expect("on stack");
            let mut arcs: Vec<usize> = stack[pos + 1..].iter().map(|&(_, e)| e).collect();
            arcs.push(k);
            let amount = arcs.iter().map(|&e| flow[e].abs()).fold(f64::INFINITY, f64::min);
            let mut first_zero = None;
            for (idx, &e) in arcs.iter().enumerate() {
                let remaining = flow[e].abs() - amount;
                if remaining <= 0.0 {
                    flow[e] = 0.0;
                    first_zero.get_or_insert(idx);
                } else {
                    flow[e] = remaining.copysign(flow[e]);
                }
            }
            // unwind to the tail of the first emptied arc
            let keep = pos + 1 + first_zero.unwrap();
            for &(u, _) in &stack[keep..] {
                color[u] = 0;
            }
            stack.truncate(keep);
        }
    }
}

/// Minimum cut `S` from residual reachability of a maximum flow.
pub fn min_cut(net: &NetGraph) -> (Cut, Flow) {
    let flow = max_flow(net);
    let cut = cut_from_flow(net, &flow);
    (cut, flow)
}

pub(crate) fn cut_from_flow(net: &NetGraph, flow: &Flow) -> Cut {
    let eps = tolerance(net);
    let mut seen = vec![false; net.len()];
    seen[net.source] = true;
    let mut queue = vec![net.source];
    while let Some(v) = queue.pop() {
        for &k in net.incident(v) {
            let w = net.edges[k].other(v);
            if !seen[w] && residual(net, &flow.edge_flow, k, v) > eps {
                seen[w] = true;
                queue.push(w);
            }
        }
    }
    let value = net.cut_value(&seen);
    Cut {
        members: (0..net.len()).filter(|&v| seen[v]).collect(),
        value,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_min_cut(net: &NetGraph) -> f64 {
        let others: Vec<usize> = (0..net.len()).filter(|&v| v != net.source && v != net.sink).collect();
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << others.len()) {
            let mut s = vec![false; net.len()];
            s[net.source] = true;
            for (b, &v) in others.iter().enumerate() {
                s[v] = mask >> b & 1 == 1;
            }
            best = best.min(net.cut_value(&s));
        }
        best
    }

    pub(crate) fn random_graph(seed: u64, n: usize, p: f64) -> NetGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen::<f64>() < p {
                    edges.push((a, b, 1.0, rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0)));
                }
            }
        }
        NetGraph::from_edges(n, 0, n - 1, &edges).unwrap()
    }

    #[test]
    fn single_edge() {
        let g = NetGraph::from_edges(2, 0, 1, &[(0, 1, 1.0, 2.5, 7.0)]).unwrap();
        let (cut, flow) = min_cut(&g);
        assert_eq!(flow.value, 2.5);
        assert_eq!(flow.edge_flow, vec![2.5]);
        assert_eq!(cut.members, vec![0]);
        assert_eq!(cut.value, 2.5);
    }

    #[test]
    fn diamond_and_parallel_paths() {
        let g = NetGraph::from_edges(
            4,
            0,
            3,
            &[(0, 1, 1.0, 1.0, 1.0), (0, 2, 1.0, 1.0, 1.0), (1, 3, 1.0, 1.0, 1.0), (2, 3, 1.0, 1.0, 1.0)],
        )
        .unwrap();
        assert_eq!(max_flow(&g).value, 2.0);

        let g = NetGraph::from_edges(
            4,
            0,
            3,
            &[(0, 1, 1.0, 5.0, 5.0), (1, 3, 1.0, 0.75, 9.0), (0, 2, 1.0, 0.5, 1.0), (2, 3, 1.0, 4.0, 4.0)],
        )
        .unwrap();
        let (cut, flow) = min_cut(&g);
        assert!((cut.value - 1.25).abs() < 1e-15);
        assert!((flow.value - 1.25).abs() < 1e-15);
    }

    #[test]
    fn directed_capacities_matter() {
        // only the reverse arcs are wide
        let g = NetGraph::from_edges(3, 0, 2, &[(0, 1, 1.0, 0.1, 10.0), (1, 2, 1.0, 10.0, 10.0)]).unwrap();
        assert!((max_flow(&g).value - 0.1).abs() < 1e-15);
    }

    #[test]
    fn random_graphs_match_cut_enumeration() {
        for seed in 0..40 {
            let g = random_graph(seed, 12, 0.35);
            let brute = brute_min_cut(&g);
            let (cut, flow) = min_cut(&g);
            assert!((cut.value - brute).abs() <= 1e-9 * brute.max(1.0), "seed {seed}");
            assert!((flow.value - brute).abs() <= 1e-9 * brute.max(1.0), "seed {seed}");
            assert!(flow.capacity_excess(&g) <= 0.0);
            assert!(flow.conservation_residual(&g) <= 1e-12 * flow.value.max(1.0));
            assert!(cut.members.contains(&g.source) && !cut.members.contains(&g.sink));
        }
    }

    #[test]
    fn disconnected_gives_zero() {
        let g = NetGraph::from_edges(4, 0, 3, &[(0, 1, 1.0, 1.0, 1.0), (2, 3, 1.0, 1.0, 1.0)]).unwrap();
        let (cut, flow) = min_cut(&g);
        assert_eq!(flow.value, 0.0);
        assert_eq!(cut.value, 0.0);
        assert_eq!(cut.members, vec![0, 1]);
    }

    #[test]
    fn cycles_are_cancelled() {
        let g = NetGraph::from_edges(
            4,
            0,
            3,
            &[(0, 1, 1.0, 5.0, 5.0), (1, 2, 1.0, 5.0, 5.0), (0, 2, 1.0, 5.0, 5.0), (2, 3, 1.0, 5.0, 5.0)],
        )
        .unwrap();
        let mut acyclic = vec![1.0, 1.0, 1.0, 2.0];
        cancel_cycles(&g, &mut acyclic);
        assert_eq!(acyclic, vec![1.0, 1.0, 1.0, 2.0]);
        // unit cycle 0 → 1 → 2 → 0 on top of 1 → 2 → 3
        let mut cyc = vec![1.0, 2.0, -1.0, 1.0];
        cancel_cycles(&g, &mut cyc);
        assert_eq!(cyc, vec![0.0, 1.0, 0.0, 1.0]);
    }

}
