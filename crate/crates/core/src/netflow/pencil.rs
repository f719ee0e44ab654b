use serde::{Deserialize, Serialize};

use super::{Flow, NetGraph};
use crate::error::{Error, Result};
use crate::mmspace::PointCloudSpace;
use crate::riesz::{safe_ratio, RieszMeasure};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PencilPath {
    /// Local net vertices from source to sink.
    pub vertices: Vec<usize>,
    /// Edge indices along the path.
    pub edges: Vec<usize>,
    /// Flow carried before normalization.
    pub raw: f64,
    /// `raw / F`.
    pub weight: f64,
    pub length: f64,
}

/// Finite family of weighted source-to-sink net paths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretePencil {
    pub paths: Vec<PencilPath>,
    /// Flow value `F` that was decomposed.
    pub total: f64,
    /// Flow left on edges below the stripping tolerance.
    pub leftover: f64,
}

impl DiscretePencil {
    /// Normalized path mass through every edge.
    pub fn edge_loads(&self, net: &NetGraph) -> Vec<f64> {
        let mut load = vec![0.0; net.edges.len()];
        for p in &self.paths {
            for &k in &p.edges {
                load[k] += p.weight;
            }
        }
        load
    }

    pub fn weight_sum(&self) -> f64 {
        self.paths.iter().map(|p| p.weight).sum()
    }

    pub fn expected_length(&self) -> f64 {
        self.paths.iter().map(|p| p.weight * p.length).sum()
    }

    /// Pencil mass carried by paths of length at most `bound`.
    pub fn mass_within_length(&self, bound: f64) -> f64 {
        self.paths.iter().filter(|p| p.length <= bound).map(|p| p.weight).sum()
    }
}

/// Greedy path stripping: repeatedly take a source-to-sink path in the
/// support of the remaining flow and remove its bottleneck.
pub fn flow_to_pencil(flow: &Flow, net: &NetGraph) -> Result<DiscretePencil> {
    let total = flow.value;
    if !(total > 0.0) {
        return Err(Error::NoPencil);
    }
    let tol = 1e-12 * total;
    let mut rest = flow.edge_flow.clone();
    let mut dead = vec![false; net.len()];
    let mut paths = Vec::new();
    let leaving = |rest: &[f64], v: usize, k: usize| {
        let e = &net.edges[k];
        (v == e.a && rest[k] > tol) || (v == e.b && rest[k] < -tol)
    };
    loop {
        // depth-first search in the support, pruning dead ends for good
        let mut on_path = vec![false; net.len()];
        let mut stack: Vec<(usize, usize)> = vec![(net.source, 0)];
        let mut via: Vec<usize> = Vec::new();
        on_path[net.source] = true;
        let mut found = false;
        while let Some(&(v, start)) = stack.last() {
            if v == net.sink {
                found = true;
                break;
            }
            let inc = net.incident(v);
            let mut it = start;
            let mut step = None;
            while it < inc.len() {
                let k = inc[it];
                it += 1;
                let w = net.edges[k].other(v);
                if !dead[w] && !on_path[w] && leaving(&rest, v, k) {
                    step = Some((k, w));
                    break;
                }
            }
            stack.last_mut().unwrap().1 = it;
            match step {
                Some((k, w)) => {
                    on_path[w] = true;
                    via.push(k);
                    stack.push((w, 0));
                }
                None => {
                    dead[v] = true;
                    on_path[v] = false;
                    stack.pop();
                    via.pop();
                }
            }
        }
        if !found {
            break;
        }
        let vertices: Vec<usize> = stack.iter().map(|&(v, _)| v).collect();
        let bottleneck = via.iter().map(|&k| rest[k].abs()).fold(f64::INFINITY, f64::min);
        for &k in &via {
            let r = rest[k].abs() - bottleneck;
            rest[k] = if r <= 0.0 { 0.0 } else { r.copysign(rest[k]) };
        }
        let length = via.iter().map(|&k| net.edges[k].length).sum();
        paths.push(PencilPath {
            vertices,
            edges: via,
            raw: bottleneck,
            weight: bottleneck / total,
            length,
        });
    }
    if paths.is_empty() {
        return Err(Error::NoPencil);
    }
    let leftover = rest.iter().map(|f| f.abs()).sum();
    Ok(DiscretePencil { paths, total, leftover })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PencilRatio {
    pub ratio: f64,
    /// `Σ_k w_k Σ_{e∈π_k} ḡ(e) ℓ(e)`.
    pub path_integral: f64,
    /// `Σ_z g(z) · riesz weight(z)`.
    pub riesz_integral: f64,
}

/// Ratio of the pencil average of path integrals of `g` to `∫ g dm^L`.
/// `g` is indexed by space vertex; edge values are endpoint averages.
pub fn pencil_inequality_ratio(
    pencil: &DiscretePencil,
    net: &NetGraph,
    space: &PointCloudSpace,
    g: &[f64],
    riesz: &RieszMeasure,
) -> Result<PencilRatio> {
    if g.len() != space.len() {
        return Err(Error::input(format!("g has {} values, space has {} vertices", g.len(), space.len())));
    }
    if g.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::precondition("g must be finite and nonnegative"));
    }
    let gp = |local: usize| g[net.points[local]];
    let mut path_integral = 0.0;
    for p in &pencil.paths {
        let along: f64 = p
            .edges
            .iter()
            .map(|&k| {
                let e = &net.edges[k];
                0.5 * (gp(e.a) + gp(e.b)) * e.length
            })
            .sum();
        path_integral += p.weight * along;
    }
    let riesz_integral = riesz.integrate(g);
    Ok(PencilRatio {
        ratio: safe_ratio(path_integral, riesz_integral),
        path_integral,
        riesz_integral,
    })
}
