//! Finite curve families of quasigeodesics, their modulus with respect to a
//! Riesz measure, and the pencil/modulus duality check.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, Constraint, Relation};
use crate::mmspace::{PointCloudSpace, VertexId, TIE_RTOL};
use crate::riesz::{safe_ratio, RieszMeasure};
use crate::shortest;

/// Finite list of vertex paths from `x` to `y` in the neighbor graph, each
/// of length at most `L·d(x, y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveFamily {
    pub x: VertexId,
    pub y: VertexId,
    pub truncation: f64,
    pub pole_distance: f64,
    pub paths: Vec<Vec<VertexId>>,
    pub lengths: Vec<f64>,
}

fn edge_length(space: &PointCloudSpace, u: VertexId, v: VertexId) -> Option<f64> {
    let nb = space.neighbors(u);
    nb.binary_search_by(|&(w, _)| w.cmp(&v)).ok().map(|i| nb[i].1)
}

/// Length of a vertex path, or an error if consecutive vertices are not
/// neighbors.
pub fn path_length(space: &PointCloudSpace, path: &[VertexId]) -> Result<f64> {
    let mut total = 0.0;
    for w in path.windows(2) {
        total += edge_length(space, w[0], w[1])
            .ok_or_else(|| Error::input(format!("vertices {} and {} are not neighbors", w[0], w[1])))?;
    }
    Ok(total)
}

impl CurveFamily {
    pub fn new(space: &PointCloudSpace, x: VertexId, y: VertexId, truncation: f64, paths: Vec<Vec<VertexId>>) -> Result<Self> {
        space.check_vertex(x)?;
        space.check_vertex(y)?;
        if x == y {
            return Err(Error::input("family endpoints must be distinct"));
        }
        let dxy = space.distance(x, y);
        let bound = truncation * dxy;
        let mut lengths = Vec::with_capacity(paths.len());
        for p in &paths {
            if p.first() != Some(&x) || p.last() != Some(&y) {
                return Err(Error::input("family path does not join x to y"));
            }
            let len = path_length(space, p)?;
            if !within_bound(len, bound) {
                return Err(Error::input(format!("path length {len} exceeds L·d(x,y) = {bound}")));
            }
            lengths.push(len);
        }
        Ok(Self {
            x,
            y,
            truncation,
            pole_distance: dxy,
            paths,
            lengths,
        })
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn length_bound(&self) -> f64 {
        self.truncation * self.pole_distance
    }

    /// The first `k` paths.
    pub fn prefix(&self, k: usize) -> Self {
        let k = k.min(self.len());
        Self {
            paths: self.paths[..k].to_vec(),
            lengths: self.lengths[..k].to_vec(),
            ..self.clone()
        }
    }

    pub fn contains(&self, path: &[VertexId]) -> bool {
        self.paths.iter().any(|p| p == path)
    }
}

fn within_bound(len: f64, bound: f64) -> bool {
    len <= bound * (1.0 + TIE_RTOL)
}

#[derive(Clone, Debug, PartialEq)]
struct Candidate(f64, Vec<VertexId>);

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then_with(|| self.1.cmp(&other.1))
    }
}

/// Up to `k` loop-free paths from `x` to `y` in increasing length (ties in
/// lexicographic vertex order), stopping at length `L·d(x, y)`.
pub fn enumerate_quasigeodesics(space: &PointCloudSpace, x: VertexId, y: VertexId, truncation: f64, k: usize) -> Result<CurveFamily> {
    space.check_vertex(x)?;
    space.check_vertex(y)?;
    if k == 0 {
        return Err(Error::precondition("k must be at least 1"));
    }
    if x == y {
        return Err(Error::input("family endpoints must be distinct"));
    }
    if !(truncation >= 1.0) {
        return Err(Error::precondition(format!("L must be >= 1, got {truncation}")));
    }
    let dxy = space.distance(x, y);
    let bound = truncation * dxy;
    let slack = bound * (1.0 + TIE_RTOL);
    let adj = space.adjacency();

    let mut accepted: Vec<Candidate> = Vec::new();
    let first = shortest::dijkstra(adj, &[(x, 0.0)], slack, |_, _, l| l);
    if let Some(p) = first.path_to(y) {
        let len = path_length(space, &p)?;
        if within_bound(len, bound) {
            accepted.push(Candidate(len, p));
        }
    }
    let mut pool: BTreeSet<Candidate> = BTreeSet::new();
    let mut seen: HashSet<Vec<VertexId>> = accepted.iter().map(|c| c.1.clone()).collect();
    while !accepted.is_empty() && accepted.len() < k {
        let last = accepted.last().unwrap().1.clone();
        let mut root_len = 0.0;
        for i in 0..last.len() - 1 {
            let spur = last[i];
            let root = &last[..=i];
            let mut banned_edges: HashSet<(VertexId, VertexId)> = HashSet::new();
            for c in &accepted {
                if c.1.len() > i + 1 && &c.1[..=i] == root {
                    banned_edges.insert((c.1[i], c.1[i + 1]));
                }
            }
            let banned_nodes: HashSet<VertexId> = root[..i].iter().copied().collect();
            let sp = shortest::dijkstra(adj, &[(spur, 0.0)], slack - root_len, |u, v, l| {
                if banned_nodes.contains(&v) || banned_edges.contains(&(u, v)) {
                    f64::INFINITY
                } else {
                    l
                }
            });
            if let Some(tail) = sp.path_to(y) {
                let mut full = root.to_vec();
                full.extend_from_slice(&tail[1..]);
                if seen.insert(full.clone()) {
                    let len = path_length(space, &full)?;
                    if within_bound(len, bound) {
                        pool.insert(Candidate(len, full));
                    }
                }
            }
            root_len += edge_length(space, last[i], last[i + 1]).unwrap();
        }
        match pool.pop_first() {
            Some(c) => accepted.push(c),
            None => break,
        }
    }
    let (lengths, paths) = accepted.into_iter().map(|c| (c.0, c.1)).unzip();
    Ok(CurveFamily {
        x,
        y,
        truncation,
        pole_distance: dxy,
        paths,
        lengths,
    })
}

/// Per-edge density, edges keyed `(min, max)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleDensity {
    pub edges: Vec<(VertexId, VertexId)>,
    pub values: Vec<f64>,
}

impl AdmissibleDensity {
    pub fn value(&self, u: VertexId, v: VertexId) -> f64 {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).map_or(0.0, |i| self.values[i])
    }

    /// `Σ_{e∈π} ρ(e) ℓ(e)`.
    pub fn path_integral(&self, space: &PointCloudSpace, path: &[VertexId]) -> f64 {
        path.windows(2)
            .map(|w| self.value(w[0], w[1]) * edge_length(space, w[0], w[1]).unwrap_or(0.0))
            .sum()
    }
}

/// Edge mass: average of the endpoint Riesz weights.
pub fn edge_mass(riesz: &RieszMeasure, u: VertexId, v: VertexId) -> f64 {
    0.5 * (riesz.weight(u) + riesz.weight(v))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusResult {
    pub value: f64,
    pub density: AdmissibleDensity,
    pub family_size: usize,
}

struct EdgeSystem {
    edges: Vec<(VertexId, VertexId)>,
    lengths: Vec<f64>,
    masses: Vec<f64>,
    // per path: edge indices
    incidence: Vec<Vec<usize>>,
}

fn edge_system(space: &PointCloudSpace, family: &CurveFamily, riesz: &RieszMeasure) -> Result<EdgeSystem> {
    let mut set = BTreeSet::new();
    for (p, &len) in family.paths.iter().zip(&family.lengths) {
        if !(len > 0.0) {
            return Err(Error::DegeneratePath(format!("{p:?}")));
        }
        for w in p.windows(2) {
            set.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    let edges: Vec<(VertexId, VertexId)> = set.into_iter().collect();
    let lengths = edges
        .iter()
        .map(|&(u, v)| edge_length(space, u, v).ok_or_else(|| Error::input("family edge not in the graph")))
        .collect::<Result<Vec<_>>>()?;
    let masses = edges.iter().map(|&(u, v)| edge_mass(riesz, u, v)).collect();
    let incidence = family
        .paths
        .iter()
        .map(|p| {
            p.windows(2)
                .map(|w| edges.binary_search(&(w[0].min(w[1]), w[0].max(w[1]))).unwrap())
                .collect()
        })
        .collect();
    Ok(EdgeSystem {
        edges,
        lengths,
        masses,
        incidence,
    })
}

/// `Mod(family)`: minimize `Σ_e ρ(e) μ̄(e)` subject to `Σ_{e∈π} ρ(e) ℓ(e) ≥ 1`
/// for every path and `ρ ≥ 0`.
pub fn modulus(space: &PointCloudSpace, family: &CurveFamily, riesz: &RieszMeasure) -> Result<ModulusResult> {
    let sys = edge_system(space, family, riesz)?;
    if family.is_empty() {
        return Ok(ModulusResult {
            value: 0.0,
            density: AdmissibleDensity {
                edges: Vec::new(),
                values: Vec::new(),
            },
            family_size: 0,
        });
    }
    let constraints: Vec<Constraint> = sys
        .incidence
        .iter()
        .map(|inc| {
            let mut row = vec![0.0; sys.edges.len()];
            for &e in inc {
                row[e] += sys.lengths[e];
            }
            Constraint::new(row, Relation::Ge, 1.0)
        })
        .collect();
    let sol = lp::minimize(&sys.masses, &constraints)?;
    Ok(ModulusResult {
        value: sol.value,
        density: AdmissibleDensity {
            edges: sys.edges,
            values: sol.x,
        },
        family_size: family.len(),
    })
}

/// Probability weights on the paths of a family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyPencil {
    pub paths: Vec<Vec<VertexId>>,
    pub weights: Vec<f64>,
}

impl FamilyPencil {
    pub fn uniform(family: &CurveFamily) -> Self {
        let n = family.len();
        Self {
            paths: family.paths.clone(),
            weights: vec![1.0 / n as f64; n],
        }
    }
}

/// Pencil supported on the family that attains `C₁ = 1/Mod`, from the dual
/// program `max Σ λ_π` subject to `Σ_{π∋e} λ_π ℓ(e) ≤ μ̄(e)`.
pub fn optimal_pencil(space: &PointCloudSpace, family: &CurveFamily, riesz: &RieszMeasure) -> Result<(f64, FamilyPencil)> {
    let sys = edge_system(space, family, riesz)?;
    if family.is_empty() {
        return Err(Error::NoPencil);
    }
    let mut rows = vec![vec![0.0; family.len()]; sys.edges.len()];
    for (k, inc) in sys.incidence.iter().enumerate() {
        for &e in inc {
            rows[e][k] += sys.lengths[e];
        }
    }
    let constraints: Vec<Constraint> = rows
        .into_iter()
        .zip(&sys.masses)
        .map(|(r, &m)| Constraint::new(r, Relation::Le, m))
        .collect();
    let sol = lp::maximize(&vec![1.0; family.len()], &constraints)?;
    if !(sol.value > 0.0) {
        return Err(Error::NoPencil);
    }
    let weights = sol.x.iter().map(|v| v / sol.value).collect();
    Ok((
        sol.value,
        FamilyPencil {
            paths: family.paths.clone(),
            weights,
        },
    ))
}

/// Exact pencil constant on edge densities:
/// `sup_ρ Σ_k w_k ∫_{π_k} ρ / Σ_e ρ(e) μ̄(e) = max_e load(e) ℓ(e) / μ̄(e)`.
pub fn pencil_constant(space: &PointCloudSpace, pencil: &FamilyPencil, riesz: &RieszMeasure) -> Result<f64> {
    let mut load: std::collections::BTreeMap<(VertexId, VertexId), f64> = Default::default();
    for (p, &w) in pencil.paths.iter().zip(&pencil.weights) {
        for e in p.windows(2) {
            *load.entry((e[0].min(e[1]), e[0].max(e[1]))).or_default() += w;
        }
    }
    let mut best: f64 = 0.0;
    for (&(u, v), &l) in &load {
        let len = edge_length(space, u, v).ok_or_else(|| Error::input("pencil edge not in the graph"))?;
        best = best.max(safe_ratio(l * len, edge_mass(riesz, u, v)));
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityCheck {
    pub modulus: f64,
    pub pencil_constant: f64,
    /// `Mod − 1/C₁`; nonnegative when the inequality holds.
    pub margin: f64,
    pub holds: bool,
    /// `Σ_k w_k ∫_{π_k} ρ*` for the optimal density; at least 1.
    pub expected_density_length: f64,
    pub skipped: Option<String>,
}

/// Checks `Mod(family) ≥ 1/C₁(pencil)` when every pencil path lies in the
/// family.
pub fn pencil_modulus_duality_check(
    space: &PointCloudSpace,
    pencil: &FamilyPencil,
    family: &CurveFamily,
    riesz: &RieszMeasure,
) -> Result<DualityCheck> {
    if let Some(p) = pencil.paths.iter().find(|p| !family.contains(p)) {
        return Ok(DualityCheck {
            modulus: f64::NAN,
            pencil_constant: f64::NAN,
            margin: f64::NAN,
            holds: false,
            expected_density_length: f64::NAN,
            skipped: Some(format!("pencil path {p:?} is not in the family")),
        });
    }
    let m = modulus(space, family, riesz)?;
    let c1 = pencil_constant(space, pencil, riesz)?;
    let inv = if c1 > 0.0 { 1.0 / c1 } else { f64::INFINITY };
    let margin = m.value - inv;
    let expected: f64 = pencil
        .paths
        .iter()
        .zip(&pencil.weights)
        .map(|(p, w)| w * m.density.path_integral(space, p))
        .sum();
    Ok(DualityCheck {
        modulus: m.value,
        pencil_constant: c1,
        margin,
        holds: margin >= -1e-9 * m.value,
        expected_density_length: expected,
        skipped: None,
    })
}

/// Modulus of the first `k` enumerated quasigeodesics for every `k` in `ks`.
/// Values are subfamily estimates: they bound the full family modulus from
/// below and increase with `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusProfile {
    pub ks: Vec<usize>,
    pub family_sizes: Vec<usize>,
    pub values: Vec<f64>,
    pub subfamily_estimate: bool,
}

pub fn modulus_profile(space: &PointCloudSpace, x: VertexId, y: VertexId, truncation: f64, ks: &[usize]) -> Result<ModulusProfile> {
    let kmax = ks.iter().copied().max().unwrap_or(1).max(1);
    let family = enumerate_quasigeodesics(space, x, y, truncation, kmax)?;
    let riesz = crate::riesz::riesz_measure(space, x, y, truncation)?;
    let mut values = Vec::with_capacity(ks.len());
    let mut family_sizes = Vec::with_capacity(ks.len());
    for &k in ks {
        let sub = family.prefix(k);
        family_sizes.push(sub.len());
        values.push(modulus(space, &sub, &riesz)?.value);
    }
    Ok(ModulusProfile {
        ks: ks.to_vec(),
        family_sizes,
        values,
        subfamily_estimate: true,
    })
}

pub fn keith_bound(space: &PointCloudSpace, x: VertexId, y: VertexId, truncation: f64, k: usize) -> Result<f64> {
    Ok(modulus_profile(space, x, y, truncation, &[k])?.values[0])
}
