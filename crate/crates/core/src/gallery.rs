//! Example and counterexample spaces: Euclidean grids, the unit segment,
//! two planes glued along a point or a line, and grid approximations of
//! (fattened) Sierpiński carpets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mmspace::{MetricKind, PointCloudSpace, SpaceBuilder, VertexId};

/// Upper bound on generated vertex counts.
pub const DEFAULT_VERTEX_BUDGET: usize = 4_000_000;

/// Regular lattice builder. By default the grid is centered at the origin,
/// spans `extent` along every axis, uses axis neighbors and the ambient
/// Euclidean metric.
#[derive(Clone, Debug)]
pub struct GridBuilder {
    dim: usize,
    h: f64,
    counts: Vec<usize>,
    // lattice-unit offset of index 0 along each axis
    offsets: Vec<f64>,
    metric: MetricKind,
    diagonals: bool,
    budget: usize,
}

impl GridBuilder {
    pub fn new(dim: usize, extent: f64, h: f64) -> Self {
        let n = (extent / h).round() as usize + 1;
        let off = -((n - 1) as f64) / 2.0;
        Self {
            dim,
            h,
            counts: vec![n; dim],
            offsets: vec![off; dim],
            metric: MetricKind::AmbientEuclidean,
            diagonals: false,
            budget: DEFAULT_VERTEX_BUDGET,
        }
    }

    /// Axis-aligned box `[lower, upper]`; corners are snapped to multiples of `h`.
    pub fn boxed(lower: &[f64], upper: &[f64], h: f64) -> Self {
        assert_eq!(lower.len(), upper.len());
        let offsets: Vec<f64> = lower.iter().map(|&l| (l / h).round()).collect();
        let counts = lower
            .iter()
            .zip(upper)
            .map(|(&l, &u)| ((u - l) / h).round().max(0.0) as usize + 1)
            .collect();
        Self {
            dim: lower.len(),
            h,
            counts,
            offsets,
            metric: MetricKind::AmbientEuclidean,
            diagonals: false,
            budget: DEFAULT_VERTEX_BUDGET,
        }
    }

    pub fn metric(mut self, metric: MetricKind) -> Self {
        self.metric = metric;
        self
    }

    pub fn diagonals(mut self, on: bool) -> Self {
        self.diagonals = on;
        self
    }

    pub fn budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn build(&self) -> Result<PointCloudSpace> {
        self.build_filtered(|_| true)
    }

    /// Builds the grid keeping only lattice points where `keep` holds.
    pub fn build_filtered(&self, keep: impl Fn(&[f64]) -> bool) -> Result<PointCloudSpace> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::input(format!("grid dimension must be 1, 2 or 3, got {}", self.dim)));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::input(format!("invalid grid spacing {}", self.h)));
        }
        let total: usize = self.counts.iter().product();
        if total > self.budget {
            return Err(Error::input(format!(
                "grid needs {total} vertices, budget is {}",
                self.budget
            )));
        }
        let d = self.dim;
        let h = self.h;
        let weight = h.powi(d as i32);
        let mut strides = vec![1usize; d];
        for k in 1..d {
            strides[k] = strides[k - 1] * self.counts[k - 1];
        }
        let mut b = SpaceBuilder::new(d, self.metric).with_capacity(total, total * d).resolution(h);
        let mut id_of = vec![usize::MAX; total];
        let mut p = vec![0.0; d];
        for lin in 0..total {
            for k in 0..d {
                let i = (lin / strides[k]) % self.counts[k];
                p[k] = (self.offsets[k] + i as f64) * h;
            }
            if keep(&p) {
                id_of[lin] = b.add_vertex(&p, weight);
            }
        }
        // neighbor offsets with positive leading nonzero component
        let mut steps: Vec<Vec<i64>> = Vec::new();
        let span = if self.diagonals { 3usize.pow(d as u32) } else { 0 };
        if self.diagonals {
            for code in 0..span {
                let mut s = vec![0i64; d];
                let mut c = code;
                for v in s.iter_mut() {
                    *v = (c % 3) as i64 - 1;
                    c /= 3;
                }
                if s.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0) {
                    steps.push(s);
                }
            }
        } else {
            for k in 0..d {
                let mut s = vec![0i64; d];
                s[k] = 1;
                steps.push(s);
            }
        }
        let mut idx = vec![0i64; d];
        for lin in 0..total {
            let a = id_of[lin];
            if a == usize::MAX {
                continue;
            }
            for k in 0..d {
                idx[k] = ((lin / strides[k]) % self.counts[k]) as i64;
            }
            'step: for s in &steps {
                let mut other = 0usize;
                let mut nz = 0;
                for k in 0..d {
                    let j = idx[k] + s[k];
                    if j < 0 || j >= self.counts[k] as i64 {
                        continue 'step;
                    }
                    other += j as usize * strides[k];
                    nz += (s[k] != 0) as usize;
                }
                let c = id_of[other];
                if c != usize::MAX {
                    b.add_edge(a, c, Some(h * (nz as f64).sqrt()));
                }
            }
        }
        b.build()
    }
}

/// Centered regular grid in dimension `d` with spacing `h`, ambient metric,
/// axis neighbors and weights `h^d`.
pub fn euclidean_grid(d: usize, extent: f64, h: f64) -> Result<PointCloudSpace> {
    GridBuilder::new(d, extent, h).build()
}

/// `n` equispaced vertices on `[0, 1]` with weights `1/n`.
pub fn segment(n: usize) -> Result<PointCloudSpace> {
    if n < 2 {
        return Err(Error::input("segment needs at least 2 vertices"));
    }
    let step = 1.0 / (n - 1) as f64;
    let mut b = SpaceBuilder::new(1, MetricKind::AmbientEuclidean).resolution(step);
    for i in 0..n {
        b.add_vertex(&[i as f64 * step], 1.0 / n as f64);
    }
    for i in 0..n - 1 {
        b.add_edge(i, i + 1, None);
    }
    b.build()
}

/// Two planar grids glued along a point or a line, with the graph metric.
#[derive(Clone, Debug)]
pub struct GluedPlanes {
    pub space: PointCloudSpace,
    /// Identified vertices (one for `k = 0`, a grid line for `k = 1`).
    pub gluing: Vec<VertexId>,
    n: usize,
    h: f64,
    sheet_ids: [Vec<VertexId>; 2],
}

impl GluedPlanes {
    /// Vertex of `sheet` (0 or 1) nearest to planar coordinates `(z1, z2)`.
    pub fn vertex_at(&self, sheet: usize, z1: f64, z2: f64) -> VertexId {
        let off = (self.n - 1) as f64 / 2.0;
        let clamp = |t: f64| ((t / self.h + off).round().max(0.0) as usize).min(self.n - 1);
        self.sheet_ids[sheet][clamp(z2) * self.n + clamp(z1)]
    }
}

/// Coordinates are `(z1, z2, sheet)`; glued vertices carry sheet `0.5`.
/// Sheet 1 is glued to sheet 0 at the origin (`k = 0`) or along `{z1 = 0}`
/// (`k = 1`). Glued vertices carry weight `h^2`, not `2 h^2`.
pub fn glued_planes(k: usize, extent: f64, h: f64) -> Result<GluedPlanes> {
    if k > 1 {
        return Err(Error::input(format!("gluing dimension must be 0 or 1, got {k}")));
    }
    let n = (extent / h).round() as usize + 1;
    if 2 * n * n > DEFAULT_VERTEX_BUDGET {
        return Err(Error::input(format!("glued planes need {} vertices", 2 * n * n)));
    }
    let off = (n - 1) as f64 / 2.0;
    let mid = (n - 1) / 2;
    let glued = |i: usize, j: usize| match k {
        0 => i == mid && j == mid,
        _ => i == mid,
    };
    let w = h * h;
    let mut b = SpaceBuilder::new(3, MetricKind::GraphPath).with_capacity(2 * n * n, 4 * n * n).resolution(h);
    let mut sheet_ids = [vec![0; n * n], vec![0; n * n]];
    let mut gluing = Vec::new();
    for sheet in 0..2 {
        for j in 0..n {
            for i in 0..n {
                let lin = j * n + i;
                if sheet == 1 && glued(i, j) {
                    sheet_ids[1][lin] = sheet_ids[0][lin];
                    continue;
                }
                let z = [(i as f64 - off) * h, (j as f64 - off) * h, if glued(i, j) { 0.5 } else { sheet as f64 }];
                let id = b.add_vertex(&z, w);
                if glued(i, j) {
                    gluing.push(id);
                }
                sheet_ids[sheet][lin] = id;
            }
        }
    }
    // edges between two glued vertices appear in both sheets; the builder
    // drops the identical duplicate
    for ids in &sheet_ids {
        for j in 0..n {
            for i in 0..n {
                let a = ids[j * n + i];
                if i + 1 < n {
                    b.add_edge(a, ids[j * n + i + 1], Some(h));
                }
                if j + 1 < n {
                    b.add_edge(a, ids[(j + 1) * n + i], Some(h));
                }
            }
        }
    }
    Ok(GluedPlanes {
        space: b.build()?,
        gluing,
        n,
        h,
        sheet_ids,
    })
}

/// Grid approximation of a carpet on `[0,1]^2` with `resolution` nodes per
/// side. At stage `i` every cell of side `3^{-(i-1)}` loses the open central
/// square of side `fattening[i-1] * 3^{-(i-1)}`. Only the largest connected
/// component is kept; the metric is the graph metric.
pub fn carpet_like(level: usize, fattening: &[f64], resolution: usize) -> Result<PointCloudSpace> {
    if level > 5 {
        return Err(Error::input(format!("carpet level must be at most 5, got {level}")));
    }
    if fattening.len() < level {
        return Err(Error::input(format!(
            "fattening schedule has {} entries, level is {level}",
            fattening.len()
        )));
    }
    let schedule = &fattening[..level];
    if schedule.iter().any(|&a| !(0.0..1.0).contains(&a)) {
        return Err(Error::input("hole fractions must lie in [0, 1)"));
    }
    if schedule.iter().map(|a| a * a).sum::<f64>() >= 1.0 {
        return Err(Error::input("fattening schedule must satisfy sum a_i^2 < 1"));
    }
    if resolution < 2 {
        return Err(Error::input("carpet resolution must be at least 2"));
    }
    let h = 1.0 / (resolution - 1) as f64;
    let in_hole = |p: &[f64]| {
        for (stage, &a) in schedule.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let side = 3f64.powi(-(stage as i32));
            let half = 0.5 * a * side;
            let inside = p.iter().all(|&t| {
                let cell = (t / side).floor().min(3f64.powi(stage as i32) - 1.0);
                let center = (cell + 0.5) * side;
                (t - center).abs() < half - 1e-12
            });
            if inside {
                return true;
            }
        }
        false
    };
    let grid = GridBuilder::boxed(&[0.0, 0.0], &[1.0, 1.0], h)
        .metric(MetricKind::GraphPath)
        .build_filtered(|p| !in_hole(p))?;
    largest_component(&grid)
}

fn largest_component(space: &PointCloudSpace) -> Result<PointCloudSpace> {
    let labels = space.component_labels();
    let count = labels.iter().max().map_or(0, |&m| m + 1);
    if count <= 1 {
        return Ok(space.clone());
    }
    let mut sizes = vec![0usize; count];
    for &l in &labels {
        sizes[l] += 1;
    }
    let keep = (0..count).max_by_key(|&l| (sizes[l], std::cmp::Reverse(l))).unwrap();
    let removed: Vec<VertexId> = (0..space.len()).filter(|&i| labels[i] != keep).collect();
    Ok(space.without_vertices(&removed)?.0)
}

/// Serializable generator description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GallerySpec {
    GridEuclidean {
        dim: usize,
        extent: f64,
        h: f64,
        #[serde(default)]
        metric: Option<MetricKind>,
        #[serde(default)]
        diagonals: bool,
    },
    Segment {
        n: usize,
    },
    GluedPlanes {
        k: usize,
        extent: f64,
        h: f64,
    },
    CarpetLike {
        level: usize,
        fattening: Vec<f64>,
        resolution: usize,
    },
}

impl GallerySpec {
    pub fn build(&self) -> Result<PointCloudSpace> {
        match self {
            GallerySpec::GridEuclidean { dim, extent, h, metric, diagonals } => GridBuilder::new(*dim, *extent, *h)
                .metric(metric.unwrap_or(MetricKind::AmbientEuclidean))
                .diagonals(*diagonals)
                .build(),
            GallerySpec::Segment { n } => segment(*n),
            GallerySpec::GluedPlanes { k, extent, h } => Ok(glued_planes(*k, *extent, *h)?.space),
            GallerySpec::CarpetLike { level, fattening, resolution } => carpet_like(*level, fattening, *resolution),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mmspace::doubling_estimate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_space_invariants(s: &PointCloudSpace, seed: u64) {
        assert!(s.weights().iter().all(|&w| w > 0.0 && w.is_finite()));
        for i in 0..s.len() {
            for &(j, l) in s.neighbors(i) {
                assert!(l > 0.0);
                assert!(s.neighbors(j).iter().any(|&(k, m)| k == i && m == l));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10 {
            let a = rng.gen_range(0..s.len());
            let b = rng.gen_range(0..s.len());
            let da = s.distances_from(a);
            let db = s.distances_from(b);
            assert!((da[b] - db[a]).abs() < 1e-12);
            for _ in 0..20 {
                let c = rng.gen_range(0..s.len());
                assert!(da[c] <= da[b] + db[c] + 1e-12);
            }
        }
    }

    #[test]
    fn grid_counts() {
        let s = euclidean_grid(1, 1.0, 0.1).unwrap();
        assert_eq!(s.len(), 11);
        assert_eq!(s.edge_count(), 10);
        let s = euclidean_grid(2, 1.0, 0.1).unwrap();
        assert_eq!(s.len(), 121);
        assert_eq!(s.edge_count(), 2 * 11 * 10);
        let s = GridBuilder::new(2, 1.0, 0.5).diagonals(true).build().unwrap();
        assert_eq!(s.edge_count(), 12 + 8);
    }

    #[test]
    fn grid_budget_enforced() {
        assert!(GridBuilder::new(2, 1.0, 0.01).budget(100).build().is_err());
    }

    #[test]
    fn grid_mass_approximates_volume() {
        for (d, h) in [(1usize, 0.05), (2, 0.05), (3, 0.1)] {
            let s = euclidean_grid(d, 1.0, h).unwrap();
            let err = (s.total_mass() - 1.0).abs();
            assert!(err <= 2.0 * d as f64 * h, "d={d} err={err}");
        }
    }

    #[test]
    fn grid_doubling_near_four() {
        let s = euclidean_grid(2, 1.0, 0.01).unwrap();
        let c = s.nearest_vertex(&[0.0, 0.0]).unwrap();
        let est = doubling_estimate(&s, &[c], &[0.0625, 0.1125, 0.2125]).unwrap();
        assert!((est.value - 4.0).abs() <= 0.6, "{est:?}");
    }

    #[test]
    fn generated_spaces_satisfy_invariants() {
        check_space_invariants(&euclidean_grid(2, 1.0, 0.1).unwrap(), 1);
        check_space_invariants(&GridBuilder::new(3, 1.0, 0.25).diagonals(true).build().unwrap(), 2);
        check_space_invariants(&segment(17).unwrap(), 3);
        check_space_invariants(&glued_planes(0, 1.0, 0.1).unwrap().space, 4);
        check_space_invariants(&glued_planes(1, 1.0, 0.1).unwrap().space, 5);
        check_space_invariants(&carpet_like(2, &[1.0 / 3.0, 1.0 / 9.0], 28).unwrap(), 6);
    }

    #[test]
    fn deterministic_generation() {
        let a = carpet_like(3, &[1.0 / 3.0, 1.0 / 9.0, 1.0 / 27.0], 55).unwrap();
        let b = carpet_like(3, &[1.0 / 3.0, 1.0 / 9.0, 1.0 / 27.0], 55).unwrap();
        assert_eq!(a.content_hash(), b.content_hash());
    }

    #[test]
    fn segment_layout() {
        let s = segment(5).unwrap();
        assert_eq!(s.coords(4), &[1.0]);
        assert!((s.total_mass() - 1.0).abs() < 1e-15);
        let est = doubling_estimate(&segment(201).unwrap(), &[100], &[0.0525, 0.1025, 0.2025]).unwrap();
        assert!((est.value - 2.0).abs() <= 0.4, "{est:?}");
    }

    #[test]
    fn glued_point_is_cut_vertex() {
        let g = glued_planes(0, 1.0, 0.1).unwrap();
        assert_eq!(g.gluing.len(), 1);
        assert_eq!(g.space.len(), 2 * 121 - 1);
        assert_eq!(g.space.component_labels().iter().max(), Some(&0));
        let (cut, _) = g.space.without_vertices(&g.gluing).unwrap();
        assert_eq!(cut.component_labels().iter().max(), Some(&1));
        let p = g.vertex_at(0, 0.0, 0.0);
        assert_eq!(p, g.gluing[0]);
        assert_eq!(g.vertex_at(1, 0.0, 0.0), p);
        let x = g.vertex_at(0, -0.3, 0.0);
        let y = g.vertex_at(1, 0.3, 0.0);
        assert!((g.space.distance(x, y) - 0.6).abs() < 1e-12);
        assert!((g.space.weight(p) - 0.01).abs() < 1e-15);
    }

    #[test]
    fn glued_line() {
        let g = glued_planes(1, 1.0, 0.1).unwrap();
        assert_eq!(g.gluing.len(), 11);
        assert_eq!(g.space.len(), 2 * 121 - 11);
        let (cut, _) = g.space.without_vertices(&g.gluing).unwrap();
        // each sheet falls into its two half-planes
        assert_eq!(cut.component_labels().iter().max(), Some(&3));
    }

    #[test]
    fn carpet_schedules() {
        let plain = carpet_like(3, &[0.0, 0.0, 0.0], 28).unwrap();
        assert_eq!(plain.len(), 28 * 28);
        let classic = carpet_like(2, &[1.0 / 3.0, 1.0 / 3.0], 28).unwrap();
        assert!(classic.len() < plain.len());
        // centre of the first hole is gone
        let c = classic.nearest_vertex(&[0.5, 0.5]).unwrap();
        let p = classic.coords(c);
        assert!((p[0] - 0.5).abs() >= 1.0 / 6.0 - 0.04 || (p[1] - 0.5).abs() >= 1.0 / 6.0 - 0.04);
        assert!(carpet_like(6, &[0.1; 6], 10).is_err());
        assert!(carpet_like(2, &[0.9, 0.9], 10).is_err());
    }
}
