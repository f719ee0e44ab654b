use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::minkowski::{minkowski_content, radius_schedule, separator_radii, tube};
use super::position::{margin_from, position_function};
use super::{PositionField, RegionSet};
use crate::error::{Error, Result};
use crate::mmspace::{in_open_ball, PointCloudSpace, VertexId, TIE_RTOL};
use crate::riesz::riesz_measure;

pub const SANDWICH_TOLERANCE: f64 = 0.2;
const BLOB_UNIONS: usize = 50;
const COARSE_LEVELS: usize = 8;
const REFINED_REGIONS: usize = 3;
const WITNESS_LAYERS: usize = 5;

/// Named region and separator candidates.
#[derive(Clone, Debug, Default)]
pub struct CandidateSuite {
    pub regions: Vec<(String, RegionSet)>,
    pub separators: Vec<(String, Vec<bool>)>,
}

/// Height along `x → y` in coordinates, or `d(x, ·) − d(y, ·)` scaled to
/// the same range when the space has no coordinates.
fn height(space: &PointCloudSpace, x: VertexId, y: VertexId, dx: &[f64], dy: &[f64]) -> (Vec<f64>, f64) {
    if space.dim() > 0 {
        let cx = space.coords(x);
        let cy = space.coords(y);
        let e: Vec<f64> = cx.iter().zip(cy).map(|(a, b)| b - a).collect();
        let span = e.iter().map(|v| v * v).sum::<f64>().sqrt();
        if span > 0.0 {
            let h = (0..space.len())
                .map(|i| space.coords(i).iter().zip(cx).zip(&e).map(|((p, a), v)| (p - a) * v).sum::<f64>() / span)
                .collect();
            return (h, span);
        }
    }
    let d = dx[y];
    ((0..space.len()).map(|i| 0.5 * (dx[i] - dy[i] + d)).collect(), d)
}

/// Balls on a coarse net around the poles, slabs and half-spaces across
/// `x → y`, layers around the separator candidates and random unions of
/// small balls. Separators are half-spaces, balls around `x` and
/// complements of balls around `y`.
pub fn standard_candidates(space: &PointCloudSpace, x: VertexId, y: VertexId, seed: u64) -> Result<CandidateSuite> {
    space.check_vertex(x)?;
    space.check_vertex(y)?;
    let n = space.len();
    let h = space.resolution();
    let dx = space.distances_from(x);
    let dy = space.distances_from(y);
    let d = dx[y];
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::precondition("poles must be distinct and connected"));
    }
    let mut suite = CandidateSuite::default();
    let radii: Vec<f64> = {
        let mut r = radius_schedule(h, d);
        r.reverse();
        r
    };

    // coarse net of spacing d/4 over B_d(x) ∪ B_d(y)
    let mut net: Vec<VertexId> = vec![x, y];
    let mut cover = vec![f64::INFINITY; n];
    let spacing = d / 4.0;
    let mut order: Vec<VertexId> = (0..n).filter(|&i| dx[i] < d || dy[i] < d).collect();
    order.sort_by(|&a, &b| (dx[a] + dy[a]).total_cmp(&(dx[b] + dy[b])).then(a.cmp(&b)));
    for &c in &[x, y] {
        let dc = if c == x { &dx } else { &dy };
        for i in 0..n {
            cover[i] = cover[i].min(dc[i]);
        }
    }
    for &v in &order {
        if cover[v] >= spacing {
            let dv = space.distances_from(v);
            for i in 0..n {
                cover[i] = cover[i].min(dv[i]);
            }
            net.push(v);
        }
    }
    for &c in &net {
        let dc = space.distances_from(c);
        for &r in &radii {
            let mask: Vec<bool> = dc.iter().map(|&v| in_open_ball(v, r)).collect();
            suite.regions.push((format!("ball(v{c}, {r:.6})"), RegionSet::from_mask(mask)));
        }
    }

    let (ht, span) = height(space, x, y, &dx, &dy);
    let cuts: Vec<f64> = (1..16).map(|k| span * k as f64 / 16.0).collect();
    for &s in &cuts {
        let mask: Vec<bool> = ht.iter().map(|&v| v <= s).collect();
        suite.separators.push((format!("halfspace({s:.6})"), mask.clone()));
        suite.regions.push((format!("halfspace-region({s:.6})"), RegionSet::from_mask(mask.iter().map(|m| !m).collect())));
        for &t in &radii {
            if t > span / 2.0 {
                break;
            }
            let slab: Vec<bool> = ht.iter().map(|&v| v > s - 0.5 * t && v <= s + 0.5 * t).collect();
            suite.regions.push((format!("slab({s:.6}, {t:.6})"), RegionSet::from_mask(slab)));
        }
    }
    for k in 1..16 {
        let rho = d * k as f64 / 16.0;
        let mask: Vec<bool> = dx.iter().map(|&v| v <= rho * (1.0 + TIE_RTOL)).collect();
        suite.separators.push((format!("ball-separator({rho:.6})"), mask));
        let far: Vec<bool> = dy.iter().map(|&v| v > rho * (1.0 + TIE_RTOL)).collect();
        suite.separators.push((format!("ball-complement({rho:.6})"), far));
    }
    // layers only where they stay clear of both poles
    let schedule = radius_schedule(h, d / 4.0);
    let layers: Vec<(String, RegionSet)> = suite
        .separators
        .par_iter()
        .flat_map_iter(|(name, omega)| {
            let radii = if omega[x] && !omega[y] {
                separator_radii(&schedule, margin_from(&dx, &dy, omega), h)
            } else {
                Vec::new()
            };
            radii
                .into_iter()
                .map(|r| (format!("layer({name}, {r:.6})"), tube(space, omega, r)))
                .collect::<Vec<_>>()
        })
        .collect();
    suite.regions.extend(layers);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let near: Vec<VertexId> = (0..n).filter(|&i| dx[i] + dy[i] < 2.0 * d).collect();
    let r_hi = (d / 4.0).max(2.0 * h);
    for b in 0..BLOB_UNIONS {
        let k = rng.gen_range(1..=3);
        let mut mask = vec![false; n];
        for _ in 0..k {
            let c = near[rng.gen_range(0..near.len())];
            let r = rng.gen_range(2.0 * h..=r_hi);
            let dc = space.distances_from(c);
            for i in 0..n {
                mask[i] |= in_open_ball(dc[i], r);
            }
        }
        suite.regions.push((format!("blobs#{b}"), RegionSet::from_mask(mask)));
    }
    Ok(suite)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    /// `rhs / Λ̂`.
    pub lhs: f64,
    /// Least separating ratio over the region candidates.
    pub mid: f64,
    /// Least Minkowski content over the valid separators.
    pub rhs: f64,
    pub lambda: f64,
    pub passed: bool,
    pub mid_witness: String,
    pub rhs_witness: String,
    pub regions: usize,
    pub separators: usize,
    pub valid_separators: usize,
}

/// A separator as it was produced, so its mask can be rebuilt.
#[derive(Clone, Debug)]
enum Origin {
    Listed(usize),
    Level { region: usize, level: f64 },
}

#[derive(Clone, Debug)]
struct Candidate {
    content: f64,
    name: String,
    origin: Origin,
}

fn better(a: &Candidate, b: &Candidate) -> std::cmp::Ordering {
    a.content.total_cmp(&b.content).then_with(|| a.name.cmp(&b.name))
}

struct Scored {
    ratio: f64,
    width: f64,
    levels: Vec<Candidate>,
    tried: usize,
}

/// `Λ̂⁻¹ inf m⁺(Ω) ≤ inf SR(A) ≤ inf m⁺(Ω)` over the candidates. Level sets
/// of every region's position field join the separators, and the outer
/// layers of the best separators join the regions.
pub fn sandwich_check(
    space: &PointCloudSpace,
    x: VertexId,
    y: VertexId,
    truncation: f64,
    lambda: f64,
    suite: &CandidateSuite,
) -> Result<SandwichReport> {
    if suite.regions.is_empty() || suite.separators.is_empty() {
        return Err(Error::precondition("candidate lists must be nonempty"));
    }
    let riesz = riesz_measure(space, x, y, truncation)?;
    let h = space.resolution();
    let dx = space.distances_from(x);
    let dy = space.distances_from(y);
    let schedule = radius_schedule(h, riesz.pole_distance() / 4.0);
    let valid_margin = 2.0 * h * (1.0 - TIE_RTOL);
    let content = |mask: &[bool]| -> Result<Option<(f64, Vec<f64>)>> {
        if !mask[x] || mask[y] {
            return Ok(None);
        }
        let margin = margin_from(&dx, &dy, mask);
        if margin < valid_margin {
            return Ok(None);
        }
        let radii = separator_radii(&schedule, margin, h);
        if radii.is_empty() {
            return Ok(None);
        }
        Ok(Some((minkowski_content(space, mask, &riesz, &radii)?.estimate, radii)))
    };
    let levels = |index: usize, field: &PositionField, count: usize| -> Result<Vec<Candidate>> {
        let w = field.width();
        let mut out = Vec::new();
        for k in 1..=count {
            let t = w * k as f64 / (count + 1) as f64;
            if let Some((c, _)) = content(&field.sublevel(t))? {
                out.push(Candidate {
                    content: c,
                    name: format!("level({}, {t:.6})", suite.regions[index].0),
                    origin: Origin::Level { region: index, level: t },
                });
            }
        }
        Ok(out)
    };
    let ratio_of = |region: &RegionSet| -> Result<(f64, PositionField)> {
        let field = position_function(space, x, y, region)?;
        let w = field.width();
        let mass = riesz.mass_of_mask(region.mask());
        Ok((if w > 0.0 { mass / w } else { f64::INFINITY }, field))
    };

    let scored: Vec<Scored> = suite
        .regions
        .par_iter()
        .enumerate()
        .map(|(i, (_, region))| -> Result<Scored> {
            let (ratio, field) = ratio_of(region)?;
            let width = field.width();
            let (levels, tried) = if width > 0.0 { (levels(i, &field, COARSE_LEVELS)?, COARSE_LEVELS) } else { (Vec::new(), 0) };
            Ok(Scored { ratio, width, levels, tried })
        })
        .collect::<Result<Vec<_>>>()?;

    let listed: Vec<Option<Candidate>> = suite
        .separators
        .par_iter()
        .enumerate()
        .map(|(i, (name, mask))| {
            content(mask).map(|c| {
                c.map(|(content, _)| Candidate { content, name: name.clone(), origin: Origin::Listed(i) })
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_by(|&a, &b| scored[a].ratio.total_cmp(&scored[b].ratio).then(a.cmp(&b)));
    let refine: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| scored[i].width > 0.0 && scored[i].ratio.is_finite())
        .take(REFINED_REGIONS)
        .collect();
    // fine level grids on the best regions
    let refined: Vec<(Vec<Candidate>, usize)> = refine
        .par_iter()
        .map(|&i| {
            let field = position_function(space, x, y, &suite.regions[i].1)?;
            let count = ((field.width() / h).ceil() as usize).saturating_sub(1).max(1);
            Ok((levels(i, &field, count)?, count))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut separators = listed.len();
    let mut all: Vec<Candidate> = listed.into_iter().flatten().collect();
    for s in &scored {
        separators += s.tried;
        all.extend(s.levels.iter().cloned());
    }
    for (c, tried) in refined {
        separators += tried;
        all.extend(c);
    }
    all.sort_by(better);
    let valid_separators = all.len();

    // outer layers of the best separators, as regions
    let rebuild = |c: &Candidate| -> Result<Vec<bool>> {
        Ok(match c.origin {
            Origin::Listed(i) => suite.separators[i].1.clone(),
            Origin::Level { region, level } => position_function(space, x, y, &suite.regions[region].1)?.sublevel(level),
        })
    };
    let witnesses: Vec<(f64, String)> = all
        .iter()
        .take(WITNESS_LAYERS)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|c| -> Result<Vec<(f64, String)>> {
            let mask = rebuild(c)?;
            let radii = content(&mask)?.map(|p| p.1).unwrap_or_default();
            radii
                .iter()
                .map(|&r| Ok((ratio_of(&tube(space, &mask, r))?.0, format!("layer({}, {r:.6})", c.name))))
                .collect()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut mid = (scored[order[0]].ratio, suite.regions[order[0]].0.clone());
    for w in witnesses {
        if w.0 < mid.0 || (w.0 == mid.0 && w.1 < mid.1) {
            mid = w;
        }
    }
    let (rhs, rhs_witness) = all.first().map_or((f64::INFINITY, String::new()), |c| (c.content, c.name.clone()));
    let lhs = rhs / lambda;
    let tol = 1.0 + SANDWICH_TOLERANCE;
    Ok(SandwichReport {
        lhs,
        mid: mid.0,
        rhs,
        lambda,
        passed: lhs <= mid.0 * tol && mid.0 <= rhs * tol,
        mid_witness: mid.1,
        rhs_witness,
        regions: suite.regions.len(),
        separators,
        valid_separators,
    })
}
