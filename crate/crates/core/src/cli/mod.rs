//! Batch experiment runner: configuration, command dispatch, reports and
//! plots.

pub mod config;
pub mod plot;
pub mod report;

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;

pub use config::{CandidateSpec, Command, ExperimentConfig, Params, PolePair, PoleRef, SpaceSource, Tolerances};
pub use report::{as_f64, num, nums, Provenance, Record, Report, TSV_COLUMNS};

use crate::error::{Error, Result};
use crate::euclid::{self, EuclideanConfig};
use crate::mmspace::{doubling_estimate, PointCloudSpace, VertexId};
use crate::modulus::{enumerate_quasigeodesics, modulus, optimal_pencil, pencil_modulus_duality_check};
use crate::netflow::{build_net_graph, flow_to_pencil, max_flow, min_cut, pencil_inequality_ratio};
use crate::riesz::{riesz_measure, RieszMeasure};
use crate::separating::region::{RegionContext, RegionExpr};
use crate::separating::{
    coarea_check, lip_bound_check, minkowski_content, position_function, radius_schedule, relative_isoperimetric_check,
    sandwich_check, separator_radii, set_connectedness_scan, standard_candidates, width, width_over, CandidateSuite,
    RegionSet, WidthOver,
};

/// A named SVG picture produced alongside the report.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub svg: String,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: Report,
    pub plots: Vec<Artifact>,
}

impl RunOutput {
    pub fn write(&self, dir: &Path) -> Result<()> {
        self.report.write(dir)?;
        if !self.plots.is_empty() {
            let pd = dir.join("plots");
            std::fs::create_dir_all(&pd)?;
            for a in &self.plots {
                std::fs::write(pd.join(&a.name), &a.svg)?;
            }
        }
        Ok(())
    }
}

struct Pair {
    label: String,
    x: VertexId,
    y: VertexId,
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    space: &'a PointCloudSpace,
    pairs: Vec<Pair>,
    /// Per pair: evaluated regions in name order.
    regions: Vec<Vec<(String, std::result::Result<RegionSet, String>)>>,
}

type Output = (Vec<Record>, Vec<Artifact>);

fn task_seed(seed: u64, cmd: Command, pair: usize) -> u64 {
    seed ^ ((cmd as u64 + 1) << 40) ^ (pair as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn pair_record(cmd: Command, pair: &Pair) -> Record {
    Record::new(cmd.name(), pair.label.clone())
        .param("x", pair.x)
        .param("y", pair.y)
}

fn finish(rec: Record, r: Result<Record>) -> Record {
    r.unwrap_or_else(|e| rec.fail(&e))
}

/// Runs every configured command. Module errors become failed records.
pub fn run(cfg: &ExperimentConfig, base_dir: &Path) -> RunOutput {
    let commands: Vec<Command> = cfg.commands.clone();
    let needs_space = commands.iter().any(|c| c.needs_space());
    let space = match (&cfg.space, needs_space) {
        (Some(src), true) => Some(src.build(base_dir)),
        (None, true) => Some(Err(Error::Config("no space configured".into()))),
        _ => None,
    };
    let provenance = Provenance {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: cfg.seed,
        commands: commands.iter().map(|c| c.name().to_string()).collect(),
        config_hash: cfg.hash(),
        space_hash: space.as_ref().and_then(|s| s.as_ref().ok()).map(|s| s.content_hash()),
        space_vertices: space.as_ref().and_then(|s| s.as_ref().ok()).map(|s| s.len()),
    };
    let config = serde_json::to_value(cfg).unwrap_or(Value::Null);

    let ctx = match &space {
        Some(Ok(s)) => Some(build_ctx(cfg, s, base_dir)),
        _ => None,
    };
    let mut tasks: Vec<(Command, Option<usize>)> = Vec::new();
    for &c in &commands {
        match (&ctx, c.needs_space()) {
            (_, false) => tasks.push((c, None)),
            (Some(Ok(ctx)), true) if !ctx.pairs.is_empty() => tasks.extend((0..ctx.pairs.len()).map(|p| (c, Some(p)))),
            _ => tasks.push((c, None)),
        }
    }
    let outputs: Vec<Output> = tasks
        .par_iter()
        .map(|&(c, p)| match (c, p) {
            (Command::EuclidValidate, _) => (euclid_records(cfg), Vec::new()),
            (c, Some(p)) => match &ctx {
                Some(Ok(ctx)) => dispatch(ctx, c, p),
                _ => unreachable!("pair tasks need a context"),
            },
            (c, None) => {
                let err = match (&space, &ctx) {
                    (Some(Err(e)), _) => e.to_string(),
                    (_, Some(Err(e))) => e.to_string(),
                    _ => "no pole pairs configured".to_string(),
                };
                let mut r = Record::new(c.name(), "setup");
                r.passed = false;
                r.error = Some(err);
                (vec![r], Vec::new())
            }
        })
        .collect();
    let mut records = Vec::new();
    let mut plots = Vec::new();
    for (r, a) in outputs {
        records.extend(r);
        plots.extend(a);
    }
    if !cfg.plots {
        plots.clear();
    }
    RunOutput {
        report: Report { provenance, config, records },
        plots,
    }
}

fn build_ctx<'a>(cfg: &'a ExperimentConfig, space: &'a PointCloudSpace, base_dir: &Path) -> Result<Ctx<'a>> {
    let mut pairs = Vec::new();
    for (k, p) in cfg.poles.iter().enumerate() {
        let x = p.x.resolve(space)?;
        let y = p.y.resolve(space)?;
        if x == y {
            return Err(Error::Config(format!("pole pair {k} resolves to a single vertex {x}")));
        }
        pairs.push(Pair { label: p.label.clone().unwrap_or_else(|| format!("pair{k}")), x, y });
    }
    let exprs: Vec<(String, RegionExpr)> = cfg
        .regions
        .iter()
        .map(|(n, s)| Ok((n.clone(), s.parse::<RegionExpr>()?)))
        .collect::<Result<_>>()?;
    let regions = pairs
        .iter()
        .map(|pair| {
            // first pass: regions without level sets; second pass: level
            // sets of their position fields
            let mut rc = RegionContext { base_dir: base_dir.to_path_buf(), ..Default::default() };
            rc.fields.insert("dx".into(), space.distances_from(pair.x));
            rc.fields.insert("dy".into(), space.distances_from(pair.y));
            let first: Vec<Result<RegionSet>> = exprs.iter().map(|(_, e)| e.evaluate(space, &rc)).collect();
            for ((name, _), r) in exprs.iter().zip(&first) {
                if let Ok(set) = r {
                    if let Ok(f) = position_function(space, pair.x, pair.y, set) {
                        rc.fields.insert(name.clone(), f.values);
                    }
                }
            }
            exprs
                .iter()
                .zip(first)
                .map(|((name, e), r)| {
                    let r = r.or_else(|_| e.evaluate(space, &rc)).map_err(|e| e.to_string());
                    (name.clone(), r)
                })
                .collect()
        })
        .collect();
    Ok(Ctx { cfg, space, pairs, regions })
}

fn dispatch(ctx: &Ctx, cmd: Command, p: usize) -> Output {
    if cmd.per_region() {
        let pair = &ctx.pairs[p];
        if ctx.regions[p].is_empty() {
            let mut r = pair_record(cmd, pair);
            r.passed = false;
            r.error = Some("no regions configured".into());
            return (vec![r], Vec::new());
        }
        let mut recs = Vec::new();
        let mut arts = Vec::new();
        for (name, region) in &ctx.regions[p] {
            let rec = pair_record(cmd, pair).param("region", name.as_str());
            let rec = Record { label: format!("{}/{name}", pair.label), ..rec };
            match region {
                Err(e) => {
                    let mut r = rec;
                    r.passed = false;
                    r.error = Some(e.clone());
                    recs.push(r);
                }
                Ok(set) => {
                    let (r, a) = region_command(ctx, cmd, pair, name, set, rec.clone());
                    recs.push(finish(rec, r));
                    arts.extend(a);
                }
            }
        }
        return (recs, arts);
    }
    let pair = &ctx.pairs[p];
    let seed = task_seed(ctx.cfg.seed, cmd, p);
    match cmd {
        Command::Riesz => riesz_record(ctx, pair, seed),
        Command::Mincut | Command::Pencil => net_records(ctx, cmd, pair, seed),
        Command::Modulus => (vec![finish(pair_record(cmd, pair), modulus_record(ctx, pair))], Vec::new()),
        Command::SrScan => (vec![finish(pair_record(cmd, pair), scan_record(ctx, pair, p, seed))], Vec::new()),
        Command::Sandwich => (vec![finish(pair_record(cmd, pair), sandwich_record(ctx, pair, p, seed))], Vec::new()),
        _ => unreachable!("per-region commands handled above"),
    }
}

fn riesz_record(ctx: &Ctx, pair: &Pair, seed: u64) -> Output {
    let cfg = ctx.cfg;
    let rec = pair_record(Command::Riesz, pair).param("truncation", num(cfg.params.truncation));
    let mut plots = Vec::new();
    let r = (|| -> Result<Record> {
        let mut rec = rec.clone();
        let m = riesz_measure(ctx.space, pair.x, pair.y, cfg.params.truncation)?;
        let (cd, source) = match cfg.params.doubling {
            Some(c) => (c, "config"),
            None => (estimate_doubling(ctx.space, pair, seed)?, "estimated"),
        };
        let bound = m.mass_bound(cd);
        rec.out_f("total_mass", m.total_mass());
        rec.out_f("pole_distance", m.pole_distance());
        rec.out_f("support_radius", m.support_radius());
        rec.out("support_size", m.support().len());
        rec.out_f("doubling", cd);
        rec.out("doubling_source", source);
        rec.out_f("bound", bound);
        rec.passed = m.total_mass() <= bound;
        if let Some(svg) = plot::heatmap(ctx.space, m.weights(), &[pair.x, pair.y], "Riesz weights") {
            plots.push(Artifact { name: format!("riesz_{}.svg", pair.label), svg });
        }
        Ok(rec)
    })();
    (vec![finish(rec, r)], plots)
}

/// Empirical doubling constant at the poles and 16 seeded centers over
/// radii `2h, 4h, …` up to a quarter of the diameter.
fn estimate_doubling(space: &PointCloudSpace, pair: &Pair, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = vec![pair.x, pair.y];
    centers.extend((0..16).map(|_| rng.gen_range(0..space.len())));
    let radii = radius_schedule(space.resolution(), space.diameter_estimate() / 4.0);
    Ok(doubling_estimate(space, &centers, &radii)?.value)
}

fn net_records(ctx: &Ctx, cmd: Command, pair: &Pair, seed: u64) -> Output {
    let cfg = ctx.cfg;
    let mut recs = Vec::new();
    let mut plots = Vec::new();
    for (k, &delta) in cfg.params.deltas.iter().enumerate() {
        let rec = Record {
            label: format!("{}/delta={delta}", pair.label),
            ..pair_record(cmd, pair)
                .param("delta", num(delta))
                .param("truncation", num(cfg.params.truncation))
        };
        let r = (|| -> Result<Record> {
            let mut rec = rec.clone();
            let net = build_net_graph(ctx.space, pair.x, pair.y, delta, cfg.params.truncation)?;
            rec.out("net_points", net.len());
            rec.out("net_edges", net.edges.len());
            rec.out("coarse_scale", net.coarse_scale);
            if cmd == Command::Mincut {
                let (cut, flow) = min_cut(&net);
                let tol = cfg.tolerances.flow_cut;
                rec.tol("flow_cut_rel", tol);
                rec.out_f("cut_value", cut.value);
                rec.out_f("flow_value", flow.value);
                rec.out("source_side", cut.members.len());
                rec.passed = (cut.value - flow.value).abs() <= tol * cut.value.abs().max(f64::MIN_POSITIVE);
                let side = cut.mask(net.len());
                if let Some(svg) = plot::cut(ctx.space, &net, &side, "minimum cut") {
                    plots.push(Artifact { name: format!("mincut_{}_{k}.svg", pair.label), svg });
                }
                return Ok(rec);
            }
            let flow = max_flow(&net);
            let pencil = flow_to_pencil(&flow, &net)?;
            let riesz = riesz_measure(ctx.space, pair.x, pair.y, cfg.params.truncation)?;
            let d = riesz.pole_distance();
            rec.out_f("flow_value", flow.value);
            rec.out("paths", pencil.paths.len());
            rec.out_f("expected_length", pencil.expected_length());
            rec.out_f("quasigeodesic_mass", pencil.mass_within_length(cfg.params.truncation * d));
            rec.out_f("leftover", pencil.leftover);
            let ones = vec![1.0; ctx.space.len()];
            let base = pencil_inequality_ratio(&pencil, &net, ctx.space, &ones, &riesz)?.ratio;
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            let mut worst = base;
            for _ in 0..cfg.params.pencil_samples {
                let g: Vec<f64> = (0..ctx.space.len()).map(|_| rng.gen::<f64>()).collect();
                worst = worst.max(pencil_inequality_ratio(&pencil, &net, ctx.space, &g, &riesz)?.ratio);
            }
            rec.out_f("ratio_constant", base);
            rec.out_f("c1_estimate", worst);
            rec.set_param("samples", cfg.params.pencil_samples);
            rec.tol("pencil_leftover", cfg.tolerances.pencil_leftover);
            rec.passed = pencil.leftover <= cfg.tolerances.pencil_leftover * flow.value.abs().max(f64::MIN_POSITIVE)
                && (pencil.weight_sum() - 1.0).abs() <= 1e-9;
            Ok(rec)
        })();
        recs.push(finish(rec, r));
    }
    (recs, plots)
}

fn modulus_record(ctx: &Ctx, pair: &Pair) -> Result<Record> {
    let p = &ctx.cfg.params;
    let mut rec = pair_record(Command::Modulus, pair).param("k", p.k).param("truncation", num(p.truncation));
    let family = enumerate_quasigeodesics(ctx.space, pair.x, pair.y, p.truncation, p.k)?;
    let riesz = riesz_measure(ctx.space, pair.x, pair.y, p.truncation)?;
    let mut profile = Vec::new();
    for j in 1..=family.len() {
        profile.push(modulus(ctx.space, &family.prefix(j), &riesz)?.value);
    }
    let (c1, pencil) = optimal_pencil(ctx.space, &family, &riesz)?;
    let dual = pencil_modulus_duality_check(ctx.space, &pencil, &family, &riesz)?;
    rec.out("family_size", family.len());
    rec.out("profile", nums(&profile));
    rec.out_f("modulus", dual.modulus);
    rec.out_f("pencil_constant", c1);
    rec.out_f("margin", dual.margin);
    rec.out_f("expected_density_length", dual.expected_density_length);
    rec.passed = dual.holds && profile.windows(2).all(|w| w[1] >= w[0]);
    Ok(rec)
}

fn suite_for(ctx: &Ctx, pair: &Pair, p: usize, seed: u64) -> Result<CandidateSuite> {
    let mut suite = if ctx.cfg.candidates.standard {
        standard_candidates(ctx.space, pair.x, pair.y, seed)?
    } else {
        CandidateSuite::default()
    };
    if ctx.cfg.candidates.regions {
        for (name, r) in &ctx.regions[p] {
            if let Ok(set) = r {
                suite.regions.push((format!("config:{name}"), set.clone()));
            }
        }
    }
    Ok(suite)
}

fn scan_record(ctx: &Ctx, pair: &Pair, p: usize, seed: u64) -> Result<Record> {
    let mut rec = pair_record(Command::SrScan, pair).param("truncation", num(ctx.cfg.params.truncation));
    let suite = suite_for(ctx, pair, p, seed)?;
    let riesz = riesz_measure(ctx.space, pair.x, pair.y, ctx.cfg.params.truncation)?;
    let sets: Vec<RegionSet> = suite.regions.iter().map(|r| r.1.clone()).collect();
    let scan = set_connectedness_scan(ctx.space, &riesz, &sets)?;
    rec.out("candidates", sets.len());
    rec.out_f("infimum", scan.infimum);
    rec.out("argmin", suite.regions[scan.argmin].0.as_str());
    rec.passed = scan.infimum.is_finite();
    Ok(rec)
}

fn sandwich_record(ctx: &Ctx, pair: &Pair, p: usize, seed: u64) -> Result<Record> {
    let cp = &ctx.cfg.params;
    let tol = ctx.cfg.tolerances.sandwich;
    let mut rec = pair_record(Command::Sandwich, pair)
        .param("truncation", num(cp.truncation))
        .param("lip_bound", num(cp.lip_bound));
    rec.tol("sandwich", tol);
    let suite = suite_for(ctx, pair, p, seed)?;
    let rep = sandwich_check(ctx.space, pair.x, pair.y, cp.truncation, cp.lip_bound, &suite)?;
    rec.out_f("lhs", rep.lhs);
    rec.out_f("mid", rep.mid);
    rec.out_f("rhs", rep.rhs);
    rec.out("mid_witness", rep.mid_witness.as_str());
    rec.out("rhs_witness", rep.rhs_witness.as_str());
    rec.out("regions", rep.regions);
    rec.out("separators", rep.separators);
    rec.out("valid_separators", rep.valid_separators);
    rec.passed = rep.lhs <= rep.mid * (1.0 + tol) && rep.mid <= rep.rhs * (1.0 + tol);
    Ok(rec)
}

fn region_command(ctx: &Ctx, cmd: Command, pair: &Pair, name: &str, set: &RegionSet, mut rec: Record) -> (Result<Record>, Vec<Artifact>) {
    let cp = &ctx.cfg.params;
    let space = ctx.space;
    let mut plots = Vec::new();
    let r = (|| -> Result<Record> {
        rec.out("region_size", set.count());
        match cmd {
            Command::Width => {
                rec.out_f("width", width(space, pair.x, pair.y, set)?);
                if cp.quasigeodesic_width {
                    let over = WidthOver::Quasigeodesics { truncation: cp.truncation };
                    rec.out_f("quasigeodesic_width", width_over(space, pair.x, pair.y, set, over)?);
                }
            }
            Command::PosField => {
                let f = position_function(space, pair.x, pair.y, set)?;
                let lip = lip_bound_check(space, &f, cp.lip_bound)?;
                let w = f.width();
                rec.out_f("width", w);
                rec.out_f("pos_y", f.value(pair.y));
                rec.out_f("max_lip", lip.max_lip);
                rec.out_f("max_lip_outside", lip.max_lip_outside);
                rec.out_f("lip_bound", lip.bound);
                rec.passed = f.value(pair.y) == w && lip.passed;
                if let Some(svg) = plot::contours(space, &f.values, w, 8, &[pair.x, pair.y], "position field") {
                    plots.push(Artifact { name: format!("pos_{}_{name}.svg", pair.label), svg });
                }
            }
            Command::Minkowski => {
                let riesz = riesz_measure(space, pair.x, pair.y, cp.truncation)?;
                let radii = minkowski_radii(space, &riesz, pair, set.mask(), cp.radii.as_deref());
                let c = minkowski_content(space, set.mask(), &riesz, &radii)?;
                rec.out_f("estimate", c.estimate);
                rec.out_f("argmin_radius", c.argmin_radius);
                rec.out("radii", nums(&radii));
                rec.out("profile", nums(&c.profile.iter().map(|p| p.1).collect::<Vec<_>>()));
                if let Some(d) = c.diagnostic {
                    rec.out("diagnostic", d);
                }
            }
            Command::Coarea => {
                let riesz = riesz_measure(space, pair.x, pair.y, cp.truncation)?;
                let f = position_function(space, pair.x, pair.y, set)?;
                let c = coarea_check(space, &f, &riesz)?;
                let tol = ctx.cfg.tolerances.coarea;
                rec.tol("coarea", tol);
                rec.out_f("lhs", c.lhs);
                rec.out_f("rhs", c.rhs);
                rec.out_f("margin", c.margin);
                rec.out_f("region_mass", c.region_mass);
                rec.out("levels", c.levels.len());
                rec.passed = c.margin >= -tol * c.rhs;
            }
            Command::Iso => {
                let r = cp.iso_radius.unwrap_or(space.distance(pair.x, pair.y) / 4.0);
                rec.set_param("radius", num(r));
                rec.set_param("lambda", num(cp.lambda));
                let c = relative_isoperimetric_check(space, set.mask(), pair.x, r, cp.lambda)?;
                rec.out_f("ratio", c.ratio);
                rec.out_f("lhs", c.lhs);
                rec.out_f("surface", c.surface);
                rec.out_f("big_ball_mass", c.big_ball_mass);
                rec.out("boundary_contaminated", c.boundary_contaminated);
                rec.passed = c.ratio.is_finite() && !c.boundary_contaminated;
            }
            _ => unreachable!("not a region command"),
        }
        Ok(rec)
    })();
    (r, plots)
}

fn minkowski_radii(space: &PointCloudSpace, riesz: &RieszMeasure, pair: &Pair, mask: &[bool], fixed: Option<&[f64]>) -> Vec<f64> {
    if let Some(r) = fixed {
        return r.to_vec();
    }
    let h = space.resolution();
    let dx = space.distances_from(pair.x);
    let dy = space.distances_from(pair.y);
    let margin = crate::separating::margin_from(&dx, &dy, mask);
    let mut radii = separator_radii(&radius_schedule(h, riesz.pole_distance() / 4.0), margin, h);
    if radii.is_empty() {
        radii.push(2.0 * h);
    }
    radii
}

/// Analytic checks in `R^2` and `R^3`, one record per quantity and dimension.
pub fn euclid_records(cfg: &ExperimentConfig) -> Vec<Record> {
    let tol = &cfg.tolerances;
    let mut out = Vec::new();
    let cmd = Command::EuclidValidate.name();
    for d in [2usize, 3] {
        let dn = d as f64;
        let rec = Record::new(cmd, format!("sphere-energy/d={d}")).param("d", d);
        out.push(finish(rec.clone(), (|| {
            let mut rec = rec.clone();
            let rs = [0.5, 1.0, 2.0];
            let vals = rs.iter().map(|&r| euclid::sphere_energy(d, r)).collect::<Result<Vec<_>>>()?;
            rec.set_param("radii", nums(&rs));
            rec.out("values", nums(&vals));
            rec.tol("relative", tol.sphere_energy);
            rec.tol("pairwise", tol.sphere_pairwise);
            let each = vals.iter().all(|v| (v - dn).abs() <= tol.sphere_energy * dn);
            let pairwise = vals.iter().all(|a| vals.iter().all(|b| (a - b).abs() <= tol.sphere_pairwise * b.abs()));
            rec.passed = each && pairwise;
            Ok(rec)
        })()));

        let rec = Record::new(cmd, format!("gradient/d={d}")).param("d", d).param("step", num(tol.gradient_step));
        out.push(finish(rec.clone(), (|| {
            let mut rec = rec.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (0xD1CE << 8) ^ d as u64);
            let mut worst: f64 = 0.0;
            let mut flagged = 0;
            for _ in 0..100 {
                let (x, z) = random_configuration(&mut rng, d);
                let c = euclid::gradient_identity_check(&x, &z, tol.gradient_step)?;
                worst = worst.max(c.relative_error);
                flagged += c.flagged as usize;
            }
            let mut z = vec![0.0; d];
            z[0] = 0.3;
            z[1] = 0.4;
            let x = vec![0.0; d];
            let coarse = euclid::gradient_identity_check(&x, &z, 10.0 * tol.gradient_step)?.relative_error;
            let fine = euclid::gradient_identity_check(&x, &z, tol.gradient_step)?.relative_error;
            rec.set_param("configurations", 100);
            rec.out_f("max_relative_error", worst);
            rec.out("flagged", flagged);
            rec.out_f("order_ratio", coarse / fine);
            rec.tol("relative", tol.gradient);
            rec.passed = worst <= tol.gradient && flagged == 0;
            Ok(rec)
        })()));

        let ls = [1.0, 2.0, 4.0, 8.0];
        let rec = Record::new(cmd, format!("separator/d={d}")).param("d", d).param("truncations", nums(&ls));
        out.push(finish(rec.clone(), (|| {
            let mut rec = rec.clone();
            let mut y = vec![0.0; d];
            y[0] = 1.0;
            let mut deltas = Vec::new();
            let mut seps = Vec::new();
            for &l in &ls {
                let e = EuclideanConfig::new(vec![0.0; d], y.clone(), l)?;
                deltas.push(e.delta_l()?);
                seps.push(e.halfspace_separator_energy()?);
            }
            let c0 = euclid::sphere_energy(d, 1.0)?;
            rec.out("delta", nums(&deltas));
            rec.out("separator_energy", nums(&seps));
            rec.out_f("c0", c0);
            let monotone = deltas.windows(2).all(|w| w[1] <= w[0]);
            let chain = seps.iter().zip(&deltas).all(|(s, dl)| *s >= c0 - dl);
            let half = seps.iter().zip(&deltas).all(|(s, dl)| *dl >= c0 / 2.0 || *s >= c0 / 2.0);
            rec.passed = monotone && chain && half;
            Ok(rec)
        })()));

        let rec = Record::new(cmd, format!("ball-mass/d={d}")).param("d", d);
        out.push(finish(rec.clone(), (|| {
            let mut rec = rec.clone();
            let mut y = vec![0.0; d];
            y[0] = 1.0;
            let e = EuclideanConfig::new(vec![0.0; d], y, 1.0)?;
            let rs = [1e-3, 1e-2, 0.1];
            let mut ratio = Vec::new();
            let mut exact = true;
            for &r in &rs {
                let m = e.riesz_ball_mass(r)?;
                exact &= m.x_term == dn * r;
                ratio.push(m.total / r);
            }
            rec.set_param("radii", nums(&rs));
            rec.out("mass_over_r", nums(&ratio));
            rec.tol("small_radius", 1e-2);
            rec.passed = exact && (ratio[0] / dn - 1.0).abs() <= 1e-2 && ratio.windows(2).all(|w| w[1] >= w[0]);
            Ok(rec)
        })()));
    }
    out
}

/// `x` in `[-1, 1]^d`, `z` at distance in `[0.2, 2]` from `x`.
pub fn random_configuration(rng: &mut impl Rng, d: usize) -> (Vec<f64>, Vec<f64>) {
    let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let u = loop {
        let u: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            break u.into_iter().map(|v| v / n).collect::<Vec<_>>();
        }
    };
    let s = rng.gen_range(0.2..2.0);
    let z = x.iter().zip(&u).map(|(a, b)| a + s * b).collect();
    (x, z)
}
