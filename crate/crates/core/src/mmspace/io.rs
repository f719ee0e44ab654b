//! Line-oriented point-cloud text format.
//!
//! ```text
//! # comment
//! metric graph-path          (optional, default ambient-euclidean)
//! resolution 0.05            (optional, default: median edge length)
//! v <id> <x1> .. <xd> <weight>
//! e <id> <id> [length]       (length defaults to the ambient distance)
//! ```
//!
//! Vertex ids are arbitrary integers; they are renumbered in order of
//! appearance. Numbers are written in shortest round-trip form.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{MetricKind, PointCloudSpace, SpaceBuilder};
use crate::error::{Error, Result};

pub fn parse_point_cloud(text: &str) -> Result<PointCloudSpace> {
    let mut metric = MetricKind::AmbientEuclidean;
    let mut resolution = None;
    let mut dim: Option<usize> = None;
    let mut verts: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut ids: HashMap<i64, usize> = HashMap::new();
    let mut edges: Vec<(i64, i64, Option<f64>, usize)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let perr = |msg: String| Error::Parse { line, msg };
        let num = |t: &str| -> Result<f64> {
            t.parse::<f64>()
                .map_err(|_| Error::Parse { line, msg: format!("bad number `{t}`") })
        };
        let int = |t: &str| -> Result<i64> {
            t.parse::<i64>()
                .map_err(|_| Error::Parse { line, msg: format!("bad vertex id `{t}`") })
        };
        match toks[0] {
            "metric" if toks.len() == 2 => metric = toks[1].parse().map_err(|e: Error| perr(e.to_string()))?,
            "resolution" if toks.len() == 2 => resolution = Some(num(toks[1])?),
            "dim" if toks.len() == 2 => {
                dim = Some(toks[1].parse().map_err(|_| perr(format!("bad dimension `{}`", toks[1])))?)
            }
            "v" => {
                if toks.len() < 3 {
                    return Err(perr("vertex record needs an id and a weight".into()));
                }
                let d = toks.len() - 3;
                match dim {
                    Some(expected) if expected != d => {
                        return Err(perr(format!("vertex has {d} coordinates, expected {expected}")))
                    }
                    None => dim = Some(d),
                    _ => {}
                }
                let id = int(toks[1])?;
                let coords = toks[2..2 + d].iter().map(|t| num(t)).collect::<Result<Vec<_>>>()?;
                let w = num(toks[2 + d])?;
                if ids.insert(id, verts.len()).is_some() {
                    return Err(perr(format!("duplicate vertex id {id}")));
                }
                verts.push((coords, w));
            }
            "e" => {
                if toks.len() != 3 && toks.len() != 4 {
                    return Err(perr("edge record is `e <id> <id> [length]`".into()));
                }
                let len = if toks.len() == 4 { Some(num(toks[3])?) } else { None };
                edges.push((int(toks[1])?, int(toks[2])?, len, line));
            }
            other => return Err(perr(format!("unknown record `{other}`"))),
        }
    }

    let dim = dim.unwrap_or(0);
    let mut b = SpaceBuilder::new(dim, metric).with_capacity(verts.len(), edges.len());
    if let Some(h) = resolution {
        b.set_resolution(h);
    }
    for (c, w) in &verts {
        b.add_vertex(c, *w);
    }
    for (a, c, len, line) in edges {
        let lookup = |id: i64| {
            ids.get(&id).copied().ok_or(Error::Parse {
                line,
                msg: format!("edge references unknown vertex {id}"),
            })
        };
        b.add_edge(lookup(a)?, lookup(c)?, len);
    }
    b.build()
}

pub fn format_point_cloud(space: &PointCloudSpace) -> String {
    let mut out = String::new();
    writeln!(out, "metric {}", space.metric_kind().as_str()).unwrap();
    writeln!(out, "dim {}", space.dim()).unwrap();
    writeln!(out, "resolution {}", space.resolution()).unwrap();
    for i in 0..space.len() {
        write!(out, "v {i}").unwrap();
        for c in space.coords(i) {
            write!(out, " {c}").unwrap();
        }
        writeln!(out, " {}", space.weight(i)).unwrap();
    }
    for (i, j, l) in space.edges() {
        writeln!(out, "e {i} {j} {l}").unwrap();
    }
    out
}

pub fn read_point_cloud(path: impl AsRef<Path>) -> Result<PointCloudSpace> {
    parse_point_cloud(&std::fs::read_to_string(path)?)
}

pub fn write_point_cloud(space: &PointCloudSpace, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_point_cloud(space))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn parses_minimal_file() {
        let text = "# two points\nv 10 0.0 0.0 1.5\nv 20 3.0 4.0 2\ne 10 20\n";
        let s = parse_point_cloud(text).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.neighbors(0), &[(1, 5.0)]);
        assert_eq!(s.weight(0), 1.5);
    }

    #[test]
    fn abstract_labels_need_lengths() {
        let s = parse_point_cloud("metric graph-path\nv 0 1\nv 1 1\ne 0 1 2.5\n").unwrap();
        assert_eq!(s.distance(0, 1), 2.5);
        assert!(parse_point_cloud("metric graph-path\nv 0 1\nv 1 1\ne 0 1\n").is_err());
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_point_cloud("v 0 0.0 1\nv 1 x 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_point_cloud("v 0 0.0 1\ne 0 7\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn gallery_space_round_trips() {
        let s = gallery::carpet_like(2, &[1.0 / 3.0, 1.0 / 9.0], 28).unwrap();
        let back = parse_point_cloud(&format_point_cloud(&s)).unwrap();
        assert_eq!(back.content_hash(), s.content_hash());
    }
}
