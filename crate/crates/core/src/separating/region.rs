//! Region expressions used in configuration files:
//!
//! ```text
//! ball(cx, cy, …, r)          open metric ball around the vertex nearest to c
//! halfspace(n1, n2, …, b)     {z : ⟨n, z⟩ ≤ b}
//! levelset(field, t)          {pos ≤ t} for a named position field
//! union(e1, e2, …)
//! intersect(e1, e2, …)
//! file(path)                  whitespace-separated vertex ids, '#' comments
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::RegionSet;
use crate::error::{Error, Result};
use crate::mmspace::{in_open_ball, PointCloudSpace};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum RegionExpr {
    Ball { center: Vec<f64>, radius: f64 },
    Halfspace { normal: Vec<f64>, offset: f64 },
    Levelset { field: String, level: f64 },
    Union(Vec<RegionExpr>),
    Intersect(Vec<RegionExpr>),
    File(PathBuf),
}

/// Named position-field values and the directory `file(…)` paths are
/// resolved against.
#[derive(Clone, Debug, Default)]
pub struct RegionContext {
    pub fields: BTreeMap<String, Vec<f64>>,
    pub base_dir: PathBuf,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: 1,
            msg: format!("{} at column {}", msg.into(), self.pos + 1),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn token(&mut self) -> &'a str {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let end = rest.find(|c: char| c == ',' || c == '(' || c == ')' || c.is_whitespace()).unwrap_or(rest.len());
        self.pos += end;
        &rest[..end]
    }

    fn number(&mut self) -> Result<f64> {
        let tok = self.token();
        tok.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.err(format!("expected a number, found '{tok}'")))
    }

    fn numbers(&mut self) -> Result<Vec<f64>> {
        let mut out = vec![self.number()?];
        while self.eat(',') {
            out.push(self.number()?);
        }
        Ok(out)
    }

    fn text(&mut self) -> Result<String> {
        self.skip_ws();
        if self.eat('"') {
            let rest = &self.src[self.pos..];
            let end = rest.find('"').ok_or_else(|| self.err("unterminated string"))?;
            self.pos += end + 1;
            return Ok(rest[..end].to_string());
        }
        let tok = self.token();
        if tok.is_empty() {
            return Err(self.err("expected a name"));
        }
        Ok(tok.to_string())
    }

    fn expr(&mut self) -> Result<RegionExpr> {
        let head = self.token();
        self.expect('(')?;
        let e = match head {
            "ball" => {
                let mut v = self.numbers()?;
                if v.len() < 2 {
                    return Err(self.err("ball needs a center and a radius"));
                }
                let radius = v.pop().unwrap();
                if !(radius > 0.0) {
                    return Err(self.err("ball radius must be positive"));
                }
                RegionExpr::Ball { center: v, radius }
            }
            "halfspace" => {
                let mut v = self.numbers()?;
                if v.len() < 2 {
                    return Err(self.err("halfspace needs a normal and an offset"));
                }
                let offset = v.pop().unwrap();
                RegionExpr::Halfspace { normal: v, offset }
            }
            "levelset" => {
                let field = self.text()?;
                self.expect(',')?;
                RegionExpr::Levelset { field, level: self.number()? }
            }
            "union" | "intersect" => {
                let mut parts = vec![self.expr()?];
                while self.eat(',') {
                    parts.push(self.expr()?);
                }
                if head == "union" {
                    RegionExpr::Union(parts)
                } else {
                    RegionExpr::Intersect(parts)
                }
            }
            "file" => RegionExpr::File(PathBuf::from(self.text()?)),
            other => return Err(self.err(format!("unknown region kind '{other}'"))),
        };
        self.expect(')')?;
        Ok(e)
    }
}

impl std::str::FromStr for RegionExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }
}

fn read_vertex_file(path: &Path, n: usize) -> Result<Vec<usize>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read region file {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        for tok in body.split_whitespace() {
            let id: usize = tok.parse().map_err(|_| Error::Parse {
                line: k + 1,
                msg: format!("invalid vertex id '{tok}' in {}", path.display()),
            })?;
            if id >= n {
                return Err(Error::Parse {
                    line: k + 1,
                    msg: format!("vertex id {id} out of range in {}", path.display()),
                });
            }
            out.push(id);
        }
    }
    Ok(out)
}

impl RegionExpr {
    pub fn evaluate(&self, space: &PointCloudSpace, ctx: &RegionContext) -> Result<RegionSet> {
        let n = space.len();
        match self {
            RegionExpr::Ball { center, radius } => {
                let c = space.nearest_vertex(center)?;
                let d = space.distances_from(c);
                Ok(RegionSet::from_mask(d.iter().map(|&v| in_open_ball(v, *radius)).collect()))
            }
            RegionExpr::Halfspace { normal, offset } => {
                if normal.len() != space.dim() {
                    return Err(Error::input(format!(
                        "halfspace normal has dimension {}, space has {}",
                        normal.len(),
                        space.dim()
                    )));
                }
                Ok(RegionSet::from_mask(
                    (0..n)
                        .map(|i| space.coords(i).iter().zip(normal).map(|(a, b)| a * b).sum::<f64>() <= *offset)
                        .collect(),
                ))
            }
            RegionExpr::Levelset { field, level } => {
                let values = ctx
                    .fields
                    .get(field)
                    .ok_or_else(|| Error::Config(format!("unknown position field '{field}'")))?;
                if values.len() != n {
                    return Err(Error::input(format!("field '{field}' does not match the space")));
                }
                Ok(RegionSet::from_mask(values.iter().map(|&p| p <= *level).collect()))
            }
            RegionExpr::Union(parts) => parts.iter().try_fold(RegionSet::empty(n), |acc, p| {
                Ok(acc.union(&p.evaluate(space, ctx)?))
            }),
            RegionExpr::Intersect(parts) => parts.iter().try_fold(RegionSet::full(n), |acc, p| {
                Ok(acc.intersection(&p.evaluate(space, ctx)?))
            }),
            RegionExpr::File(path) => {
                let full = if path.is_absolute() { path.clone() } else { ctx.base_dir.join(path) };
                RegionSet::from_vertices(n, &read_vertex_file(&full, n)?)
            }
        }
    }
}

/// Parses and evaluates a region expression.
pub fn parse_region(src: &str, space: &PointCloudSpace, ctx: &RegionContext) -> Result<RegionSet> {
    src.parse::<RegionExpr>()?.evaluate(space, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn parses_nested_expressions() {
        let e: RegionExpr = "union(ball(0.1, -0.2, 0.3), intersect(halfspace(1, 0, 0.5), levelset(\"pos a\", 0.25)))"
            .parse()
            .unwrap();
        assert_eq!(
            e,
            RegionExpr::Union(vec![
                RegionExpr::Ball { center: vec![0.1, -0.2], radius: 0.3 },
                RegionExpr::Intersect(vec![
                    RegionExpr::Halfspace { normal: vec![1.0, 0.0], offset: 0.5 },
                    RegionExpr::Levelset { field: "pos a".into(), level: 0.25 },
                ]),
            ])
        );
        assert_eq!("file(regions/a.txt)".parse::<RegionExpr>().unwrap(), RegionExpr::File("regions/a.txt".into()));
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["ball(1)", "ball(0, 0, -1)", "cube(1, 2)", "union(ball(0,0,1)", "ball(0, x, 1)", "ball(0,0,1) junk"] {
            assert!(bad.parse::<RegionExpr>().is_err(), "{bad}");
        }
    }

    #[test]
    fn evaluates_against_a_grid() {
        let s = gallery::euclidean_grid(2, 1.0, 0.1).unwrap();
        let mut ctx = RegionContext::default();
        let pos: Vec<f64> = (0..s.len()).map(|i| s.coords(i)[0] + 0.5).collect();
        ctx.fields.insert("p".into(), pos);
        let left = parse_region("halfspace(1, 0, 0)", &s, &ctx).unwrap();
        let level = parse_region("levelset(p, 0.5)", &s, &ctx).unwrap();
        assert_eq!(left, level);
        let ball = parse_region("ball(0, 0, 0.15)", &s, &ctx).unwrap();
        assert_eq!(ball.count(), 9);
        let both = parse_region("intersect(ball(0, 0, 0.15), halfspace(1, 0, 0))", &s, &ctx).unwrap();
        assert_eq!(both.count(), 6);
        assert!(parse_region("levelset(q, 1)", &s, &ctx).is_err());

        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("v.txt"), "0 1 # first two\n5\n").unwrap();
        ctx.base_dir = dir.path().to_path_buf();
        let f = parse_region("file(v.txt)", &s, &ctx).unwrap();
        assert_eq!(f.members(), vec![0, 1, 5]);
        std::fs::write(dir.path().join("bad.txt"), "0 999\n").unwrap();
        assert!(parse_region("file(bad.txt)", &s, &ctx).is_err());
    }
}
