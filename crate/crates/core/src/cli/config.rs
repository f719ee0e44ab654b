use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gallery::GallerySpec;
use crate::mmspace::{read_point_cloud, PointCloudSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Riesz,
    Mincut,
    Pencil,
    Modulus,
    Width,
    SrScan,
    PosField,
    Minkowski,
    Sandwich,
    Coarea,
    Iso,
    EuclidValidate,
}

impl Command {
    pub const ALL: [Command; 12] = [
        Command::Riesz,
        Command::Mincut,
        Command::Pencil,
        Command::Modulus,
        Command::Width,
        Command::SrScan,
        Command::PosField,
        Command::Minkowski,
        Command::Sandwich,
        Command::Coarea,
        Command::Iso,
        Command::EuclidValidate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Riesz => "riesz",
            Command::Mincut => "mincut",
            Command::Pencil => "pencil",
            Command::Modulus => "modulus",
            Command::Width => "width",
            Command::SrScan => "sr-scan",
            Command::PosField => "pos-field",
            Command::Minkowski => "minkowski",
            Command::Sandwich => "sandwich",
            Command::Coarea => "coarea",
            Command::Iso => "iso",
            Command::EuclidValidate => "euclid-validate",
        }
    }

    pub fn needs_space(self) -> bool {
        self != Command::EuclidValidate
    }

    /// Commands that run once per configured region.
    pub fn per_region(self) -> bool {
        matches!(self, Command::Width | Command::PosField | Command::Minkowski | Command::Coarea | Command::Iso)
    }
}

impl std::str::FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<&str> = Command::ALL.iter().map(|c| c.name()).collect();
                Error::Config(format!("unknown command '{s}', expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FileKind {
    File,
}

/// Where the space comes from: a gallery generator or a point-cloud file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceSource {
    File { kind: FileKind, path: PathBuf },
    Gallery(GallerySpec),
}

impl SpaceSource {
    pub fn build(&self, base_dir: &Path) -> Result<PointCloudSpace> {
        match self {
            SpaceSource::File { path, .. } => {
                let full = if path.is_absolute() { path.clone() } else { base_dir.join(path) };
                read_point_cloud(full)
            }
            SpaceSource::Gallery(spec) => spec.build(),
        }
    }
}

/// A pole given by vertex id or by a point snapped to its nearest vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PoleRef {
    Id(usize),
    Point(Vec<f64>),
}

impl PoleRef {
    pub fn resolve(&self, space: &PointCloudSpace) -> Result<usize> {
        match self {
            PoleRef::Id(i) => {
                space.check_vertex(*i)?;
                Ok(*i)
            }
            PoleRef::Point(p) => space.nearest_vertex(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolePair {
    pub x: PoleRef,
    pub y: PoleRef,
    #[serde(default)]
    pub label: Option<String>,
}

fn d_truncation() -> f64 {
    1.0
}
fn d_deltas() -> Vec<f64> {
    vec![0.1]
}
fn d_k() -> usize {
    8
}
fn d_lambda() -> f64 {
    2.0
}
fn d_lip() -> f64 {
    1.0
}
fn d_samples() -> usize {
    20
}
fn d_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Truncation `L` of the Riesz measure and the quasigeodesic bound.
    #[serde(default = "d_truncation")]
    pub truncation: f64,
    /// Net scales for `mincut` and `pencil`.
    #[serde(default = "d_deltas")]
    pub deltas: Vec<f64>,
    /// Number of enumerated quasigeodesics for `modulus`.
    #[serde(default = "d_k")]
    pub k: usize,
    /// Dilation of the isoperimetric ball.
    #[serde(default = "d_lambda")]
    pub lambda: f64,
    /// Lipschitz constant of the metric against graph length.
    #[serde(default = "d_lip")]
    pub lip_bound: f64,
    /// Minkowski radius schedule; default `2h, 4h, …` capped by the margin.
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    /// Isoperimetric ball radius; default `d(x, y)/4`.
    #[serde(default)]
    pub iso_radius: Option<f64>,
    /// Doubling constant for the Riesz mass bound; default estimated.
    #[serde(default)]
    pub doubling: Option<f64>,
    /// Random nonnegative test functions per pencil record.
    #[serde(default = "d_samples")]
    pub pencil_samples: usize,
    /// Also report the width over `L`-quasigeodesics.
    #[serde(default)]
    pub quasigeodesic_width: bool,
}

impl Default for Params {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateSpec {
    /// Include the standard suite (balls, half-spaces, slabs, layers, blobs).
    #[serde(default = "d_true")]
    pub standard: bool,
    /// Include the configured regions.
    #[serde(default = "d_true")]
    pub regions: bool,
}

impl Default for CandidateSpec {
    fn default() -> Self {
        Self { standard: true, regions: true }
    }
}

fn t_flow() -> f64 {
    1e-9
}
fn t_coarea() -> f64 {
    crate::separating::COAREA_TOLERANCE
}
fn t_sandwich() -> f64 {
    crate::separating::SANDWICH_TOLERANCE
}
fn t_sphere() -> f64 {
    1e-3
}
fn t_sphere_pair() -> f64 {
    5e-3
}
fn t_gradient() -> f64 {
    1e-5
}
fn t_step() -> f64 {
    1e-4
}
fn t_leftover() -> f64 {
    1e-9
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "t_flow")]
    pub flow_cut: f64,
    #[serde(default = "t_coarea")]
    pub coarea: f64,
    #[serde(default = "t_sandwich")]
    pub sandwich: f64,
    #[serde(default = "t_sphere")]
    pub sphere_energy: f64,
    #[serde(default = "t_sphere_pair")]
    pub sphere_pairwise: f64,
    #[serde(default = "t_gradient")]
    pub gradient: f64,
    #[serde(default = "t_step")]
    pub gradient_step: f64,
    #[serde(default = "t_leftover")]
    pub pencil_leftover: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub commands: Vec<Command>,
    #[serde(default)]
    pub space: Option<SpaceSource>,
    #[serde(default)]
    pub poles: Vec<PolePair>,
    #[serde(default)]
    pub params: Params,
    /// Named region expressions.
    #[serde(default)]
    pub regions: BTreeMap<String, String>,
    #[serde(default)]
    pub candidates: CandidateSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub plots: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        if !(p.truncation >= 1.0) {
            return Err(Error::Config(format!("truncation must be at least 1, got {}", p.truncation)));
        }
        if p.deltas.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::Config("net scales must be positive".into()));
        }
        if !(p.lambda >= 1.0 && p.lip_bound > 0.0) {
            return Err(Error::Config("lambda must be at least 1 and lip_bound positive".into()));
        }
        if p.k == 0 {
            return Err(Error::Config("k must be positive".into()));
        }
        if let Some(r) = &p.radii {
            if r.is_empty() || r.iter().any(|v| !(*v > 0.0)) {
                return Err(Error::Config("radii must be a nonempty list of positive values".into()));
            }
        }
        for (name, src) in &self.regions {
            src.parse::<crate::separating::region::RegionExpr>()
                .map_err(|e| Error::Config(format!("region '{name}': {e}")))?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_string(self).expect("config is plain data");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_has_defaults() {
        let c = ExperimentConfig::from_toml("").unwrap();
        assert!(c.commands.is_empty());
        assert_eq!(c.params.truncation, 1.0);
        assert_eq!(c.tolerances.coarea, 0.15);
        assert_eq!(c, ExperimentConfig::default());
    }

    #[test]
    fn full_config_parses() {
        let c = ExperimentConfig::from_toml(
            r#"
            seed = 3
            commands = ["riesz", "sr-scan", "euclid-validate"]
            plots = true
            [space]
            kind = "grid-euclidean"
            dim = 2
            extent = 1.0
            h = 0.05
            [[poles]]
            x = [-0.25, 0.0]
            y = 7
            [params]
            deltas = [0.2, 0.1]
            [regions]
            slab = "intersect(halfspace(1, 0, 0.1), halfspace(-1, 0, 0.1))"
            "#,
        )
        .unwrap();
        assert_eq!(c.commands[1], Command::SrScan);
        assert!(matches!(c.space, Some(SpaceSource::Gallery(GallerySpec::GridEuclidean { .. }))));
        assert_eq!(c.poles[0].y, PoleRef::Id(7));
        let f = ExperimentConfig::from_toml("[space]\nkind = \"file\"\npath = \"a.txt\"\n").unwrap();
        assert!(matches!(f.space, Some(SpaceSource::File { .. })));
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            "commands = [\"nope\"]",
            "[params]\ntruncation = 0.5",
            "[params]\ndeltas = [0.0]",
            "[regions]\na = \"ball(1)\"",
            "unknown = 1",
        ] {
            assert!(ExperimentConfig::from_toml(bad).is_err(), "{bad}");
        }
        assert!("sr-scan".parse::<Command>().is_ok());
        assert!("scan".parse::<Command>().is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
    }
}
