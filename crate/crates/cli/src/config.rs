//! Resolved run configuration and the parsers for the structured values of
//! the command-line flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use grf_core::fem::{MassRoot, SolverKind};
use grf_core::mesh::MeshKind;
use grf_core::robin::QuadratureKind;
use grf_core::variance::VarianceMethod;

/// Invalid flag combinations and values; reported with exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Mesh,
    Probe,
    Beta,
    Variance,
    Sample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshSource {
    Generated { kind: String, n: usize },
    File { path: PathBuf },
}

impl FromStr for MeshSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some((kind, n)) = s.split_once(':') {
            if kind == "parallelogram" || kind.parse::<MeshKind>().is_ok() {
                let n = n
                    .parse()
                    .map_err(|_| format!("mesh size in '{s}' must be a positive integer"))?;
                if n == 0 {
                    return Err(format!("mesh size in '{s}' must be positive"));
                }
                return Ok(MeshSource::Generated {
                    kind: kind.to_string(),
                    n,
                });
            }
        }
        Ok(MeshSource::File { path: PathBuf::from(s) })
    }
}

impl fmt::Display for MeshSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshSource::Generated { kind, n } => write!(f, "{kind}:{n}"),
            MeshSource::File { path } => write!(f, "{}", path.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcKind {
    Dirichlet,
    Neumann,
    Robin,
}

impl FromStr for BcKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dirichlet" => Ok(BcKind::Dirichlet),
            "neumann" => Ok(BcKind::Neumann),
            "robin" => Ok(BcKind::Robin),
            _ => Err(format!("unknown boundary condition '{s}' (dirichlet, neumann, robin)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaSource {
    Const { value: f64 },
    Roininen,
    Optimal { method: BetaMethod },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaMethod {
    Centers,
    Radial,
}

impl BetaMethod {
    pub fn kind(self) -> QuadratureKind {
        match self {
            BetaMethod::Centers => QuadratureKind::ElementCenters,
            BetaMethod::Radial => QuadratureKind::RadialProjection,
        }
    }
}

impl FromStr for BetaSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "roininen" => Ok(BetaSource::Roininen),
            "opt:centers" => Ok(BetaSource::Optimal {
                method: BetaMethod::Centers,
            }),
            "opt:radial" => Ok(BetaSource::Optimal {
                method: BetaMethod::Radial,
            }),
            _ => match s.strip_prefix("const:") {
                Some(v) => {
                    let value: f64 = v.parse().map_err(|_| format!("bad Robin constant '{v}'"))?;
                    if !(value >= 0.0) || !value.is_finite() {
                        return Err(format!("Robin constant must be finite and >= 0, got {value}"));
                    }
                    Ok(BetaSource::Const { value })
                }
                None => Err(format!(
                    "unknown beta source '{s}' (const:VALUE, roininen, opt:centers, opt:radial)"
                )),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceSpec {
    Direct,
    Stochastic { samples: usize },
}

impl VarianceSpec {
    pub fn method(self, seed: u64) -> VarianceMethod {
        match self {
            VarianceSpec::Direct => VarianceMethod::Direct,
            VarianceSpec::Stochastic { samples } => VarianceMethod::Stochastic { samples, seed },
        }
    }
}

impl FromStr for VarianceSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "direct" {
            return Ok(VarianceSpec::Direct);
        }
        match s.strip_prefix("stochastic:") {
            Some(n) => match n.parse::<usize>() {
                Ok(samples) if samples > 0 => Ok(VarianceSpec::Stochastic { samples }),
                _ => Err(format!("sample count in '{s}' must be a positive integer")),
            },
            None => Err(format!("unknown variance method '{s}' (direct, stochastic:N)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MassRootSpec {
    Lumped,
    Dense,
}

impl MassRootSpec {
    pub fn root(self) -> MassRoot {
        match self {
            MassRootSpec::Lumped => MassRoot::Lumped,
            MassRootSpec::Dense => MassRoot::DenseCholesky,
        }
    }
}

impl FromStr for MassRootSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lumped" => Ok(MassRootSpec::Lumped),
            "dense" => Ok(MassRootSpec::Dense),
            _ => Err(format!("unknown mass root '{s}' (lumped, dense)")),
        }
    }
}

/// `p:d:count` with comma-separated coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionSpec {
    pub origin: Vec<f64>,
    pub direction: Vec<f64>,
    pub count: usize,
}

pub const DEFAULT_SECTION_POINTS: usize = 200;

pub fn parse_point(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad coordinate '{t}' in '{s}'"))
        })
        .collect::<Result<Vec<_>, _>>()
        .and_then(|v| {
            if v.iter().all(|x| x.is_finite()) {
                Ok(v)
            } else {
                Err(format!("coordinates must be finite: '{s}'"))
            }
        })
}

impl FromStr for SectionSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let (origin, direction, count) = match parts.as_slice() {
            [p, d] => (parse_point(p)?, parse_point(d)?, DEFAULT_SECTION_POINTS),
            [p, d, c] => (
                parse_point(p)?,
                parse_point(d)?,
                c.parse().map_err(|_| format!("bad point count '{c}'"))?,
            ),
            _ => return Err(format!("section must look like px,py:dx,dy[:count], got '{s}'")),
        };
        if origin.len() != direction.len() {
            return Err("section point and direction have different dimensions".into());
        }
        if count < 2 {
            return Err("a section needs at least 2 points".into());
        }
        Ok(SectionSpec {
            origin,
            direction,
            count,
        })
    }
}

/// Everything needed to reproduce a run; written next to every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub mesh: MeshSource,
    pub gamma: f64,
    pub alpha: f64,
    pub bc: BcKind,
    pub beta: Option<BetaSource>,
    pub stride: usize,
    pub normalize: Option<VarianceSpec>,
    pub variance: VarianceSpec,
    pub center: Option<Vec<f64>>,
    pub section: Option<SectionSpec>,
    pub free_space: bool,
    pub seed: u64,
    pub count: usize,
    pub mass_root: MassRootSpec,
    pub tol: Option<f64>,
    pub output: PathBuf,
}

impl RunConfig {
    /// Cross-flag consistency; per-value checks happen while parsing.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) || !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(format!(
                "gamma and alpha must be positive, got gamma = {}, alpha = {}",
                self.gamma, self.alpha
            ));
        }
        if self.beta.is_some() && self.bc != BcKind::Robin {
            return Err("--beta needs --bc robin".into());
        }
        if self.bc == BcKind::Robin && self.beta.is_none() {
            return Err("--bc robin needs a Robin coefficient (--beta)".into());
        }
        if self.bc == BcKind::Dirichlet && (self.normalize.is_some()) {
            return Err("variance normalization is not available with Dirichlet conditions".into());
        }
        if self.stride == 0 {
            return Err("--stride must be >= 1".into());
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(format!("--tol must be in (0, 1), got {t}"));
            }
        }
        match self.command {
            Command::Probe => {
                if self.center.is_none() {
                    return Err("probe needs --center".into());
                }
                if self.section.is_none() {
                    return Err("probe needs --section".into());
                }
            }
            Command::Beta => {
                if !matches!(self.beta, Some(BetaSource::Optimal { .. })) {
                    return Err("beta needs --bc robin --beta opt:centers|opt:radial".into());
                }
            }
            Command::Sample => {
                if self.count == 0 {
                    return Err("--count must be >= 1".into());
                }
            }
            Command::Mesh | Command::Variance => {}
        }
        Ok(())
    }

    pub fn solver(&self) -> SolverKind {
        match self.tol {
            Some(tol) => SolverKind::Cg { tol, maxit: None },
            None => SolverKind::Direct,
        }
    }

    pub fn sidecar_path(&self) -> PathBuf {
        sidecar_for(&self.output)
    }
}

pub fn sidecar_for(output: &std::path::Path) -> PathBuf {
    let mut name = output.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".json");
    output.with_file_name(name)
}
