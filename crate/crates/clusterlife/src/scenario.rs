//! JSON scenario files: schema, validation and seeded generation.
//!
//! ```json
//! {
//!   "version": 1,
//!   "base_station": [2.0, -2.0],
//!   "path_loss": { "rule": "distance", "gamma": 2.0 },
//!   "correlation": { "model": "gaussian_field", "sigma2": 1.0, "a": 0.5, "offset": 0.0 },
//!   "energy": { "mode": "shannon" },
//!   "solver": { "samples": 8 },
//!   "nodes": [ { "id": 0, "x": 0.5, "y": 1.0, "energy": 1.0 } ]
//! }
//! ```
//!
//! `path_loss` may also be `{ "rule": "explicit" }`, in which case every node
//! carries its own `path_loss`. Explicit per-node values win over the
//! distance rule; mixing nodes with and without them is rejected.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use clusterlife_core::{ClusterSpec, CorrelationModel, EnergyMode, NodeSpec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_GAMMA: f64 = 2.0;
pub const DEFAULT_SAMPLES: usize = 8;
pub const DEFAULT_GRID_DENSITY: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    pub base_station: [f64; 2],
    pub path_loss: PathLossRule,
    pub correlation: CorrelationBlock,
    #[serde(default)]
    pub energy: EnergyBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    pub nodes: Vec<NodeEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathLossRule {
    Explicit,
    Distance {
        #[serde(default = "default_gamma")]
        gamma: f64,
    },
}

fn default_gamma() -> f64 {
    DEFAULT_GAMMA
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum CorrelationBlock {
    BitDistance {
        n: u32,
    },
    GaussianField {
        sigma2: f64,
        a: f64,
        #[serde(default)]
        offset: f64,
    },
}

impl From<CorrelationBlock> for CorrelationModel {
    fn from(c: CorrelationBlock) -> Self {
        match c {
            CorrelationBlock::BitDistance { n } => CorrelationModel::BitDistance { n },
            CorrelationBlock::GaussianField { sigma2, a, offset } => {
                CorrelationModel::GaussianField { sigma2, a, offset }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnergyBlock {
    #[default]
    Shannon,
    Srra {
        #[serde(default = "default_srra_c")]
        c: f64,
    },
}

fn default_srra_c() -> f64 {
    std::f64::consts::LN_2
}

impl From<EnergyBlock> for EnergyMode {
    fn from(e: EnergyBlock) -> Self {
        match e {
            EnergyBlock::Shannon => EnergyMode::Shannon,
            EnergyBlock::Srra { c } => EnergyMode::Srra { c },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_density: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl SolverBlock {
    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(DEFAULT_SAMPLES)
    }

    pub fn grid_density(&self) -> usize {
        self.grid_density.unwrap_or(DEFAULT_GRID_DENSITY)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub energy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_loss: Option<f64>,
}

/// A validated scenario: the cluster plus the run settings from the file.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub cluster: ClusterSpec,
    pub mode: EnergyMode,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| AppError::Parse {
            field: path_or_root(e.path().to_string()),
            message: e.inner().to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    /// Path loss per node, in file order.
    pub fn path_losses(&self) -> Result<Vec<f64>> {
        let explicit = self.nodes.iter().filter(|n| n.path_loss.is_some()).count();
        if explicit == self.nodes.len() {
            return Ok(self.nodes.iter().map(|n| n.path_loss.unwrap()).collect());
        }
        if explicit > 0 {
            let k = self
                .nodes
                .iter()
                .position(|n| n.path_loss.is_none())
                .unwrap();
            return Err(AppError::validation(
                format!("nodes[{k}].path_loss"),
                "either every node carries path_loss or none does",
            ));
        }
        match self.path_loss {
            PathLossRule::Explicit => Err(AppError::validation(
                "nodes[0].path_loss",
                "required by the explicit path-loss rule",
            )),
            PathLossRule::Distance { gamma } => {
                let [bx, by] = self.base_station;
                Ok(self
                    .nodes
                    .iter()
                    .map(|n| (n.x - bx).hypot(n.y - by).powf(gamma))
                    .collect())
            }
        }
    }

    /// Checks every field and builds the cluster.
    pub fn validate(&self) -> Result<Scenario> {
        if self.version != FORMAT_VERSION {
            return Err(AppError::validation(
                "version",
                format!(
                    "unsupported version {} (expected {FORMAT_VERSION})",
                    self.version
                ),
            ));
        }
        if !self.base_station.iter().all(|v| v.is_finite()) {
            return Err(AppError::validation(
                "base_station",
                "coordinates must be finite",
            ));
        }
        if let PathLossRule::Distance { gamma } = self.path_loss {
            if !(gamma > 0.0 && gamma.is_finite()) {
                return Err(AppError::validation("path_loss.gamma", "must be > 0"));
            }
        }
        match self.correlation {
            CorrelationBlock::BitDistance { n } if n == 0 => {
                return Err(AppError::validation("correlation.n", "must be >= 1"));
            }
            CorrelationBlock::GaussianField { sigma2, a, offset } => {
                if !(sigma2 > 0.0 && sigma2.is_finite()) {
                    return Err(AppError::validation("correlation.sigma2", "must be > 0"));
                }
                if !(a > 0.0 && a.is_finite()) {
                    return Err(AppError::validation("correlation.a", "must be > 0"));
                }
                if !offset.is_finite() {
                    return Err(AppError::validation("correlation.offset", "must be finite"));
                }
            }
            _ => {}
        }
        if let EnergyBlock::Srra { c } = self.energy {
            if !(c > 0.0 && c.is_finite()) {
                return Err(AppError::validation("energy.c", "must be > 0"));
            }
        }
        for (key, value) in [
            ("solver.samples", self.solver.samples),
            ("solver.grid_density", self.solver.grid_density),
            ("solver.threads", self.solver.threads),
        ] {
            if value == Some(0) {
                return Err(AppError::validation(key, "must be >= 1"));
            }
        }
        if self.nodes.is_empty() {
            return Err(AppError::validation(
                "nodes",
                "at least one node is required",
            ));
        }
        let mut seen = BTreeSet::new();
        for (k, node) in self.nodes.iter().enumerate() {
            if !seen.insert(node.id) {
                return Err(AppError::validation(
                    format!("nodes[{k}].id"),
                    format!("duplicate id {}", node.id),
                ));
            }
            if node.id >= self.nodes.len() {
                return Err(AppError::validation(
                    format!("nodes[{k}].id"),
                    format!("ids must be 0..{} without gaps", self.nodes.len()),
                ));
            }
            if !(node.x.is_finite() && node.y.is_finite()) {
                return Err(AppError::validation(
                    format!("nodes[{k}]"),
                    "coordinates must be finite",
                ));
            }
            if !(node.energy > 0.0 && node.energy.is_finite()) {
                return Err(AppError::validation(
                    format!("nodes[{k}].energy"),
                    "must be > 0",
                ));
            }
            if let Some(d) = node.path_loss {
                if !(d > 0.0 && d.is_finite()) {
                    return Err(AppError::validation(
                        format!("nodes[{k}].path_loss"),
                        "must be > 0",
                    ));
                }
            }
        }
        let losses = self.path_losses()?;
        for (k, &d) in losses.iter().enumerate() {
            if !(d > 0.0 && d.is_finite()) {
                return Err(AppError::validation(
                    format!("nodes[{k}]"),
                    "distance-rule path loss must be > 0 (node sits on the base station)",
                ));
            }
        }
        let nodes = self
            .nodes
            .iter()
            .zip(&losses)
            .map(|(n, &d)| NodeSpec::new(n.id, n.x, n.y, n.energy, d))
            .collect();
        let cluster = ClusterSpec::new(nodes, self.correlation.into())
            .map_err(|e| AppError::validation("correlation", e.to_string()))?;
        Ok(Scenario {
            file: self.clone(),
            cluster,
            mode: self.energy.into(),
        })
    }
}

fn path_or_root(path: String) -> String {
    if path == "." || path.is_empty() {
        "<root>".to_string()
    } else {
        path
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    ScenarioFile::from_json(text)?.validate()
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|source| AppError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text)
}

pub fn save_scenario(file: &ScenarioFile, path: &Path) -> Result<()> {
    fs::write(path, file.to_json()).map_err(|source| AppError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Parameters for [`generate_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub nodes: usize,
    /// Nodes are uniform over `[0, side)^2`.
    pub side: f64,
    pub correlation: CorrelationBlock,
    pub energy: EnergyBlock,
    pub gamma: f64,
    /// Batteries are uniform over this range.
    pub battery: (f64, f64),
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            nodes: 5,
            side: 4.0,
            correlation: CorrelationBlock::GaussianField {
                sigma2: 1.0,
                a: 0.5,
                offset: 0.0,
            },
            energy: EnergyBlock::Shannon,
            gamma: DEFAULT_GAMMA,
            battery: (1.0, 2.0),
        }
    }
}

const POSITION_STREAM: u64 = 1;
const BATTERY_STREAM: u64 = 2;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng: ChaCha8Rng = rand::SeedableRng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Random scenario from `seed`.
///
/// The generator is ChaCha8 seeded with `seed`; positions and batteries come
/// from separate streams of it, so changing how one is drawn never shifts
/// the other. The base station sits half a side below the middle of the
/// square's bottom edge and path loss follows the distance rule.
pub fn generate_scenario(seed: u64, params: &GenParams) -> Result<ScenarioFile> {
    if params.nodes == 0 {
        return Err(AppError::validation(
            "nodes",
            "at least one node is required",
        ));
    }
    if !(params.side > 0.0 && params.side.is_finite()) {
        return Err(AppError::validation("side", "must be > 0"));
    }
    let (lo, hi) = params.battery;
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(AppError::validation("battery", "need 0 < min <= max"));
    }
    let mut pos = stream(seed, POSITION_STREAM);
    let mut bat = stream(seed, BATTERY_STREAM);
    let nodes = (0..params.nodes)
        .map(|id| {
            let x = pos.gen_range(0.0..params.side);
            let y = pos.gen_range(0.0..params.side);
            let energy = if lo == hi { lo } else { bat.gen_range(lo..hi) };
            NodeEntry {
                id,
                x,
                y,
                energy,
                path_loss: None,
            }
        })
        .collect();
    Ok(ScenarioFile {
        version: FORMAT_VERSION,
        base_station: [params.side / 2.0, -params.side / 2.0],
        path_loss: PathLossRule::Distance {
            gamma: params.gamma,
        },
        correlation: params.correlation,
        energy: params.energy,
        solver: SolverBlock::default(),
        nodes,
    })
}
