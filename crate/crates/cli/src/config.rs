//! Run configuration files (TOML).
//!
//! ```toml
//! model = "aggregate"          # or "vector"
//! output_dir = "out/run"       # optional, defaults to "out"
//!
//! [params]
//! n = 7
//! horizon = 6
//! beta = 0.8
//! c_ns = 10
//! c_s = 5
//! g = 8
//! initial_budget = 30
//!
//! [sim]                        # optional
//! samples = 100000
//! seed = 1                     # 0 ..= 2^63 - 1 (TOML integers are signed)
//!
//! [graph]                      # vector model only
//! kind = "complete_self_loops" # or "edges"
//! edges = [[0, 1], [1, 2]]     # kind = "edges"
//! costs = [10, 10, 10]         # optional per-agent prices
//! rewards = [8, 8, 8]          # optional per-agent reward rates
//!
//! [limits]                     # optional solver guards
//! max_cells = 20000000
//! max_work = 2000000000
//! ```
//!
//! Unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use voterbudget::{CostVector, Graph, ModelParams, SimConfig, SolverLimits, VectorModel};

pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Missing {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config {path}: {message}")]
    Malformed { path: PathBuf, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Aggregate,
    Vector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub n: usize,
    pub horizon: usize,
    pub beta: f64,
    pub c_ns: u64,
    pub c_s: u64,
    pub g: u64,
    pub initial_budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    CompleteSelfLoops,
    Edges,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    pub kind: GraphKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub costs: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rewards: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_cells: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_work: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub params: ParamsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limits: Option<LimitsSection>,
}

/// Reads and validates a config file.
pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Missing {
        path: path.to_path_buf(),
        source,
    })?;
    let config = parse_config_str(&text).map_err(|e| match e {
        ConfigError::Malformed { message, .. } => ConfigError::Malformed {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })?;
    Ok(config)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Malformed {
        path: PathBuf::from("<string>"),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn model_params(&self) -> Result<ModelParams, ConfigError> {
        let p = &self.params;
        ModelParams::new(p.n, p.horizon, p.beta, p.c_ns, p.c_s, p.g, p.initial_budget)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn sim_config(&self) -> Result<SimConfig, ConfigError> {
        let s = self.sim.unwrap_or(SimSection {
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
        });
        if s.samples < 2 {
            return Err(ConfigError::Invalid(format!(
                "sim.samples must be at least 2, got {}",
                s.samples
            )));
        }
        SimConfig::new(s.samples, s.seed).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn limits(&self) -> SolverLimits {
        let mut limits = SolverLimits::default();
        if let Some(l) = self.limits {
            if let Some(c) = l.max_cells {
                limits.max_cells = c;
            }
            if let Some(w) = l.max_work {
                limits.max_work = w as u128;
            }
        }
        limits
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("out"))
    }

    /// The network instance of a vector-model config.
    pub fn vector_model(&self) -> Result<VectorModel, ConfigError> {
        let params = self.model_params()?;
        let section = self.graph.as_ref().ok_or_else(|| {
            ConfigError::Invalid("the vector model requires a [graph] section".into())
        })?;
        let n = params.n;
        let graph = match section.kind {
            GraphKind::CompleteSelfLoops => {
                if section.edges.is_some() {
                    return Err(ConfigError::Invalid(
                        "graph.edges is only allowed with kind = \"edges\"".into(),
                    ));
                }
                Graph::complete_with_self_loops(n)
            }
            GraphKind::Edges => {
                let edges = section.edges.as_ref().ok_or_else(|| {
                    ConfigError::Invalid("kind = \"edges\" requires graph.edges".into())
                })?;
                let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e[0], e[1])).collect();
                Graph::from_edges(n, &pairs).map_err(|e| ConfigError::Invalid(e.to_string()))?
            }
        };
        let costs = match &section.costs {
            Some(c) => CostVector::PerAgent(c.clone()),
            None => CostVector::ByLabel {
                c_ns: params.c_ns,
                c_s: params.c_s,
            },
        };
        let rewards = section.rewards.clone().unwrap_or_else(|| vec![params.g; n]);
        VectorModel::new(graph, costs, rewards).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model_params()?;
        self.sim_config()?;
        match self.model {
            ModelKind::Aggregate => {
                if self.graph.is_some() {
                    return Err(ConfigError::Invalid(
                        "the aggregate model is fully connected; remove the [graph] section".into(),
                    ));
                }
            }
            ModelKind::Vector => {
                self.vector_model()?;
            }
        }
        Ok(())
    }
}
