//! Run configuration: a single JSON document shared by every subcommand.

use std::fs;
use std::path::{Path, PathBuf};

use qgcn_core::dgi::{OptimizerKind, TrainConfig};
use qgcn_core::model::{ModelSpec, Pipeline};
use qgcn_core::qfe::RotationKind;
use qgcn_core::qmp::{Aggregation, MixerSide};
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

/// Where the node features (and possibly edges) come from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetConfig {
    /// Synthetic binary features with planted population labels.
    Synthetic {
        num_nodes: usize,
        feature_dim: usize,
        num_populations: usize,
        flip_prob: f64,
        /// Generator seed; independent of the training seed.
        #[serde(default)]
        data_seed: u64,
    },
    /// Comma-delimited node file, optionally with an edge file. Without an
    /// edge file the graph comes from mutual k-NN construction.
    Files {
        node_file: PathBuf,
        #[serde(default)]
        edge_file: Option<PathBuf>,
        #[serde(default)]
        has_labels: bool,
    },
}

fn default_k() -> usize {
    5
}

/// Mutual k-NN construction parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    #[serde(default = "default_k")]
    pub k: usize,
}

impl Default for GraphConfig {
    fn default() -> Self {
        Self { k: default_k() }
    }
}

/// Model structure; the register width is always derived from the feature
/// dimension, never configured.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub pipeline: Pipeline,
    pub layers: usize,
    pub range: usize,
    pub rotation: RotationKind,
    pub depth: usize,
    pub mixer: MixerSide,
    pub aggregation: Aggregation,
    pub include_self: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            pipeline: Pipeline::Quantum,
            layers: 2,
            range: 1,
            rotation: RotationKind::Full,
            depth: 1,
            mixer: MixerSide::Both,
            aggregation: Aggregation::Sum,
            include_self: true,
        }
    }
}

impl ModelConfig {
    pub fn spec_for_dim(&self, feature_dim: usize) -> ModelSpec {
        ModelSpec {
            pipeline: self.pipeline,
            layers: self.layers,
            range: self.range,
            rotation: self.rotation,
            depth: self.depth,
            mixer: self.mixer,
            aggregation: self.aggregation,
            include_self: self.include_self,
            ..ModelSpec::for_feature_dim(feature_dim)
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub fd_step: f64,
    pub train_mp_params: bool,
    pub optimizer: OptimizerKind,
}

impl Default for TrainSection {
    fn default() -> Self {
        Self {
            epochs: 100,
            learning_rate: 0.05,
            seed: 0,
            fd_step: 1e-4,
            train_mp_params: true,
            optimizer: OptimizerKind::Sgd,
        }
    }
}

impl TrainSection {
    pub fn to_train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            seed: self.seed,
            fd_step: self.fd_step,
            train_mp_params: self.train_mp_params,
            optimizer: self.optimizer,
        }
    }
}

fn default_eval_k() -> usize {
    5
}

fn default_elbow_max() -> usize {
    8
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// Number of k-means clusters.
    pub k: usize,
    pub seed: u64,
    /// Largest k in the inertia-vs-k elbow table.
    pub elbow_max: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            k: default_eval_k(),
            seed: 0,
            elbow_max: default_elbow_max(),
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("qgcn-out")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: DatasetConfig,
    #[serde(default)]
    pub graph: GraphConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub eval: EvalConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!(
            "{}: {e}",
            path.display()
        )))
    }

    pub fn validate(&self) -> CliResult<()> {
        match &self.dataset {
            DatasetConfig::Synthetic {
                num_nodes,
                feature_dim,
                num_populations,
                flip_prob,
                ..
            } => {
                if *num_nodes == 0 || *feature_dim == 0 {
                    return Err(CliError::Config(
                        "synthetic dataset needs positive num_nodes and feature_dim".into(),
                    ));
                }
                if *num_populations == 0 || num_populations > num_nodes {
                    return Err(CliError::Config(format!(
                        "num_populations {num_populations} outside [1, {num_nodes}]"
                    )));
                }
                if !(0.0..0.5).contains(flip_prob) {
                    return Err(CliError::Config(format!(
                        "flip_prob {flip_prob} outside [0, 0.5)"
                    )));
                }
            }
            DatasetConfig::Files { node_file, .. } => {
                if !node_file.exists() {
                    return Err(CliError::Config(format!(
                        "node file {} does not exist",
                        node_file.display()
                    )));
                }
            }
        }
        if self.graph.k == 0 {
            return Err(CliError::Config("graph.k must be >= 1".into()));
        }
        if self.model.range == 0 {
            return Err(CliError::Config("model.range must be >= 1".into()));
        }
        if self.model.depth == 0 {
            return Err(CliError::Config("model.depth must be >= 1".into()));
        }
        if self.eval.k < 2 {
            return Err(CliError::Config("eval.k must be >= 2".into()));
        }
        Ok(())
    }
}
