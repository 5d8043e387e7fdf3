//! Serialized run reports.

use std::fs;
use std::path::Path;

use qgcn_core::eval::EvalReport;
use qgcn_core::graph::KnnInfo;
use qgcn_core::qmp::ResourceReport;
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

/// Written by `build-graph`; downstream commands read it to learn whether
/// the node file carries a label column.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuildReport {
    pub num_nodes: usize,
    pub num_edges: usize,
    pub feature_dim: usize,
    pub has_labels: bool,
    /// Histogram indexed by degree.
    pub degree_histogram: Vec<usize>,
    /// Mutual k-NN statistics; absent when edges came from a file.
    pub knn: Option<KnnInfo>,
    /// Dropped-row statistics from file loading; absent for synthetic data.
    pub self_loops_dropped: Option<usize>,
    pub duplicate_edges_dropped: Option<usize>,
}

/// Side-by-side result of the `compare` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareReport {
    pub epochs: usize,
    pub seed: u64,
    pub quantum: PipelineResult,
    pub hybrid: PipelineResult,
    /// Gate/encoding accounting for the quantum message-passing pass.
    pub resources: ResourceReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineResult {
    pub initial_loss: f64,
    pub final_loss: f64,
    pub eval: EvalReport,
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Json {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    fs::write(path, text + "\n").map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Json {
        path: path.display().to_string(),
        detail: e.to_string(),
    })
}
