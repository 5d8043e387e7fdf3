//! Checkpoint persistence: JSON with explicit shape metadata and
//! round-trip-exact decimal floats.

use std::fs;
use std::path::Path;

use qgcn_core::model::{Model, ModelSpec};
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    /// Structural shapes, kept alongside the parameters for validation.
    pub spec: ModelSpec,
    pub model: Model,
    pub epochs_trained: usize,
    /// Loss of the final parameters, and the corruption seed it was
    /// evaluated with, so the value can be reproduced exactly.
    pub final_loss: f64,
    pub final_corruption_seed: u64,
}

impl Checkpoint {
    pub fn new(
        model: Model,
        epochs_trained: usize,
        final_loss: f64,
        final_corruption_seed: u64,
    ) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            spec: model.spec(),
            model,
            epochs_trained,
            final_loss,
            final_corruption_seed,
        }
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Json {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        fs::write(path, text + "\n").map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let ckpt: Checkpoint = serde_json::from_str(&text).map_err(|e| CliError::Json {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        if ckpt.format_version != FORMAT_VERSION {
            return Err(CliError::Json {
                path: path.display().to_string(),
                detail: format!(
                    "unsupported checkpoint format version {}",
                    ckpt.format_version
                ),
            });
        }
        if ckpt.model.spec() != ckpt.spec {
            return Err(CliError::Json {
                path: path.display().to_string(),
                detail: "checkpoint shape metadata disagrees with parameters".into(),
            });
        }
        Ok(ckpt)
    }
}
