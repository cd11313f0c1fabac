use serde::{Deserialize, Serialize};

use crate::engine::ModelConfig;
use crate::experiments::{EnsembleSpec, ExperimentKind};
use crate::io::IoError;

pub const SCHEMA_VERSION: u32 = 1;

/// Ensemble settings of a configuration file; the model lives beside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSection {
    pub replications: u64,
    #[serde(default)]
    pub parallelism: Option<usize>,
    pub master_seed: u64,
    pub experiment: ExperimentKind,
}

/// The on-disk run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub schema_version: u32,
    pub model: ModelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSection>,
}

impl RunConfigFile {
    pub fn new(model: ModelConfig) -> Self {
        RunConfigFile { schema_version: SCHEMA_VERSION, model, ensemble: None }
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        let file: RunConfigFile = serde_json::from_str(text)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(IoError::Schema { found: file.schema_version, expected: SCHEMA_VERSION });
        }
        Ok(file)
    }

    /// Canonical form: pretty JSON with a trailing newline.
    pub fn to_canonical(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("configurations serialise");
        s.push('\n');
        s
    }

    pub fn ensemble_spec(&self) -> Option<EnsembleSpec> {
        self.ensemble.as_ref().map(|e| EnsembleSpec {
            base: self.model.clone(),
            replications: e.replications,
            parallelism: e.parallelism,
            master_seed: e.master_seed,
            kind: e.experiment,
        })
    }
}
