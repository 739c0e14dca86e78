//! Experiment configuration: a JSON file, every field optional.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use symdis_core::experiments::ObjectSet;
use symdis_core::{DifferenceMode, FactorSchema, ProbePolicy, Reconstruction};

use crate::error::CliError;

/// Either a preset name (`"dsprites"`, `"metric"`), a path to a JSON factor
/// list, or the factor list itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SchemaSpec {
    Named(String),
    Inline(FactorSchema),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaDefault {
    Dsprites,
    Metric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: Option<SchemaSpec>,
    pub dim: usize,
    pub master_seed: u64,
    /// Drop squares in the right half of the frame when generating pairs.
    pub exclusion: bool,
    pub difference: DifferenceMode,
    /// Pairs written by gen-pairs.
    pub count: usize,
    /// Random objects per round-trip or noise measurement.
    pub trials: usize,
    /// Absolute noise levels; defaults to multiples of 1/√D.
    pub sigmas: Option<Vec<f64>>,
    pub dims: Vec<usize>,
    /// Round-trip trials per dimension in the ablation.
    pub ablation_trials: usize,
    /// Objects scored by the metric runs.
    pub metric_objects: usize,
    pub object_set: ObjectSet,
    pub policy: ProbePolicy,
    pub reconstruction: Reconstruction,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema: None,
            dim: 1024,
            master_seed: 0,
            exclusion: false,
            difference: DifferenceMode::Single,
            count: 1000,
            trials: 10_000,
            sigmas: None,
            dims: vec![16, 32, 64, 128, 512, 1024, 2048],
            ablation_trials: 2000,
            metric_objects: 60,
            object_set: ObjectSet::SymmetrySafe,
            policy: ProbePolicy::SkipIdenticalReconstruction,
            reconstruction: Reconstruction::Faithful,
        }
    }
}

/// Noise levels in units of 1/√D used when the config gives none.
pub const DEFAULT_SIGMA_UNITS: [f64; 7] = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

impl ExperimentConfig {
    /// Reads a config file. Any output of this tool also works: JSON reports
    /// carry the config under `"config"`, CSV and PGM files on a
    /// `# config=` line.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let bad = |e: serde_json::Error| CliError::Config(format!("{}: {e}", path.display()));
        if let Some(line) = text.lines().find_map(|l| l.strip_prefix("# config=")) {
            return serde_json::from_str(line).map_err(bad);
        }
        let value: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
        match value.get("config") {
            Some(inner) if inner.is_object() => serde_json::from_value(inner.clone()).map_err(bad),
            _ => serde_json::from_value(value).map_err(bad),
        }
    }

    /// Fills in the schema and the noise levels and checks the ranges, so
    /// the result fully describes a run.
    pub fn resolve(mut self, default: SchemaDefault) -> Result<Self, CliError> {
        let schema = match self.schema.take() {
            None => match default {
                SchemaDefault::Dsprites => FactorSchema::dsprites(),
                SchemaDefault::Metric => FactorSchema::metric(),
            },
            Some(SchemaSpec::Inline(s)) => s,
            Some(SchemaSpec::Named(name)) => match name.as_str() {
                "dsprites" => FactorSchema::dsprites(),
                "metric" => FactorSchema::metric(),
                path => {
                    let text = fs::read_to_string(path).map_err(|e| CliError::io(Path::new(path), e))?;
                    serde_json::from_str(&text)
                        .map_err(|e| CliError::Config(format!("schema file {path}: {e}")))?
                }
            },
        };
        self.schema = Some(SchemaSpec::Inline(schema));
        if self.dim < 2 {
            return Err(CliError::Config(format!("dim must be at least 2, got {}", self.dim)));
        }
        if let Some(d) = self.dims.iter().find(|&&d| d < 2) {
            return Err(CliError::Config(format!("dims entries must be at least 2, got {d}")));
        }
        let unit = 1.0 / (self.dim as f64).sqrt();
        let sigmas = self
            .sigmas
            .take()
            .unwrap_or_else(|| DEFAULT_SIGMA_UNITS.iter().map(|k| k * unit).collect());
        if let Some(s) = sigmas.iter().find(|s| !s.is_finite() || **s < 0.0) {
            return Err(CliError::Config(format!("sigmas must be finite and non-negative, got {s}")));
        }
        self.sigmas = Some(sigmas);
        if let DifferenceMode::Multi { k } = self.difference {
            if k == 0 {
                return Err(CliError::Config("difference k must be at least 1".into()));
            }
        }
        Ok(self)
    }

    /// The schema of a resolved config.
    pub fn schema(&self) -> &FactorSchema {
        match &self.schema {
            Some(SchemaSpec::Inline(s)) => s,
            _ => panic!("config not resolved"),
        }
    }

    pub fn sigmas(&self) -> &[f64] {
        self.sigmas.as_deref().expect("config not resolved")
    }
}
