//! Experiment configuration: a JSON file, optionally overridden by flags.

use std::fs;
use std::path::{Path, PathBuf};

use fyseq::model::{ModelShape, TrainConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Task;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// What the smoothing mass ε is spread over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothingChoice {
    /// Uniform over the whole vocabulary.
    #[default]
    Uniform,
    /// Target-side unigram frequencies of the training set, EOS included.
    Unigram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    pub cat_got_tongue: bool,
    pub density: bool,
    pub calibration: bool,
    pub calibration_bins: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            cat_got_tongue: true,
            density: true,
            calibration: true,
            calibration_bins: 10,
        }
    }
}

/// Every knob of a run. Serialized verbatim as the first line of each report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Informational; the data files define the run.
    pub task: Option<Task>,
    pub train_path: Option<PathBuf>,
    pub dev_path: Option<PathBuf>,
    pub test_path: Option<PathBuf>,
    pub checkpoint_path: Option<PathBuf>,
    pub report_path: Option<PathBuf>,

    pub alpha: f64,
    pub epsilon: f64,
    pub smoothing: SmoothingChoice,

    pub embedding_dim: usize,
    pub hidden_dim: usize,
    pub context: usize,
    pub max_positions: usize,

    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    /// Required: there is no implicit randomness.
    pub seed: Option<u64>,

    pub beam_width: usize,
    /// Defaults to twice the source length plus 8.
    pub max_len: Option<usize>,

    pub analysis: AnalysisConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let shape = ModelShape::default();
        let train = TrainConfig::default();
        Self {
            task: None,
            train_path: None,
            dev_path: None,
            test_path: None,
            checkpoint_path: None,
            report_path: None,
            alpha: 1.5,
            epsilon: 0.0,
            smoothing: SmoothingChoice::Uniform,
            embedding_dim: shape.embedding_dim,
            hidden_dim: shape.hidden_dim,
            context: shape.context,
            max_positions: shape.max_positions,
            learning_rate: train.learning_rate,
            batch_size: train.batch_size,
            max_epochs: train.max_epochs,
            patience: train.patience,
            seed: None,
            beam_width: train.beam_width,
            max_len: None,
            analysis: AnalysisConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str, path: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|source| ConfigError::Parse {
            path: path.to_owned(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if !(self.alpha >= 1.0) || !self.alpha.is_finite() {
            return invalid(format!("alpha must be >= 1, got {}", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return invalid(format!("epsilon must lie in [0, 1], got {}", self.epsilon));
        }
        if self.seed.is_none() {
            return invalid("seed is required".into());
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return invalid(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        let positive = [
            ("beam_width", self.beam_width),
            ("batch_size", self.batch_size),
            ("max_epochs", self.max_epochs),
            ("embedding_dim", self.embedding_dim),
            ("hidden_dim", self.hidden_dim),
            ("context", self.context),
            ("max_positions", self.max_positions),
            ("analysis.calibration_bins", self.analysis.calibration_bins),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return invalid(format!("{name} must be >= 1"));
        }
        if self.max_len == Some(0) {
            return invalid("max_len must be >= 1".into());
        }
        Ok(())
    }

    /// The validated seed.
    pub fn seed(&self) -> u64 {
        self.seed.expect("validated config has a seed")
    }

    pub fn model_shape(&self) -> ModelShape {
        ModelShape {
            embedding_dim: self.embedding_dim,
            hidden_dim: self.hidden_dim,
            context: self.context,
            max_positions: self.max_positions,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            max_epochs: self.max_epochs,
            patience: self.patience,
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            seed: self.seed(),
            beam_width: self.beam_width,
            max_len: self.max_len,
        }
    }

    pub fn require_path<'a>(&self, path: &'a Option<PathBuf>, name: &str) -> Result<&'a Path, ConfigError> {
        path.as_deref()
            .ok_or_else(|| ConfigError::Invalid(format!("{name} is required")))
    }
}
