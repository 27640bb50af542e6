//! JSON-lines run reports. Every line is a standalone object tagged by `kind`.

use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::Path;

use fyseq::metrics::{CalibrationReport, DensityReport};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ExperimentConfig;

/// Fields that hold wall-clock measurements and differ between identical runs.
pub const TIMING_FIELDS: [&str; 1] = ["elapsed_seconds"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityBlock {
    pub mean_support_percentage: f64,
    pub steps: usize,
    pub vocab_size: usize,
}

impl From<&DensityReport> for DensityBlock {
    fn from(r: &DensityReport) -> Self {
        Self {
            mean_support_percentage: r.mean_support_percentage,
            steps: r.support_sizes.iter().map(Vec::len).sum(),
            vocab_size: r.vocab_size,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinBlock {
    pub count: usize,
    pub mean_confidence: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBlock {
    pub ece: f64,
    pub bins: Vec<BinBlock>,
}

impl From<&CalibrationReport> for CalibrationBlock {
    fn from(r: &CalibrationReport) -> Self {
        Self {
            ece: r.ece,
            bins: r
                .bins
                .iter()
                .map(|b| BinBlock {
                    count: b.count,
                    mean_confidence: b.mean_confidence,
                    accuracy: b.accuracy,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportLine {
    Config {
        command: String,
        config: ExperimentConfig,
    },
    Epoch {
        epoch: usize,
        train_loss: f64,
        dev_wer: f64,
        dev_per: f64,
        dev_mean_levenshtein: f64,
        improved: bool,
        /// This epoch's parameters are the saved checkpoint.
        selected: bool,
    },
    Metrics {
        split: String,
        examples: usize,
        wer: f64,
        per: f64,
        accuracy: f64,
        mean_levenshtein: f64,
        elapsed_seconds: f64,
    },
    Analysis {
        split: String,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        cat_got_tongue_rate: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        density: Option<DensityBlock>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        calibration: Option<CalibrationBlock>,
        elapsed_seconds: f64,
    },
    Verify {
        suite: String,
        trials: usize,
        max_error: f64,
        tolerance: f64,
        passed: bool,
        elapsed_seconds: f64,
    },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub lines: Vec<ReportLine>,
}

impl RunReport {
    pub fn push(&mut self, line: ReportLine) {
        self.lines.push(line);
    }

    pub fn to_jsonl(&self) -> String {
        self.lines
            .iter()
            .map(|l| serde_json::to_string(l).expect("report lines serialize") + "\n")
            .collect()
    }

    /// Appends to `path`, creating it if needed.
    pub fn append_to(&self, path: &Path) -> io::Result<()> {
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        f.write_all(self.to_jsonl().as_bytes())?;
        f.flush()
    }

    pub fn metrics(&self, split: &str) -> Option<&ReportLine> {
        self.lines
            .iter()
            .find(|l| matches!(l, ReportLine::Metrics { split: s, .. } if s == split))
    }

    pub fn analysis(&self, split: &str) -> Option<&ReportLine> {
        self.lines
            .iter()
            .find(|l| matches!(l, ReportLine::Analysis { split: s, .. } if s == split))
    }
}

/// Parses a JSON-lines report, dropping timing fields, for reproducibility checks.
pub fn without_timing(jsonl: &str) -> serde_json::Result<Vec<Value>> {
    jsonl
        .lines()
        .map(|line| {
            let mut v: Value = serde_json::from_str(line)?;
            if let Value::Object(map) = &mut v {
                for f in TIMING_FIELDS {
                    map.remove(f);
                }
            }
            Ok(v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_are_tagged_and_parse_back() {
        let mut r = RunReport::default();
        r.push(ReportLine::Metrics {
            split: "dev".into(),
            examples: 3,
            wer: 0.0,
            per: 0.0,
            accuracy: 100.0,
            mean_levenshtein: 0.0,
            elapsed_seconds: 1.25,
        });
        r.push(ReportLine::Analysis {
            split: "dev".into(),
            cat_got_tongue_rate: Some(0.0),
            density: None,
            calibration: None,
            elapsed_seconds: 0.5,
        });
        let text = r.to_jsonl();
        for line in text.lines() {
            let v: Value = serde_json::from_str(line).unwrap();
            assert!(v["kind"].is_string());
        }
        let back: Vec<ReportLine> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(back, r.lines);
        assert!(!text.contains("density"));
    }

    #[test]
    fn timing_is_stripped() {
        let a = r#"{"kind":"metrics","wer":1.0,"elapsed_seconds":3.0}"#;
        let b = r#"{"kind":"metrics","wer":1.0,"elapsed_seconds":9.5}"#;
        assert_eq!(without_timing(a).unwrap(), without_timing(b).unwrap());
    }
}
