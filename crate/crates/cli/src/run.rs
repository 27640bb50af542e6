//! The gen-data, train, decode and analyze commands as library calls.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use fyseq::decoding::{beam_score_with, cat_got_tongue_rate_with, decode_dataset_with};
use fyseq::losses::{SmoothingSpec, TargetDistribution};
use fyseq::metrics::{accuracy, expected_calibration_error, mean_levenshtein, per, support_density, wer};
use fyseq::model::{load_checkpoint, save_checkpoint, train, SequencePair, ToyModel, Vocabulary};
use fyseq::AlphaParam;
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig, SmoothingChoice};
use crate::data::{
    generate_synthetic, load_dataset, load_dataset_extending, load_dataset_with_vocab, write_splits, DataError, Task,
};
use crate::report::{CalibrationBlock, DensityBlock, ReportLine, RunReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Core(#[from] fyseq::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0} verification suite(s) failed")]
    VerificationFailed(usize),
}

impl CliError {
    /// 1 for configuration problems, 2 for data and runtime errors, 3 for failed verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) | CliError::Core(_) | CliError::Io { .. } => 2,
            CliError::VerificationFailed(_) => 3,
        }
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn run_gen_data(task: Task, size: usize, seed: u64, out_dir: &Path) -> Result<[PathBuf; 3], CliError> {
    if size == 0 {
        return Err(ConfigError::Invalid("size must be >= 1".into()).into());
    }
    Ok(write_splits(&generate_synthetic(task, size, seed), out_dir)?)
}

/// What the smoothing mass is spread over, sized to the vocabulary.
fn smoothing_spec(config: &ExperimentConfig, vocab: &Vocabulary, train: &[SequencePair]) -> Result<SmoothingSpec, CliError> {
    let alpha = AlphaParam::new(config.alpha)?;
    let spec = match config.smoothing {
        SmoothingChoice::Uniform => SmoothingSpec::uniform(alpha, config.epsilon, vocab.len())?,
        SmoothingChoice::Unigram => {
            let mut counts = vec![0.0; vocab.len()];
            for pair in train {
                for &t in pair.target() {
                    counts[t] += 1.0;
                }
            }
            let total: f64 = counts.iter().sum();
            let unigram = TargetDistribution::general(counts.iter().map(|c| c / total).collect())?;
            SmoothingSpec::new(alpha, config.epsilon, unigram)?
        }
    };
    Ok(spec)
}

/// A trained model together with the report of its run.
#[derive(Debug, Clone)]
pub struct TrainRun {
    pub model: ToyModel,
    pub best_epoch: usize,
    pub report: RunReport,
}

pub fn run_train(config: &ExperimentConfig) -> Result<TrainRun, CliError> {
    config.validate()?;
    let train_path = config.require_path(&config.train_path, "train_path")?;
    let dev_path = config.require_path(&config.dev_path, "dev_path")?;

    let (train_pairs, mut vocab) = load_dataset(train_path)?;
    let dev = load_dataset_extending(dev_path, &mut vocab)?;
    let test = match &config.test_path {
        Some(p) => Some(load_dataset_extending(p, &mut vocab)?),
        None => None,
    };
    let spec = smoothing_spec(config, &vocab, &train_pairs)?;
    let model = ToyModel::new(vocab, config.model_shape(), spec, config.seed())?;
    let outcome = train(model, &train_pairs, &dev, &config.train_config())?;

    let mut report = RunReport::default();
    report.push(ReportLine::Config {
        command: "train".into(),
        config: config.clone(),
    });
    for e in &outcome.log {
        report.push(ReportLine::Epoch {
            epoch: e.epoch,
            train_loss: e.train_loss,
            dev_wer: e.dev_wer,
            dev_per: e.dev_per,
            dev_mean_levenshtein: e.dev_mean_levenshtein,
            improved: e.improved,
            selected: e.epoch == outcome.best_epoch,
        });
    }
    let mut splits = vec![("dev", dev)];
    splits.extend(test.map(|t| ("test", t)));
    for (name, pairs) in &splits {
        report.push(metrics_line(&outcome.model, pairs, name, config)?);
        report.lines.extend(analysis_line(&outcome.model, pairs, name, config)?);
    }

    if let Some(path) = &config.checkpoint_path {
        save_checkpoint(&outcome.model, path)?;
    }
    write_report(&report, config)?;
    Ok(TrainRun {
        model: outcome.model,
        best_epoch: outcome.best_epoch,
        report,
    })
}

/// Analyzes a checkpoint on one dataset; the split is named after the file stem.
pub fn run_analyze(checkpoint: &Path, dataset: &Path, config: &ExperimentConfig) -> Result<RunReport, CliError> {
    config.validate()?;
    let model = load_checkpoint(checkpoint)?;
    let pairs = load_dataset_with_vocab(dataset, model.vocab())?;
    let split = dataset
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "data".into());

    let mut report = RunReport::default();
    report.push(ReportLine::Config {
        command: "analyze".into(),
        config: config.clone(),
    });
    report.push(metrics_line(&model, &pairs, &split, config)?);
    report.lines.extend(analysis_line(&model, &pairs, &split, config)?);
    write_report(&report, config)?;
    Ok(report)
}

/// Beam-decodes every source in `input`. Lines hold a source, optionally
/// followed by a tab and a target that is ignored. Returns `source<TAB>hypothesis` lines.
pub fn run_decode(checkpoint: &Path, input: &Path, config: &ExperimentConfig) -> Result<Vec<String>, CliError> {
    config.validate()?;
    let model = load_checkpoint(checkpoint)?;
    let text = fs::read_to_string(input).map_err(io_error(input))?;
    let vocab = model.vocab();
    let mut out = Vec::new();
    for (i, line) in text.split_terminator('\n').enumerate() {
        let src_text = line.split('\t').next().unwrap_or_default();
        if src_text.is_empty() || src_text.split(' ').any(str::is_empty) {
            return Err(DataError::MalformedLine {
                path: input.display().to_string(),
                line: i + 1,
                reason: "empty source or token".into(),
            }
            .into());
        }
        let source = src_text
            .split(' ')
            .map(|tok| {
                vocab.get(tok).ok_or_else(|| DataError::VocabularyMismatch {
                    path: input.display().to_string(),
                    token: tok.to_owned(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let hyp = beam_score_with(&model, &source, config.beam_width, config.max_len)?;
        out.push(format!("{src_text}\t{}", vocab.render(hyp.body())));
    }
    Ok(out)
}

fn write_report(report: &RunReport, config: &ExperimentConfig) -> Result<(), CliError> {
    if let Some(path) = &config.report_path {
        report.append_to(path).map_err(io_error(path))?;
    }
    Ok(())
}

pub fn metrics_line(
    model: &ToyModel,
    pairs: &[SequencePair],
    split: &str,
    config: &ExperimentConfig,
) -> Result<ReportLine, CliError> {
    let start = Instant::now();
    let hyps = decode_dataset_with(model, pairs, config.beam_width, config.max_len)?;
    let refs: Vec<&[usize]> = pairs.iter().map(SequencePair::target_body).collect();
    Ok(ReportLine::Metrics {
        split: split.to_owned(),
        examples: pairs.len(),
        wer: wer(&hyps, &refs)?,
        per: per(&hyps, &refs)?,
        accuracy: accuracy(&hyps, &refs)?,
        mean_levenshtein: mean_levenshtein(&hyps, &refs)?,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

/// `None` when every analysis is switched off.
pub fn analysis_line(
    model: &ToyModel,
    pairs: &[SequencePair],
    split: &str,
    config: &ExperimentConfig,
) -> Result<Option<ReportLine>, CliError> {
    let a = &config.analysis;
    if !(a.cat_got_tongue || a.density || a.calibration) {
        return Ok(None);
    }
    let start = Instant::now();
    let cat_got_tongue_rate = if a.cat_got_tongue {
        Some(cat_got_tongue_rate_with(model, pairs, config.beam_width, config.max_len)?)
    } else {
        None
    };
    let density = if a.density {
        Some(DensityBlock::from(&support_density(model, pairs)?))
    } else {
        None
    };
    let calibration = if a.calibration {
        Some(CalibrationBlock::from(&expected_calibration_error(
            model,
            pairs,
            a.calibration_bins,
        )?))
    } else {
        None
    };
    Ok(Some(ReportLine::Analysis {
        split: split.to_owned(),
        cat_got_tongue_rate,
        density,
        calibration,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(ConfigError::Invalid("x".into())).exit_code(), 1);
        assert_eq!(CliError::from(DataError::EmptyFile("f".into())).exit_code(), 2);
        assert_eq!(CliError::from(fyseq::Error::EmptyDataset).exit_code(), 2);
        assert_eq!(CliError::VerificationFailed(1).exit_code(), 3);
    }

    #[test]
    fn invalid_epsilon_rejected_before_reading_data() {
        let config = ExperimentConfig {
            epsilon: 1.5,
            seed: Some(1),
            train_path: Some("/nonexistent/train.tsv".into()),
            dev_path: Some("/nonexistent/dev.tsv".into()),
            ..ExperimentConfig::default()
        };
        assert!(matches!(run_train(&config), Err(CliError::Config(_))));
    }

    #[test]
    fn unigram_smoothing_counts_targets() {
        let mut vocab = Vocabulary::new();
        let a = vocab.insert("a");
        let b = vocab.insert("b");
        let train = vec![SequencePair::from_unterminated(vec![a], vec![b, b]).unwrap()];
        let config = ExperimentConfig {
            smoothing: SmoothingChoice::Unigram,
            epsilon: 0.1,
            ..ExperimentConfig::default()
        };
        let spec = smoothing_spec(&config, &vocab, &train).unwrap();
        let r = spec.smoothing_distribution().probabilities();
        assert_eq!(r[b], 2.0 / 3.0);
        assert_eq!(r[fyseq::model::EOS], 1.0 / 3.0);
        assert_eq!(r[a], 0.0);
    }
}
