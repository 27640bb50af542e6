use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fyseq_cli::config::{ExperimentConfig, SmoothingChoice};
use fyseq_cli::data::Task;
use fyseq_cli::run::{run_analyze, run_decode, run_gen_data, run_train, CliError};
use fyseq_cli::verify::{run_verify, VerifyOptions};

/// Sparse sequence-to-sequence experiments with entmax and Fenchel-Young label smoothing.
#[derive(Debug, Parser)]
#[command(name = "fyseq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write train/dev/test splits of a synthetic task.
    GenData {
        #[arg(long)]
        task: Task,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Train a model and write its checkpoint and report.
    Train(ConfigArgs),
    /// Beam-decode the sources of a file with a checkpoint.
    Decode {
        #[arg(long)]
        checkpoint: PathBuf,
        /// One source per line; anything after a tab is ignored.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Metrics and sparsity/calibration analyses of a checkpoint on a dataset.
    Analyze {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Run the invariant suites; exits with status 3 on any failure.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Append the suite results to this JSON-lines file.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, hide = true)]
        corrupt_threshold: Option<f64>,
    },
}

/// Mirrors [`ExperimentConfig`]; flags override values from `--config`.
#[derive(Debug, Args)]
struct ConfigArgs {
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    task: Option<Task>,
    #[arg(long)]
    train_path: Option<PathBuf>,
    #[arg(long)]
    dev_path: Option<PathBuf>,
    #[arg(long)]
    test_path: Option<PathBuf>,
    #[arg(long)]
    checkpoint_path: Option<PathBuf>,
    #[arg(long)]
    report_path: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_parser = parse_smoothing)]
    smoothing: Option<SmoothingChoice>,
    #[arg(long)]
    embedding_dim: Option<usize>,
    #[arg(long)]
    hidden_dim: Option<usize>,
    #[arg(long)]
    context: Option<usize>,
    #[arg(long)]
    max_positions: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    max_epochs: Option<usize>,
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    beam_width: Option<usize>,
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long)]
    calibration_bins: Option<usize>,
    /// Skip the cat-got-tongue, density and calibration analyses.
    #[arg(long)]
    no_analysis: bool,
}

fn parse_smoothing(s: &str) -> Result<SmoothingChoice, String> {
    match s {
        "uniform" => Ok(SmoothingChoice::Uniform),
        "unigram" => Ok(SmoothingChoice::Unigram),
        other => Err(format!("unknown smoothing {other:?} (uniform, unigram)")),
    }
}

impl ConfigArgs {
    fn resolve(self) -> Result<ExperimentConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    c.$field = v;
                }
            )*};
        }
        macro_rules! set_opt {
            ($($field:ident),*) => {$(
                if self.$field.is_some() {
                    c.$field = self.$field;
                }
            )*};
        }
        set!(alpha, epsilon, smoothing, embedding_dim, hidden_dim, context, max_positions);
        set!(learning_rate, batch_size, max_epochs, patience, beam_width);
        set_opt!(task, train_path, dev_path, test_path, checkpoint_path, report_path, seed, max_len);
        if let Some(b) = self.calibration_bins {
            c.analysis.calibration_bins = b;
        }
        if self.no_analysis {
            c.analysis.cat_got_tongue = false;
            c.analysis.density = false;
            c.analysis.calibration = false;
        }
        Ok(c)
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::GenData {
            task,
            size,
            seed,
            out_dir,
        } => {
            for path in run_gen_data(task, size, seed, &out_dir)? {
                println!("{}", path.display());
            }
        }
        Command::Train(args) => {
            let run = run_train(&args.resolve()?)?;
            print!("{}", run.report.to_jsonl());
        }
        Command::Decode {
            checkpoint,
            input,
            config,
        } => {
            for line in run_decode(&checkpoint, &input, &config.resolve()?)? {
                println!("{line}");
            }
        }
        Command::Analyze {
            checkpoint,
            data,
            config,
        } => {
            print!("{}", run_analyze(&checkpoint, &data, &config.resolve()?)?.to_jsonl());
        }
        Command::Verify {
            seed,
            trials,
            report,
            corrupt_threshold,
        } => {
            let options = VerifyOptions {
                corrupt_threshold,
                ..VerifyOptions::new(seed, trials)
            };
            let summary = run_verify(&options);
            for s in &summary.suites {
                println!(
                    "{:<26} max_error {:<12.3e} tolerance {:<8.0e} {}",
                    s.suite,
                    s.max_error,
                    s.tolerance,
                    if s.passed() { "PASS" } else { "FAIL" }
                );
            }
            if let Some(path) = report {
                summary.report().append_to(&path).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
            }
            if summary.failures() > 0 {
                return Err(CliError::VerificationFailed(summary.failures()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not errors.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
