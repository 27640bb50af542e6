//! Tab-separated datasets and the synthetic transduction tasks.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fyseq::model::{SequencePair, Vocabulary};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: line {line}: {reason}")]
    MalformedLine {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("{0}: no examples")]
    EmptyFile(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: token {token:?} is not in the model vocabulary")]
    VocabularyMismatch { path: String, token: String },
}

/// One raw example: source and target tokens.
pub type RawPair = (Vec<String>, Vec<String>);

fn split_tokens(s: &str) -> Option<Vec<String>> {
    if s.is_empty() {
        return Some(Vec::new());
    }
    let tokens: Vec<String> = s.split(' ').map(str::to_owned).collect();
    if tokens.iter().any(String::is_empty) {
        None
    } else {
        Some(tokens)
    }
}

/// Parses `source<TAB>target` lines with single-space token separators.
pub fn parse_dataset(text: &str, path: &str) -> Result<Vec<RawPair>, DataError> {
    let malformed = |line: usize, reason: &str| DataError::MalformedLine {
        path: path.to_owned(),
        line,
        reason: reason.to_owned(),
    };
    let mut pairs = Vec::new();
    for (i, line) in text.split_terminator('\n').enumerate() {
        let line_no = i + 1;
        let mut fields = line.split('\t');
        let (Some(src), Some(tgt), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(malformed(line_no, "expected exactly one tab"));
        };
        let source = split_tokens(src).ok_or_else(|| malformed(line_no, "empty token in source"))?;
        let target = split_tokens(tgt).ok_or_else(|| malformed(line_no, "empty token in target"))?;
        if source.is_empty() {
            return Err(malformed(line_no, "empty source"));
        }
        pairs.push((source, target));
    }
    if pairs.is_empty() {
        return Err(DataError::EmptyFile(path.to_owned()));
    }
    Ok(pairs)
}

fn read(path: &Path) -> Result<Vec<RawPair>, DataError> {
    let text = fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_dataset(&text, &path.display().to_string())
}

fn index_pairs(raw: &[RawPair], vocab: &mut Vocabulary) -> Vec<SequencePair> {
    raw.iter()
        .map(|(s, t)| {
            let source = s.iter().map(|tok| vocab.insert(tok)).collect();
            let target = t.iter().map(|tok| vocab.insert(tok)).collect();
            SequencePair::from_unterminated(source, target).expect("nonempty source, no PAD")
        })
        .collect()
}

/// Loads a dataset and builds its vocabulary in first-occurrence order.
pub fn load_dataset(path: &Path) -> Result<(Vec<SequencePair>, Vocabulary), DataError> {
    let raw = read(path)?;
    let mut vocab = Vocabulary::new();
    check_reserved(&raw, path)?;
    let pairs = index_pairs(&raw, &mut vocab);
    Ok((pairs, vocab))
}

/// Loads a dataset, adding unseen tokens to `vocab`.
pub fn load_dataset_extending(path: &Path, vocab: &mut Vocabulary) -> Result<Vec<SequencePair>, DataError> {
    let raw = read(path)?;
    check_reserved(&raw, path)?;
    Ok(index_pairs(&raw, vocab))
}

/// Loads a dataset against a fixed vocabulary.
pub fn load_dataset_with_vocab(path: &Path, vocab: &Vocabulary) -> Result<Vec<SequencePair>, DataError> {
    let raw = read(path)?;
    check_reserved(&raw, path)?;
    raw.iter()
        .map(|(s, t)| {
            let lookup = |tok: &String| {
                vocab.get(tok).ok_or_else(|| DataError::VocabularyMismatch {
                    path: path.display().to_string(),
                    token: tok.clone(),
                })
            };
            let source = s.iter().map(lookup).collect::<Result<Vec<_>, _>>()?;
            let target = t.iter().map(lookup).collect::<Result<Vec<_>, _>>()?;
            Ok(SequencePair::from_unterminated(source, target).expect("nonempty source, no PAD"))
        })
        .collect()
}

fn check_reserved(raw: &[RawPair], path: &Path) -> Result<(), DataError> {
    use fyseq::model::{BOS_TOKEN, EOS_TOKEN, PAD_TOKEN};
    for (i, (s, t)) in raw.iter().enumerate() {
        if s.iter().chain(t).any(|tok| [PAD_TOKEN, BOS_TOKEN, EOS_TOKEN].contains(&tok.as_str())) {
            return Err(DataError::MalformedLine {
                path: path.display().to_string(),
                line: i + 1,
                reason: "reserved token in data".into(),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Copy,
    Reverse,
    RewriteRules,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Copy => "copy",
            Task::Reverse => "reverse",
            Task::RewriteRules => "rewrite-rules",
        })
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "copy" => Ok(Task::Copy),
            "reverse" => Ok(Task::Reverse),
            "rewrite-rules" => Ok(Task::RewriteRules),
            other => Err(format!("unknown task {other:?} (copy, reverse, rewrite-rules)")),
        }
    }
}

/// Copy and reverse draw from nine symbols, which with the three reserved tokens
/// gives a 12-entry vocabulary.
const COPY_ALPHABET: [&str; 9] = ["a", "b", "c", "d", "e", "f", "g", "h", "i"];
const COPY_LENGTHS: (usize, usize) = (3, 10);

/// The rewrite task maps an alphabet onto itself. Every symbol has a primary
/// output and a variant, so the task is ambiguous at each position.
const REWRITE_ALPHABET: [&str; 12] = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l"];
const REWRITE_LENGTHS: (usize, usize) = (3, 12);
const REWRITE_VARIANT_PROB: f64 = 0.35;

/// One rule of the rewrite task. `variant` is emitted with probability
/// [`REWRITE_VARIANT_PROB`], `primary` otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pub input: &'static str,
    pub primary: &'static str,
    pub variant: &'static str,
}

/// The seeded substitution table of the rewrite task: a random permutation
/// gives the primaries, and each variant is the next symbol's primary.
pub fn rewrite_table(seed: u64) -> Vec<RewriteRule> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_7ab1e);
    let mut outputs = REWRITE_ALPHABET.to_vec();
    outputs.shuffle(&mut rng);
    REWRITE_ALPHABET
        .iter()
        .enumerate()
        .map(|(i, &input)| RewriteRule {
            input,
            primary: outputs[i],
            variant: outputs[(i + 1) % outputs.len()],
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splits {
    pub train: Vec<RawPair>,
    pub dev: Vec<RawPair>,
    pub test: Vec<RawPair>,
}

fn random_sequence(rng: &mut ChaCha8Rng, alphabet: &[&'static str], lengths: (usize, usize)) -> Vec<String> {
    let len = rng.gen_range(lengths.0..=lengths.1);
    (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())].to_owned()).collect()
}

/// Deterministic synthetic data, split 80/10/10 into train/dev/test.
pub fn generate_synthetic(task: Task, size: usize, seed: u64) -> Splits {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = rewrite_table(seed);
    let pairs: Vec<RawPair> = (0..size)
        .map(|_| match task {
            Task::Copy => {
                let s = random_sequence(&mut rng, &COPY_ALPHABET, COPY_LENGTHS);
                (s.clone(), s)
            }
            Task::Reverse => {
                let s = random_sequence(&mut rng, &COPY_ALPHABET, COPY_LENGTHS);
                let t = s.iter().rev().cloned().collect();
                (s, t)
            }
            Task::RewriteRules => {
                let s = random_sequence(&mut rng, &REWRITE_ALPHABET, REWRITE_LENGTHS);
                let t = s
                    .iter()
                    .map(|tok| {
                        let rule = table.iter().find(|r| r.input == tok).expect("rule per symbol");
                        if rng.gen_bool(REWRITE_VARIANT_PROB) {
                            rule.variant.to_owned()
                        } else {
                            rule.primary.to_owned()
                        }
                    })
                    .collect();
                (s, t)
            }
        })
        .collect();
    let n_train = size * 8 / 10;
    let n_dev = size / 10;
    let mut it = pairs.into_iter();
    let train = it.by_ref().take(n_train).collect();
    let dev = it.by_ref().take(n_dev).collect();
    let test = it.collect();
    Splits { train, dev, test }
}

pub fn format_dataset(pairs: &[RawPair]) -> String {
    let mut out = String::new();
    for (s, t) in pairs {
        out.push_str(&s.join(" "));
        out.push('\t');
        out.push_str(&t.join(" "));
        out.push('\n');
    }
    out
}

/// Writes `train.tsv`, `dev.tsv` and `test.tsv` into `dir`.
pub fn write_splits(splits: &Splits, dir: &Path) -> Result<[PathBuf; 3], DataError> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| DataError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut paths = Vec::new();
    for (name, pairs) in [("train", &splits.train), ("dev", &splits.dev), ("test", &splits.test)] {
        let path = dir.join(format!("{name}.tsv"));
        let mut f = fs::File::create(&path).map_err(io(&path))?;
        f.write_all(format_dataset(pairs).as_bytes()).map_err(io(&path))?;
        paths.push(path);
    }
    Ok(paths.try_into().expect("three splits"))
}
