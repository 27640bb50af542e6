//! Task metrics and the forced-decoding analyses (support density, calibration).

use crate::error::{Error, Result};
use crate::model::{forced_decode, ScoreModel, SequencePair};

/// Unit-cost edit distance.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut row: Vec<usize> = (0..=a.len()).collect();
    for (j, bj) in b.iter().enumerate() {
        let mut diag = row[0];
        row[0] = j + 1;
        for (i, ai) in a.iter().enumerate() {
            let up = row[i + 1];
            let cost = usize::from(ai != bj);
            row[i + 1] = (diag + cost).min(up + 1).min(row[i] + 1);
            diag = up;
        }
    }
    row[a.len()]
}

fn check_lengths<A, B>(hyps: &[A], refs: &[B]) -> Result<()> {
    if hyps.len() == refs.len() {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            expected: refs.len(),
            actual: hyps.len(),
        })
    }
}

/// Percentage of hypotheses that differ from their reference.
pub fn wer<T: PartialEq, H: AsRef<[T]>, R: AsRef<[T]>>(hyps: &[H], refs: &[R]) -> Result<f64> {
    check_lengths(hyps, refs)?;
    if refs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let wrong = hyps.iter().zip(refs).filter(|(h, r)| h.as_ref() != r.as_ref()).count();
    Ok(100.0 * wrong as f64 / refs.len() as f64)
}

/// 100 × total edit distance / total reference length.
pub fn per<T: PartialEq, H: AsRef<[T]>, R: AsRef<[T]>>(hyps: &[H], refs: &[R]) -> Result<f64> {
    check_lengths(hyps, refs)?;
    let ref_len: usize = refs.iter().map(|r| r.as_ref().len()).sum();
    if ref_len == 0 {
        return Err(Error::EmptyReferences);
    }
    let dist: usize = hyps.iter().zip(refs).map(|(h, r)| levenshtein(h.as_ref(), r.as_ref())).sum();
    Ok(100.0 * dist as f64 / ref_len as f64)
}

/// Percentage of exact matches.
pub fn accuracy<T: PartialEq, H: AsRef<[T]>, R: AsRef<[T]>>(hyps: &[H], refs: &[R]) -> Result<f64> {
    Ok(100.0 - wer(hyps, refs)?)
}

/// Mean edit distance per example.
pub fn mean_levenshtein<T: PartialEq, H: AsRef<[T]>, R: AsRef<[T]>>(hyps: &[H], refs: &[R]) -> Result<f64> {
    check_lengths(hyps, refs)?;
    if refs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let dist: usize = hyps.iter().zip(refs).map(|(h, r)| levenshtein(h.as_ref(), r.as_ref())).sum();
    Ok(dist as f64 / refs.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    /// Mean over force-decoded steps of `100 × |support| / |V|`.
    pub mean_support_percentage: f64,
    /// Support size at every step, per example.
    pub support_sizes: Vec<Vec<usize>>,
    pub vocab_size: usize,
}

impl DensityReport {
    pub fn from_support_sizes(support_sizes: Vec<Vec<usize>>, vocab_size: usize) -> Result<Self> {
        let steps: usize = support_sizes.iter().map(Vec::len).sum();
        if steps == 0 || vocab_size == 0 {
            return Err(Error::EmptyDataset);
        }
        let total: f64 = support_sizes
            .iter()
            .flatten()
            .map(|&s| 100.0 * s as f64 / vocab_size as f64)
            .sum();
        Ok(Self {
            mean_support_percentage: total / steps as f64,
            support_sizes,
            vocab_size,
        })
    }
}

/// Support sizes of the force-decoded distributions, averaged over steps.
pub fn support_density<M: ScoreModel + ?Sized>(model: &M, dataset: &[SequencePair]) -> Result<DensityReport> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let sizes = dataset
        .iter()
        .map(|pair| Ok(forced_decode(model, pair)?.iter().map(|d| d.support().len()).collect()))
        .collect::<Result<Vec<Vec<usize>>>>()?;
    DensityReport::from_support_sizes(sizes, model.vocab_size())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationBin {
    pub count: usize,
    pub mean_confidence: f64,
    pub accuracy: f64,
}

/// Expected calibration error with `M` equal-width bins.
///
/// Bin `m` (1-based) holds confidences in `((m−1)/M, m/M]`; confidence 0 goes to
/// the first bin.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub bin_count: usize,
    pub bins: Vec<CalibrationBin>,
    pub ece: f64,
}

/// A single prediction: confidence of the argmax and whether it was right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub confidence: f64,
    pub correct: bool,
}

pub fn bin_index(confidence: f64, bins: usize) -> usize {
    let edge = |m: usize| m as f64 / bins as f64;
    let mut m = ((confidence * bins as f64).ceil() as usize).clamp(1, bins);
    // The product can round across an edge; settle against the edges themselves.
    while m > 1 && confidence <= edge(m - 1) {
        m -= 1;
    }
    while m < bins && confidence > edge(m) {
        m += 1;
    }
    m - 1
}

impl CalibrationReport {
    pub fn from_predictions(predictions: &[Prediction], bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidArgument("at least one bin is required".into()));
        }
        let mut count = vec![0usize; bins];
        let mut conf = vec![0.0; bins];
        let mut hits = vec![0usize; bins];
        for p in predictions {
            let b = bin_index(p.confidence, bins);
            count[b] += 1;
            conf[b] += p.confidence;
            hits[b] += usize::from(p.correct);
        }
        let bins: Vec<CalibrationBin> = (0..bins)
            .map(|b| {
                if count[b] == 0 {
                    CalibrationBin {
                        count: 0,
                        mean_confidence: 0.0,
                        accuracy: 0.0,
                    }
                } else {
                    CalibrationBin {
                        count: count[b],
                        mean_confidence: conf[b] / count[b] as f64,
                        accuracy: hits[b] as f64 / count[b] as f64,
                    }
                }
            })
            .collect();
        let ece = ece_from_bins(&bins);
        Ok(Self {
            bin_count: bins.len(),
            bins,
            ece,
        })
    }

    /// Recomputes ECE from the stored bins.
    pub fn recompute(&self) -> f64 {
        ece_from_bins(&self.bins)
    }

    pub fn total(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }
}

fn ece_from_bins(bins: &[CalibrationBin]) -> f64 {
    let n: usize = bins.iter().map(|b| b.count).sum();
    if n == 0 {
        return 0.0;
    }
    bins.iter()
        .map(|b| b.count as f64 / n as f64 * (b.accuracy - b.mean_confidence).abs())
        .sum()
}

/// Argmax confidence and correctness at every force-decoded step.
pub fn forced_predictions<M: ScoreModel + ?Sized>(model: &M, dataset: &[SequencePair]) -> Result<Vec<Prediction>> {
    let mut out = Vec::new();
    for pair in dataset {
        for (dist, &gold) in forced_decode(model, pair)?.iter().zip(pair.target()) {
            let best = dist.argmax();
            out.push(Prediction {
                confidence: dist.get(best),
                correct: best == gold,
            });
        }
    }
    Ok(out)
}

pub fn expected_calibration_error<M: ScoreModel + ?Sized>(
    model: &M,
    dataset: &[SequencePair],
    bins: usize,
) -> Result<CalibrationReport> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    CalibrationReport::from_predictions(&forced_predictions(model, dataset)?, bins)
}
