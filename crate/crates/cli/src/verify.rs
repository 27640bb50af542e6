//! Seeded invariant suites over every module, run by the `verify` command.

use std::time::Instant;

use fyseq::decoding::{beam_search, exact_search};
use fyseq::entmax::{entmax15, entmax_bisect, sparsemax, DEFAULT_BISECT_MAX_ITER, DEFAULT_BISECT_TOL};
use fyseq::losses::{
    bregman_information, fy_loss, smoothed_loss, smoothed_loss_via_identity, uniform_regularizer_form, SmoothingSpec,
    TargetDistribution,
};
use fyseq::metrics::{levenshtein, CalibrationReport, Prediction};
use fyseq::tables::TableModel;
use fyseq::{transform, AlphaParam, LogitVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{ReportLine, RunReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub trials: usize,
    /// Test hook: shifts every reconstructed threshold by this much, which the
    /// threshold suite must detect.
    pub corrupt_threshold: Option<f64>,
}

impl VerifyOptions {
    pub fn new(seed: u64, trials: usize) -> Self {
        Self {
            seed,
            trials,
            corrupt_threshold: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub trials: usize,
    /// Largest violation seen; 0 when the invariant held exactly.
    pub max_error: f64,
    pub tolerance: f64,
    pub elapsed_seconds: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }

    pub fn to_line(&self) -> ReportLine {
        ReportLine::Verify {
            suite: self.suite.to_owned(),
            trials: self.trials,
            max_error: self.max_error,
            tolerance: self.tolerance,
            passed: self.passed(),
            elapsed_seconds: self.elapsed_seconds,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySummary {
    pub suites: Vec<SuiteResult>,
}

impl VerifySummary {
    pub fn failures(&self) -> usize {
        self.suites.iter().filter(|s| !s.passed()).count()
    }

    pub fn report(&self) -> RunReport {
        RunReport {
            lines: self.suites.iter().map(SuiteResult::to_line).collect(),
        }
    }
}

type Suite = fn(&mut ChaCha8Rng, &VerifyOptions) -> f64;

const SUITES: [(&str, f64, Suite); 12] = [
    ("simplex", 1e-9, simplex),
    ("translation_invariance", 1e-9, translation),
    ("permutation_equivariance", 1e-9, permutation),
    ("closed_form_vs_bisection", 1e-6, closed_form_vs_bisection),
    ("threshold_reconstruction", 1e-6, threshold_reconstruction),
    ("loss_gradients", 1e-5, loss_gradients),
    ("loss_nonnegative", 1e-12, loss_nonnegative),
    ("smoothing_identities", 1e-9, smoothing_identities),
    ("bregman_nonnegative", 1e-12, bregman_nonnegative),
    ("general_decomposition", 1e-9, general_decomposition),
    ("beam_vs_exact", 0.0, beam_vs_exact),
    ("levenshtein_oracle", 0.0, levenshtein_oracle),
];

/// Every suite runs at least once, even with `trials = 0`.
pub fn run_verify(options: &VerifyOptions) -> VerifySummary {
    let trials = options.trials.max(1);
    let mut suites: Vec<SuiteResult> = SUITES
        .iter()
        .enumerate()
        .map(|(i, &(name, tolerance, suite))| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed.wrapping_add(i as u64));
            let start = Instant::now();
            let mut max_error: f64 = 0.0;
            for _ in 0..trials {
                max_error = nan_max(max_error, suite(&mut rng, options));
            }
            SuiteResult {
                suite: name,
                trials,
                max_error,
                tolerance,
                elapsed_seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed.wrapping_add(SUITES.len() as u64));
    let start = Instant::now();
    let max_error = (0..trials).map(|_| ece_recompute(&mut rng)).fold(0.0, nan_max);
    suites.push(SuiteResult {
        suite: "ece_recompute",
        trials,
        max_error,
        tolerance: 1e-12,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    });
    VerifySummary { suites }
}

const ALPHAS: [f64; 5] = [1.0, 1.3, 1.5, 2.0, 4.0];

fn logits(rng: &mut ChaCha8Rng, dims: (usize, usize)) -> Vec<f64> {
    let n = rng.gen_range(dims.0..=dims.1);
    (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect()
}

fn lv(z: &[f64]) -> LogitVector {
    LogitVector::new(z.to_vec()).expect("finite logits")
}

fn alpha(a: f64) -> AlphaParam {
    AlphaParam::new(a).expect("alpha >= 1")
}

/// `f64::max` that treats NaN as infinitely bad instead of dropping it.
fn nan_max(m: f64, e: f64) -> f64 {
    if e.is_nan() {
        f64::INFINITY
    } else {
        m.max(e)
    }
}

fn worst(errors: impl IntoIterator<Item = f64>) -> f64 {
    errors.into_iter().fold(0.0, nan_max)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    worst(a.iter().zip(b).map(|(x, y)| (x - y).abs()))
}

fn simplex(rng: &mut ChaCha8Rng, _: &VerifyOptions) -> f64 {
    let z = logits(rng, (2, 64));
    ALPHAS
        .iter()
        .map(|&a| {
            let p = transform(&lv(&z), alpha(a));
            let sum_err = (p.probabilities().iter().sum::<f64>() - 1.0).abs();
            let neg = p.probabilities().iter().fold(0.0, |m: f64, &x| m.max(-x));
            sum_err.max(neg)
        })
        .fold(0.0, nan_max)
}

fn translation(rng: &mut ChaCha8Rng, _: &VerifyOptions) -> f64 {
    let z = logits(rng, (2, 64));
    let c = rng.gen_range(-10.0..10.0);
    let shifted: Vec<f64> = z.iter().map(|v| v + c).collect();
    ALPHAS
        .iter()
        .map(|&a| {
            max_abs_diff(
                transform(&lv(&z), alpha(a)).probabilities(),
                transform(&lv(&shifted), alpha(a)).probabilities(),
            )
        })
        .fold(0.0, nan_max)
}

fn permutation(rng: &mut ChaCha8Rng, _: &VerifyOptions) -> f64 {
    let z = logits(rng, (2, 64));
    let mut perm: Vec<usize> = (0..z.len()).collect();
    perm.shuffle(rng);
    let permuted: Vec<f64> = perm.iter().map(|&i| z[i]).collect();
    ALPHAS
        .iter()
        .map(|&a| {
            let p = transform(&lv(&z), alpha(a));
            let expected: Vec<f64> = perm.iter().map(|&i| p.get(i)).collect();
            max_abs_diff(transform(&lv(&permuted), alpha(a)).probabilities(), &expected)
        })
        .fold(0.0, nan_max)
}

fn bisect(z: &[f64], a: f64) -> Vec<f64> {
    entmax_bisect(&lv(z), alpha(a), DEFAULT_BISECT_TOL, DEFAULT_BISECT_MAX_ITER)
        .map(|p| p.into_probabilities())
        .unwrap_or_else(|_| vec![f64::NAN; z.len()])
}

fn closed_form_vs_bisection(rng: &mut ChaCha8Rng, _: &VerifyOptions) -> f64 {
    let z = logits(rng, (2, 64));
    let e15 = max_abs_diff(entmax15(&lv(&z)).probabilities(), &bisect(&z, 1.5));
    let e2 = max_abs_diff(sparsemax(&lv(&z)).probabilities(), &bisect(&z, 2.0));
    e15.max(e2)
}

/// Rebuilds each output from its reported threshold alone.
fn threshold_reconstruction(rng: &mut ChaCha8Rng, options: &VerifyOptions) -> f64 {
    let z = logits(rng, (2, 64));
    let shift = options.corrupt_threshold.unwrap_or(0.0);
    ALPHAS
        .iter()
        .map(|&a| {
            let p = transform(&lv(&z), alpha(a));
            let tau = p.threshold() + shift;
            let rebuilt: Vec<f64> = z
                .iter()
                .map(|&v| {
                    if a == 1.0 {
                        (v - tau).exp()
                    } else {
                        ((a - 1.0) * v - tau).max(0.0).powf(1.0 / (a - 1.0))
                    }
                })
                .collect();
            max_abs_diff(p.probabilities(), &rebuilt)
        })
        .fold(0.0, nan_max)
}

const LOSS_ALPHAS: [f64; 3] = [1.0, 1.5, 2.0];
const EPSILONS: [f64; 3] = [0.0, 0.01, 0.1];
const STEP: f64 = 1e-4;

fn distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.01..1.0) })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[0] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

/// Sparsemax losses have kinks where a coordinate meets the threshold; central
/// differences straddling one are meaningless.
fn near_kink(z: &[f64], a: f64) -> bool {
    if a != 2.0 {
        return false;
    }
    let tau = transform(&lv(z), alpha(a)).threshold();
    z.iter().any(|&v| (v - tau).abs() < 10.0 * STEP)
}

/// Worst of: relative error, or absolute error scaled so 1e-7 maps to 1e-5.
fn gradient_error(z: &[f64], gradient: &[f64], loss: impl Fn(&[f64]) -> f64) -> f64 {
    (0..z.len())
        .map(|j| {
            let mut plus = z.to_vec();
            let mut minus = z.to_vec();
            plus[j] += STEP;
            minus[j] -= STEP;
            let fd = (loss(&plus) - loss(&minus)) / (2.0 * STEP);
            let err = (fd - gradient[j]).abs();
            (err / gradient[j].abs().max(fd.abs())).min(err * 100.0)
        })
        .fold(0.0, nan_max)
}

fn loss_gradients(rng: &mut ChaCha8Rng, _: &VerifyOptions) -> f64 {
    let a = *LOSS_ALPHAS.choose(rng).expect("nonempty");
    let eps = *EPSILONS.choose(rng).expect("nonempty");
    let z = logits(rng, (2, 16));
    if near_kink(&z, a) {
        return 0.0;
    }
    let q = TargetDistribution::general(distribution(rng, z.len())).expect("valid distribution");
    let fy = fy_loss(&lv(&z), &q, alpha(a)).expect("matching lengths");
    let fy_err = gradient_error(&z, &fy.gradient, |v| fy_loss(&lv(v), &q, alpha(a)).map_or(f64::NAN, |r| r.value));

    let gold = rng.gen_range(0..z.len());
    let spec = SmoothingSpec::uniform(alpha(a), eps, z.len()).expect("valid spec");
    let sm = smoothed_loss(&lv(&z), gold, &spec).expect("valid gold");
    let sm_err = gradient_error(&z, &sm.gradient, |v| smoothed_loss(&lv(v), gold, &spec).map_or(f64::NAN, |r| r.value));
    worst([fy_err, sm_err])
}

fn loss_nonnegative(rng: &mut ChaCha8Rng, _: &VerifyOptions) -> f64 {
    let z = logits(rng, (2, 64));
    let q = TargetDistribution::general(distribution(rng, z.len())).expect("valid distribution");
    let gold = rng.gen_range(0..z.len());
    let mut worst: f64 = 0.0;
    for &a in &LOSS_ALPHAS {
        worst = worst.max(-fy_loss(&lv(&z), &q, alpha(a)).expect("lengths").value);
        for &eps in &EPSILONS {
            let spec = SmoothingSpec::uniform(alpha(a), eps, z.len()).expect("valid spec");
            worst = worst.max(-smoothed_loss(&lv(&z), gold, &spec).expect("gold").value);
        }
    }
    worst
}

fn smoothing_identities(rng: &mut ChaCha8Rng, _: &VerifyOptions) -> f64 {
    let a = alpha(*LOSS_ALPHAS.choose(rng).expect("nonempty"));
    let eps = rng.gen_range(0.0..0.99);
    let z = lv(&logits(rng, (2, 16)));
    let gold = rng.gen_range(0..z.len());
    let spec = SmoothingSpec::uniform(a, eps, z.len()).expect("valid spec");
    let direct = smoothed_loss(&z, gold, &spec).expect("gold").value;
    let via_identity = smoothed_loss_via_identity(&z, gold, &spec).expect("gold");
    let one_hot = TargetDistribution::one_hot(z.len(), gold).expect("gold");
    let info = bregman_information(&one_hot, spec.smoothing_distribution(), eps, a).expect("valid epsilon");
    let rebuilt = (1.0 - eps) * uniform_regularizer_form(&z, gold, &spec).expect("gold") - info;
    (direct - via_identity).abs().max((direct - rebuilt).abs())
}

fn bregman_nonnegative(rng: &mut ChaCha8Rng, _: &VerifyOptions) -> f64 {
    let n = rng.gen_range(2..=16);
    let q = TargetDistribution::general(distribution(rng, n)).expect("valid distribution");
    let r = TargetDistribution::general(distribution(rng, n)).expect("valid distribution");
    let eps = rng.gen_range(0.0..=1.0);
    LOSS_ALPHAS
        .iter()
        .map(|&a| -bregman_information(&q, &r, eps, alpha(a)).expect("valid epsilon"))
        .fold(0.0, nan_max)
}

fn general_decomposition(rng: &mut ChaCha8Rng, _: &VerifyOptions) -> f64 {
    let a = alpha(*LOSS_ALPHAS.choose(rng).expect("nonempty"));
    let eps = rng.gen_range(0.0..1.0);
    let z = lv(&logits(rng, (2, 16)));
    let gold = rng.gen_range(0..z.len());
    let r = TargetDistribution::general(distribution(rng, z.len())).expect("valid distribution");
    let spec = SmoothingSpec::new(a, eps, r.clone()).expect("valid spec");
    let one_hot = TargetDistribution::one_hot(z.len(), gold).expect("gold");
    let direct = smoothed_loss(&z, gold, &spec).expect("gold").value;
    let rebuilt = (1.0 - eps) * fy_loss(&z, &one_hot, a).expect("lengths").value
        + eps * fy_loss(&z, &r, a).expect("lengths").value
        - bregman_information(&one_hot, &r, eps, a).expect("valid epsilon");
    (direct - rebuilt).abs()
}

/// A sparse table over {PAD, BOS, EOS, 3, 4, 5} with random rows up to depth 2
/// and an EOS-forcing default below that.
fn random_table(rng: &mut ChaCha8Rng) -> TableModel {
    const NEVER: f64 = -100.0;
    let a = *[1.5, 2.0].choose(rng).expect("nonempty");
    let mut t = TableModel::uniform(6, a);
    t.set_default(vec![NEVER, NEVER, 10.0, 0.0, 0.0, 0.0]);
    let mut prefixes: Vec<Vec<usize>> = vec![vec![]];
    for x in 3..6 {
        prefixes.push(vec![x]);
        prefixes.extend((3..6).map(|y| vec![x, y]));
    }
    for p in &prefixes {
        let mut row = vec![NEVER, NEVER];
        row.extend((0..4).map(|_| rng.gen_range(-1.5..1.5)));
        t.set(p, row);
    }
    t
}

/// 1 when a beam as wide as the whole hypothesis set disagrees with exact search.
fn beam_vs_exact(rng: &mut ChaCha8Rng, _: &VerifyOptions) -> f64 {
    let t = random_table(rng);
    let Ok(exact) = exact_search(&t, &[], 8, 0.0) else {
        return f64::INFINITY;
    };
    let Ok(beam) = beam_search(&t, &[], exact.hypotheses.len(), 8) else {
        return f64::INFINITY;
    };
    match (exact.best(), beam.best()) {
        (Some(e), Some(b)) if e.tokens == b.tokens && e.log_prob == b.log_prob => 0.0,
        _ => 1.0,
    }
}

fn recursive_levenshtein(a: &[u8], b: &[u8]) -> usize {
    match (a.split_first(), b.split_first()) {
        (None, _) => b.len(),
        (_, None) => a.len(),
        (Some((x, ra)), Some((y, rb))) => {
            let sub = recursive_levenshtein(ra, rb) + usize::from(x != y);
            sub.min(recursive_levenshtein(ra, b) + 1).min(recursive_levenshtein(a, rb) + 1)
        }
    }
}

fn levenshtein_oracle(rng: &mut ChaCha8Rng, _: &VerifyOptions) -> f64 {
    let word = |rng: &mut ChaCha8Rng| -> Vec<u8> { (0..rng.gen_range(0..=4)).map(|_| rng.gen_range(0..3)).collect() };
    let a = word(rng);
    let b = word(rng);
    levenshtein(&a, &b).abs_diff(recursive_levenshtein(&a, &b)) as f64
}

/// ECE rebuilt from the stored bins by hand, against the reported value.
fn ece_recompute(rng: &mut ChaCha8Rng) -> f64 {
    let n = rng.gen_range(1..200);
    let predictions: Vec<Prediction> = (0..n)
        .map(|_| Prediction {
            confidence: rng.gen_range(0.0..=1.0),
            correct: rng.gen_bool(0.6),
        })
        .collect();
    let bins = rng.gen_range(1..=20);
    let report = CalibrationReport::from_predictions(&predictions, bins).expect("bins >= 1");
    let total: usize = report.bins.iter().map(|b| b.count).sum();
    let mut ece = 0.0;
    for b in &report.bins {
        ece += b.count as f64 * (b.accuracy - b.mean_confidence).abs();
    }
    (ece / total as f64 - report.ece).abs()
}
