//! The α-entmax family of maps from real scores onto the probability simplex.
//!
//! For α > 1 the output is
//!
//! ```text
//! p_y = [(α − 1) z_y − τ]_+ ^ (1 / (α − 1))
//! ```
//!
//! with τ chosen so that the entries sum to one. α = 1 is softmax (τ is then the
//! log-partition function), α = 2 is sparsemax and α = 1.5 has its own sort-based
//! algorithm. Every other α is solved by bisection on τ.
//!
//! Entries outside the support are exactly `0.0`; downstream code (support
//! density, exact search) relies on that.

use crate::error::{Error, Result};

pub const DEFAULT_BISECT_TOL: f64 = 1e-12;
pub const DEFAULT_BISECT_MAX_ITER: usize = 100;

/// Raw scores over the vocabulary. Nonempty, all entries finite.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitVector(Vec<f64>);

impl LogitVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyLogits);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteLogit { index, value });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for LogitVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl TryFrom<&[f64]> for LogitVector {
    type Error = Error;

    fn try_from(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }
}

/// The entmax parameter. Values below one are rejected here, once.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AlphaParam(f64);

impl AlphaParam {
    pub const SOFTMAX: AlphaParam = AlphaParam(1.0);
    pub const ENTMAX15: AlphaParam = AlphaParam(1.5);
    pub const SPARSEMAX: AlphaParam = AlphaParam(2.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha >= 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_softmax(self) -> bool {
        self.0 == 1.0
    }
}

/// A point on the simplex together with its support and normalizing threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexDistribution {
    probabilities: Vec<f64>,
    support: Vec<usize>,
    threshold: f64,
}

impl SimplexDistribution {
    /// Builds a distribution from already-normalized probabilities. The support is
    /// recomputed from the entries, so it always matches `p > 0` exactly.
    pub fn from_parts(probabilities: Vec<f64>, threshold: f64) -> Self {
        let support = probabilities
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| i)
            .collect();
        Self {
            probabilities,
            support,
            threshold,
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Indices with strictly positive probability, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// τ in the parameterization of the module docs; log-sum-exp for softmax.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.probabilities[index]
    }

    /// Highest-probability index; ties resolve to the lowest index.
    pub fn argmax(&self) -> usize {
        argmax(&self.probabilities)
    }

    pub fn into_probabilities(self) -> Vec<f64> {
        self.probabilities
    }
}

/// Index of the largest entry, lowest index on ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// The β-exponential: `[1 + (1 − β) v]_+ ^ (1 / (1 − β))`, or `exp(v)` at β = 1.
pub fn beta_exp(v: f64, beta: f64) -> f64 {
    if beta == 1.0 {
        return v.exp();
    }
    let base = 1.0 + (1.0 - beta) * v;
    if base <= 0.0 {
        0.0
    } else {
        base.powf(1.0 / (1.0 - beta))
    }
}

pub fn log_sum_exp(z: &[f64]) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = z.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}

pub fn softmax(z: &LogitVector) -> SimplexDistribution {
    let values = z.values();
    let max = z.max();
    let mut probs: Vec<f64> = values.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= sum;
    }
    SimplexDistribution::from_parts(probs, max + sum.ln())
}

fn sorted_descending(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted
}

/// Euclidean projection onto the simplex (α = 2), sort-based.
pub fn sparsemax(z: &LogitVector) -> SimplexDistribution {
    let max = z.max();
    let shifted: Vec<f64> = z.values().iter().map(|&v| v - max).collect();
    let sorted = sorted_descending(&shifted);

    let mut cumsum = 0.0;
    let mut support_size = 0;
    let mut support_sum = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cumsum += v;
        let k = k + 1;
        if 1.0 + k as f64 * v > cumsum {
            support_size = k;
            support_sum = cumsum;
        }
    }
    let tau = (support_sum - 1.0) / support_size as f64;
    let probs = shifted.iter().map(|&v| (v - tau).max(0.0)).collect();
    SimplexDistribution::from_parts(probs, tau + max)
}

/// 1.5-entmax via the sort-based square-root algorithm.
pub fn entmax15(z: &LogitVector) -> SimplexDistribution {
    let max = z.max();
    // (α − 1) z with α = 1.5, shifted so the largest entry is 0.
    let scaled: Vec<f64> = z.values().iter().map(|&v| (v - max) / 2.0).collect();
    let sorted = sorted_descending(&scaled);

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut tau_star = f64::NEG_INFINITY;
    for (k, &v) in sorted.iter().enumerate() {
        sum += v;
        sum_sq += v * v;
        let k = (k + 1) as f64;
        let mean = sum / k;
        let mean_sq = sum_sq / k;
        let ss = k * (mean_sq - mean * mean);
        let delta = ((1.0 - ss) / k).max(0.0);
        let tau = mean - delta.sqrt();
        if tau <= v {
            tau_star = tau;
        } else {
            break;
        }
    }

    let mut probs: Vec<f64> = scaled
        .iter()
        .map(|&v| {
            let base = (v - tau_star).max(0.0);
            base * base
        })
        .collect();
    // The closed form is exact up to rounding; remove the last ulps of drift.
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    SimplexDistribution::from_parts(probs, tau_star + max / 2.0)
}

/// α-entmax for arbitrary α ≥ 1, by bisection on the threshold.
pub fn entmax_bisect(
    z: &LogitVector,
    alpha: AlphaParam,
    tol: f64,
    max_iter: usize,
) -> Result<SimplexDistribution> {
    if alpha.is_softmax() {
        return Ok(softmax(z));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let am1 = alpha.get() - 1.0;
    let exponent = 1.0 / am1;
    let max = z.max();
    let scaled: Vec<f64> = z.values().iter().map(|&v| am1 * (v - max)).collect();
    let dim = scaled.len() as f64;

    let mass = |tau: f64| -> f64 {
        scaled
            .iter()
            .map(|&v| {
                let base = v - tau;
                if base > 0.0 {
                    base.powf(exponent)
                } else {
                    0.0
                }
            })
            .sum()
    };

    // The largest scaled entry is 0: at τ = −1 it alone carries mass 1, and at
    // τ = −(1/d)^(α−1) no entry can exceed 1/d.
    let mut lo = -1.0;
    let mut hi = -(1.0 / dim).powf(am1);
    let mut tau = lo;
    let mut residual = mass(lo) - 1.0;
    let mut collapsed = false;
    for _ in 0..max_iter {
        if residual.abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Adjacent floats: the mass is too steep here for `tol` to be
            // representable, and renormalization absorbs the remainder.
            collapsed = true;
            break;
        }
        tau = mid;
        residual = mass(tau) - 1.0;
        if residual >= 0.0 {
            lo = tau;
        } else {
            hi = tau;
        }
    }
    if residual.abs() > tol && !collapsed {
        return Err(Error::IterationLimitExceeded {
            residual: residual.abs(),
            iterations: max_iter,
        });
    }

    let mut probs: Vec<f64> = scaled
        .iter()
        .map(|&v| {
            let base = v - tau;
            if base > 0.0 {
                base.powf(exponent)
            } else {
                0.0
            }
        })
        .collect();
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    Ok(SimplexDistribution::from_parts(probs, tau + am1 * max))
}

/// Routes to the exact algorithm for α ∈ {1, 1.5, 2} and to bisection otherwise.
pub fn transform(z: &LogitVector, alpha: AlphaParam) -> SimplexDistribution {
    match alpha.get() {
        a if a == 1.0 => softmax(z),
        a if a == 1.5 => entmax15(z),
        a if a == 2.0 => sparsemax(z),
        _ => entmax_bisect(z, alpha, DEFAULT_BISECT_TOL, DEFAULT_BISECT_MAX_ITER)
            .expect("bisection converges for finite logits"),
    }
}
