//! Tsallis negentropies and the Fenchel-Young losses they induce, including
//! label smoothing toward an arbitrary distribution `r`.
//!
//! ```text
//! Ω_α(p)   = (Σ p_y^α − 1) / (α (α − 1))        α > 1
//!          = Σ p_y log p_y                       α = 1
//! L(z; q)  = Ω*(z) + Ω(q) − z·q,   ∇_z L = entmax_α(z) − q
//! L_ε(z; y) = L(z; (1 − ε) e_y + ε r)
//! ```
//!
//! Evaluating the smoothed loss never takes a log of model probabilities, so it
//! stays finite when the gold label falls outside the support.

use crate::entmax::{transform, AlphaParam, LogitVector, SimplexDistribution};
use crate::error::{Error, Result};

const SIMPLEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    OneHot,
    Uniform,
    General,
}

/// A target or smoothing distribution on the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetDistribution {
    probabilities: Vec<f64>,
    kind: TargetKind,
}

impl TargetDistribution {
    pub fn one_hot(size: usize, index: usize) -> Result<Self> {
        if index >= size {
            return Err(Error::IndexOutOfRange { index, size });
        }
        let mut probabilities = vec![0.0; size];
        probabilities[index] = 1.0;
        Ok(Self {
            probabilities,
            kind: TargetKind::OneHot,
        })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::NotOnSimplex("empty distribution".into()));
        }
        Ok(Self {
            probabilities: vec![1.0 / size as f64; size],
            kind: TargetKind::Uniform,
        })
    }

    /// Validates an arbitrary simplex point. The kind is inferred, so a vector that
    /// happens to be one-hot or uniform is tagged as such.
    pub fn general(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::NotOnSimplex("empty distribution".into()));
        }
        if let Some(p) = probabilities.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::NotOnSimplex(format!("entry {p} is negative or not finite")));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::NotOnSimplex(format!("entries sum to {sum}")));
        }
        let n = probabilities.len();
        let kind = if probabilities.iter().filter(|&&p| p == 1.0).count() == 1 {
            TargetKind::OneHot
        } else if probabilities.iter().all(|&p| p == 1.0 / n as f64) {
            TargetKind::Uniform
        } else {
            TargetKind::General
        };
        Ok(Self { probabilities, kind })
    }

    /// `(1 − ε) self + ε other`.
    pub fn mix(&self, other: &TargetDistribution, epsilon: f64) -> Result<Self> {
        check_len(self.len(), other.len())?;
        let probabilities = self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (1.0 - epsilon) * a + epsilon * b)
            .collect();
        let kind = if epsilon == 0.0 {
            self.kind
        } else if epsilon == 1.0 {
            other.kind
        } else {
            TargetKind::General
        };
        Ok(Self { probabilities, kind })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn kind(&self) -> TargetKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }
}

/// α, ε and the smoothing distribution `r` of one smoothed-loss instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingSpec {
    alpha: AlphaParam,
    epsilon: f64,
    smoothing: TargetDistribution,
}

impl SmoothingSpec {
    pub fn new(alpha: AlphaParam, epsilon: f64, smoothing: TargetDistribution) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        Ok(Self {
            alpha,
            epsilon,
            smoothing,
        })
    }

    /// Smoothing toward the uniform distribution over `vocab_size` entries.
    pub fn uniform(alpha: AlphaParam, epsilon: f64, vocab_size: usize) -> Result<Self> {
        Self::new(alpha, epsilon, TargetDistribution::uniform(vocab_size)?)
    }

    pub fn alpha(&self) -> AlphaParam {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn smoothing_distribution(&self) -> &TargetDistribution {
        &self.smoothing
    }

    /// λ = ε / (1 − ε).
    pub fn lambda(&self) -> Result<f64> {
        if self.epsilon >= 1.0 {
            return Err(Error::DegenerateEpsilon);
        }
        Ok(self.epsilon / (1.0 - self.epsilon))
    }

    /// The mixed target `(1 − ε) e_gold + ε r`.
    pub fn mixed_target(&self, gold: usize) -> Result<TargetDistribution> {
        TargetDistribution::one_hot(self.smoothing.len(), gold)?.mix(&self.smoothing, self.epsilon)
    }
}

/// Loss value together with its gradient with respect to the logits.
#[derive(Debug, Clone, PartialEq)]
pub struct LossResult {
    pub value: f64,
    pub gradient: Vec<f64>,
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Ω_α(p). Uses 0·log 0 = 0 on the Shannon branch.
pub fn tsallis_negentropy(p: &[f64], alpha: AlphaParam) -> f64 {
    let a = alpha.get();
    if alpha.is_softmax() {
        p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum()
    } else {
        let s: f64 = p.iter().map(|&x| if x > 0.0 { x.powf(a) } else { 0.0 }).sum();
        (s - 1.0) / (a * (a - 1.0))
    }
}

/// Ω* evaluated at `z` given the maximizer `p = entmax_α(z)`.
fn conjugate_at(z: &[f64], p: &SimplexDistribution, alpha: AlphaParam) -> f64 {
    if alpha.is_softmax() {
        p.threshold()
    } else {
        dot(z, p.probabilities()) - tsallis_negentropy(p.probabilities(), alpha)
    }
}

/// The convex conjugate Ω*(z) = max_p z·p − Ω_α(p); log-sum-exp at α = 1.
pub fn conjugate(z: &LogitVector, alpha: AlphaParam) -> f64 {
    let max = z.max();
    let shifted = shifted(z);
    let p = transform(&shifted, alpha);
    conjugate_at(shifted.values(), &p, alpha) + max
}

fn shifted(z: &LogitVector) -> LogitVector {
    let max = z.max();
    LogitVector::new(z.values().iter().map(|&v| v - max).collect()).expect("finite")
}

/// Loss evaluation on max-shifted logits; the loss is translation invariant.
fn fy_loss_raw(z: &LogitVector, q: &[f64], alpha: AlphaParam) -> LossResult {
    let shifted = shifted(z);
    let zs = shifted.values();
    let p = transform(&shifted, alpha);
    let value = conjugate_at(zs, &p, alpha) + tsallis_negentropy(q, alpha) - dot(zs, q);
    let gradient = p.probabilities().iter().zip(q).map(|(pi, qi)| pi - qi).collect();
    LossResult { value, gradient }
}

/// L_Ω(z; q) and its gradient `entmax_α(z) − q`.
pub fn fy_loss(z: &LogitVector, q: &TargetDistribution, alpha: AlphaParam) -> Result<LossResult> {
    check_len(z.len(), q.len())?;
    Ok(fy_loss_raw(z, q.probabilities(), alpha))
}

/// The label-smoothed loss L(z; (1 − ε) e_gold + ε r) and its gradient.
pub fn smoothed_loss(z: &LogitVector, gold: usize, spec: &SmoothingSpec) -> Result<LossResult> {
    check_len(z.len(), spec.smoothing.len())?;
    let target = spec.mixed_target(gold)?;
    Ok(fy_loss_raw(z, target.probabilities(), spec.alpha))
}

/// The same smoothed loss, rebuilt as the unsmoothed loss plus the linear term
/// `ε (z_gold − mean z)` plus the constant `Ω(mix) − Ω(e_gold)`.
/// Only defined for uniform smoothing.
pub fn smoothed_loss_via_identity(z: &LogitVector, gold: usize, spec: &SmoothingSpec) -> Result<f64> {
    check_len(z.len(), spec.smoothing.len())?;
    require_uniform(spec)?;
    let alpha = spec.alpha;
    let eps = spec.epsilon;
    let one_hot = TargetDistribution::one_hot(z.len(), gold)?;
    let base = fy_loss_raw(z, one_hot.probabilities(), alpha).value;
    let zs = shifted(z);
    let zs = zs.values();
    let mean = zs.iter().sum::<f64>() / zs.len() as f64;
    let mix = spec.mixed_target(gold)?;
    let constant = tsallis_negentropy(mix.probabilities(), alpha)
        - tsallis_negentropy(one_hot.probabilities(), alpha);
    Ok(base + eps * (zs[gold] - mean) + constant)
}

fn require_uniform(spec: &SmoothingSpec) -> Result<()> {
    if spec.smoothing.kind() == TargetKind::Uniform {
        Ok(())
    } else {
        Err(Error::InvalidArgument("identity requires uniform smoothing".into()))
    }
}

/// `L(z; e_gold) + λ L(z; u)` with λ = ε / (1 − ε). Scaled by (1 − ε) and shifted
/// by minus the Bregman information of `(e_gold, u)` it equals the smoothed loss.
pub fn uniform_regularizer_form(z: &LogitVector, gold: usize, spec: &SmoothingSpec) -> Result<f64> {
    check_len(z.len(), spec.smoothing.len())?;
    require_uniform(spec)?;
    let lambda = spec.lambda()?;
    let one_hot = TargetDistribution::one_hot(z.len(), gold)?;
    let gold_loss = fy_loss_raw(z, one_hot.probabilities(), spec.alpha).value;
    if lambda == 0.0 {
        return Ok(gold_loss);
    }
    let uniform_loss = fy_loss_raw(z, spec.smoothing.probabilities(), spec.alpha).value;
    Ok(gold_loss + lambda * uniform_loss)
}

/// Jensen gap `−Ω((1 − ε) q + ε r) + (1 − ε) Ω(q) + ε Ω(r)`; nonnegative by convexity.
pub fn bregman_information(
    q: &TargetDistribution,
    r: &TargetDistribution,
    epsilon: f64,
    alpha: AlphaParam,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let mix = q.mix(r, epsilon)?;
    Ok(-tsallis_negentropy(mix.probabilities(), alpha)
        + (1.0 - epsilon) * tsallis_negentropy(q.probabilities(), alpha)
        + epsilon * tsallis_negentropy(r.probabilities(), alpha))
}

/// λ = ε / (1 − ε) for a spec.
pub fn lambda(spec: &SmoothingSpec) -> Result<f64> {
    spec.lambda()
}
