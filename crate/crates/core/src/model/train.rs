use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Params, SequencePair, ToyModel};
use crate::decoding::decode_dataset_with;
use crate::error::{Error, Result};
use crate::metrics::{mean_levenshtein, per, wer};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// Adam moments, shaped like the parameters they track.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Params,
    pub v: Params,
    pub step: u64,
}

impl AdamState {
    pub fn new(params: &Params) -> Self {
        Self {
            m: params.zeros_like(),
            v: params.zeros_like(),
            step: 0,
        }
    }
}

/// One bias-corrected Adam update of a flat slice; `step` is the 1-based count
/// after this update.
pub fn adam_update(param: &mut [f64], grad: &[f64], m: &mut [f64], v: &mut [f64], step: u64, lr: f64) {
    let c1 = 1.0 - ADAM_BETA1.powi(step as i32);
    let c2 = 1.0 - ADAM_BETA2.powi(step as i32);
    for i in 0..param.len() {
        let g = grad[i];
        m[i] = ADAM_BETA1 * m[i] + (1.0 - ADAM_BETA1) * g;
        v[i] = ADAM_BETA2 * v[i] + (1.0 - ADAM_BETA2) * g * g;
        let m_hat = m[i] / c1;
        let v_hat = v[i] / c2;
        param[i] -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
    }
}

pub fn adam_step(state: &mut AdamState, params: &mut Params, grads: &Params, lr: f64) {
    state.step += 1;
    let step = state.step;
    let ps = params.tensors_mut();
    let ms = state.m.tensors_mut();
    let vs = state.v.tensors_mut();
    for (((p, g), m), v) in ps.into_iter().zip(grads.tensors()).zip(ms).zip(vs) {
        adam_update(&mut p.data, &g.data, &mut m.data, &mut v.data, step, lr);
    }
}

/// Optimizer state plus early-stopping bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainState {
    pub adam: AdamState,
    pub best_dev_metric: Option<f64>,
    pub epochs_since_improvement: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub max_epochs: usize,
    /// Non-improving epochs tolerated before stopping.
    pub patience: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
    /// Beam width used to decode the dev set after each epoch.
    pub beam_width: usize,
    /// Decoding length limit; `None` means the per-source default.
    pub max_len: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_epochs: 30,
            patience: 5,
            learning_rate: 0.005,
            batch_size: 16,
            seed: 1,
            beam_width: 5,
            max_len: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_loss: f64,
    pub dev_wer: f64,
    pub dev_per: f64,
    pub dev_mean_levenshtein: f64,
    pub improved: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// The checkpoint with the lowest dev edit distance.
    pub model: ToyModel,
    pub best_epoch: usize,
    pub log: Vec<EpochLog>,
}

/// Mini-batch Adam with early stopping on mean dev edit distance. A strictly
/// lower distance counts as an improvement, so ties keep the earlier epoch.
pub fn train(model: ToyModel, train: &[SequencePair], dev: &[SequencePair], config: &TrainConfig) -> Result<TrainOutcome> {
    if train.is_empty() || dev.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if config.batch_size == 0 || config.beam_width == 0 || config.max_epochs == 0 {
        return Err(Error::InvalidArgument(
            "batch size, beam width and epoch count must be >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = model;
    let mut state = TrainState {
        adam: AdamState::new(model.params()),
        best_dev_metric: None,
        epochs_since_improvement: 0,
    };
    let mut best = model.clone();
    let mut best_epoch = 0;
    let mut log = Vec::new();
    let mut order: Vec<usize> = (0..train.len()).collect();
    let dev_refs: Vec<&[usize]> = dev.iter().map(SequencePair::target_body).collect();

    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut batches = 0;
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<SequencePair> = chunk.iter().map(|&i| train[i].clone()).collect();
            let (loss, grads) = model.batch_loss_and_gradients(&batch)?;
            if !loss.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite training loss at epoch {epoch}")));
            }
            adam_step(&mut state.adam, model.params_mut(), &grads, config.learning_rate);
            loss_sum += loss;
            batches += 1;
        }

        let hyps = decode_dataset_with(&model, dev, config.beam_width, config.max_len)?;
        let dist = mean_levenshtein(&hyps, &dev_refs)?;
        let improved = state.best_dev_metric.is_none_or(|b| dist < b);
        if improved {
            state.best_dev_metric = Some(dist);
            state.epochs_since_improvement = 0;
            best = model.clone();
            best_epoch = epoch;
        } else {
            state.epochs_since_improvement += 1;
        }
        log.push(EpochLog {
            epoch,
            train_loss: loss_sum / batches as f64,
            dev_wer: wer(&hyps, &dev_refs)?,
            dev_per: per(&hyps, &dev_refs)?,
            dev_mean_levenshtein: dist,
            improved,
        });
        if state.epochs_since_improvement > config.patience {
            break;
        }
    }
    Ok(TrainOutcome {
        model: best,
        best_epoch,
        log,
    })
}
