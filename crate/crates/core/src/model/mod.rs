//! A desk-scale conditional sequence model.
//!
//! At target position `i` the model sees the last `n` target tokens (BOS-padded)
//! and a dot-product attention readout over the source. Source keys are the sum of
//! a token embedding and two position embeddings (counted from the start and from
//! the end), and an EOS is appended to every source so the model can attend to
//! "past the end". The query is `W_q (pos_i + emb(y_{i-1}))`. A single tanh layer
//! maps the concatenated context to logits, and `entmax_α` turns those into the
//! next-token distribution.
//!
//! Gradients are computed by hand; `tests/gradients.rs` checks them against
//! central differences.

mod checkpoint;
mod train;
mod vocab;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, MAGIC};
pub use train::{adam_step, adam_update, train, AdamState, EpochLog, TrainConfig, TrainOutcome, TrainState};
pub use vocab::{SequencePair, Vocabulary, BOS, BOS_TOKEN, EOS, EOS_TOKEN, PAD, PAD_TOKEN};

use crate::entmax::{transform, AlphaParam, LogitVector, SimplexDistribution};
use crate::error::{Error, Result};
use crate::losses::{smoothed_loss, SmoothingSpec};

/// Anything that scores the next target token given a source and a target prefix.
///
/// `prefix` holds the target tokens generated so far, without BOS.
pub trait ScoreModel {
    fn vocab_size(&self) -> usize;

    fn alpha(&self) -> AlphaParam;

    fn logits(&self, source: &[usize], prefix: &[usize]) -> Result<LogitVector>;

    fn distribution(&self, source: &[usize], prefix: &[usize]) -> Result<SimplexDistribution> {
        Ok(transform(&self.logits(source, prefix)?, self.alpha()))
    }
}

/// Chain-rule log-probability of `pair.target`. Returns `-inf` as soon as a step
/// assigns the gold token probability exactly zero.
pub fn sequence_log_prob<M: ScoreModel + ?Sized>(model: &M, pair: &SequencePair) -> Result<f64> {
    sequence_log_prob_of(model, pair.source(), pair.target())
}

/// As [`sequence_log_prob`], for any token sequence (EOS-terminated or not).
pub fn sequence_log_prob_of<M: ScoreModel + ?Sized>(
    model: &M,
    source: &[usize],
    target: &[usize],
) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..target.len() {
        let p = model.distribution(source, &target[..i])?;
        let gold = target[i];
        if gold >= p.len() {
            return Err(Error::UnknownToken(gold));
        }
        let prob = p.get(gold);
        if prob == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        total += prob.ln();
    }
    Ok(total)
}

/// Output distributions at every gold step, feeding the gold prefix.
pub fn forced_decode<M: ScoreModel + ?Sized>(
    model: &M,
    pair: &SequencePair,
) -> Result<Vec<SimplexDistribution>> {
    let target = pair.target();
    (0..target.len())
        .map(|i| model.distribution(pair.source(), &target[..i]))
        .collect()
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    fn uniform(rows: usize, cols: usize, scale: f64, rng: &mut impl Rng) -> Self {
        let data = (0..rows * cols).map(|_| rng.gen_range(-scale..=scale)).collect();
        Self { rows, cols, data }
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    fn same_shape(&self) -> Self {
        Self::zeros(self.rows, self.cols)
    }
}

/// All trainable tensors. Also used for gradients and optimizer moments.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub source_embeddings: Tensor,
    pub target_embeddings: Tensor,
    pub source_positions: Tensor,
    pub source_reverse_positions: Tensor,
    pub target_positions: Tensor,
    pub attention_query: Tensor,
    pub hidden_weights: Tensor,
    pub hidden_bias: Tensor,
    pub output_weights: Tensor,
    pub output_bias: Tensor,
}

impl Params {
    pub const NAMES: [&'static str; 10] = [
        "source_embeddings",
        "target_embeddings",
        "source_positions",
        "source_reverse_positions",
        "target_positions",
        "attention_query",
        "hidden_weights",
        "hidden_bias",
        "output_weights",
        "output_bias",
    ];

    pub fn tensors(&self) -> [&Tensor; 10] {
        [
            &self.source_embeddings,
            &self.target_embeddings,
            &self.source_positions,
            &self.source_reverse_positions,
            &self.target_positions,
            &self.attention_query,
            &self.hidden_weights,
            &self.hidden_bias,
            &self.output_weights,
            &self.output_bias,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut Tensor; 10] {
        [
            &mut self.source_embeddings,
            &mut self.target_embeddings,
            &mut self.source_positions,
            &mut self.source_reverse_positions,
            &mut self.target_positions,
            &mut self.attention_query,
            &mut self.hidden_weights,
            &mut self.hidden_bias,
            &mut self.output_weights,
            &mut self.output_bias,
        ]
    }

    pub fn zeros_like(&self) -> Self {
        let [a, b, c, d, e, f, g, h, i, j] = self.tensors();
        Self {
            source_embeddings: a.same_shape(),
            target_embeddings: b.same_shape(),
            source_positions: c.same_shape(),
            source_reverse_positions: d.same_shape(),
            target_positions: e.same_shape(),
            attention_query: f.same_shape(),
            hidden_weights: g.same_shape(),
            hidden_bias: h.same_shape(),
            output_weights: i.same_shape(),
            output_bias: j.same_shape(),
        }
    }

    fn from_tensors(t: Vec<Tensor>) -> Result<Self> {
        let [a, b, c, d, e, f, g, h, i, j]: [Tensor; 10] = t
            .try_into()
            .map_err(|v: Vec<Tensor>| Error::LengthMismatch {
                expected: 10,
                actual: v.len(),
            })?;
        Ok(Self {
            source_embeddings: a,
            target_embeddings: b,
            source_positions: c,
            source_reverse_positions: d,
            target_positions: e,
            attention_query: f,
            hidden_weights: g,
            hidden_bias: h,
            output_weights: i,
            output_bias: j,
        })
    }

    pub fn all_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.data.iter().all(|v| v.is_finite()))
    }

    pub fn scale(&mut self, factor: f64) {
        for t in self.tensors_mut() {
            t.data.iter_mut().for_each(|v| *v *= factor);
        }
    }
}

/// Sizes of the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelShape {
    pub embedding_dim: usize,
    pub hidden_dim: usize,
    pub context: usize,
    pub max_positions: usize,
}

impl Default for ModelShape {
    fn default() -> Self {
        Self {
            embedding_dim: 32,
            hidden_dim: 64,
            context: 3,
            max_positions: 64,
        }
    }
}

pub const INIT_SCALE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct ToyModel {
    vocab: Vocabulary,
    shape: ModelShape,
    smoothing: SmoothingSpec,
    params: Params,
}

/// Source side of one example: tokens (PAD dropped, EOS appended) and their keys.
struct SourceEncoding {
    tokens: Vec<usize>,
    keys: Vec<f64>,
}

/// Everything the backward pass needs from one forward step.
struct StepCache {
    context_tokens: Vec<usize>,
    position: usize,
    query_input: Vec<f64>,
    query: Vec<f64>,
    attention: Vec<f64>,
    context: Vec<f64>,
    hidden: Vec<f64>,
    logits: Vec<f64>,
}

fn matvec(m: &Tensor, x: &[f64], bias: Option<&Tensor>, out: &mut Vec<f64>) {
    out.clear();
    for r in 0..m.rows {
        let row = m.row(r);
        let mut acc = bias.map_or(0.0, |b| b.data[r]);
        for (w, v) in row.iter().zip(x) {
            acc += w * v;
        }
        out.push(acc);
    }
}

fn add_into(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

impl ToyModel {
    /// Fresh model with parameters drawn uniformly from [−0.1, 0.1].
    pub fn new(vocab: Vocabulary, shape: ModelShape, smoothing: SmoothingSpec, seed: u64) -> Result<Self> {
        let v = vocab.len();
        if smoothing.smoothing_distribution().len() != v {
            return Err(Error::LengthMismatch {
                expected: v,
                actual: smoothing.smoothing_distribution().len(),
            });
        }
        if shape.embedding_dim == 0 || shape.hidden_dim == 0 || shape.context == 0 || shape.max_positions == 0 {
            return Err(Error::InvalidArgument("model dimensions must be positive".into()));
        }
        let ModelShape {
            embedding_dim: d,
            hidden_dim: h,
            context: n,
            max_positions: p,
        } = shape;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = INIT_SCALE;
        let params = Params {
            source_embeddings: Tensor::uniform(v, d, s, &mut rng),
            target_embeddings: Tensor::uniform(v, d, s, &mut rng),
            source_positions: Tensor::uniform(p, d, s, &mut rng),
            source_reverse_positions: Tensor::uniform(p, d, s, &mut rng),
            target_positions: Tensor::uniform(p, d, s, &mut rng),
            attention_query: Tensor::uniform(d, d, s, &mut rng),
            hidden_weights: Tensor::uniform(h, (n + 1) * d, s, &mut rng),
            hidden_bias: Tensor::uniform(h, 1, s, &mut rng),
            output_weights: Tensor::uniform(v, h, s, &mut rng),
            output_bias: Tensor::uniform(v, 1, s, &mut rng),
        };
        Ok(Self {
            vocab,
            shape,
            smoothing,
            params,
        })
    }

    /// Assembles a model from explicit parameters, checking every shape.
    pub fn from_parts(vocab: Vocabulary, shape: ModelShape, smoothing: SmoothingSpec, params: Params) -> Result<Self> {
        let mut model = Self::new(vocab, shape, smoothing, 0)?;
        for (name, (want, got)) in Params::NAMES
            .iter()
            .zip(model.params.tensors().into_iter().zip(params.tensors()))
        {
            if (want.rows, want.cols) != (got.rows, got.cols) {
                return Err(Error::Checkpoint(format!(
                    "tensor {name} has shape {}x{}, expected {}x{}",
                    got.rows, got.cols, want.rows, want.cols
                )));
            }
        }
        if !params.all_finite() {
            return Err(Error::Checkpoint("non-finite parameter".into()));
        }
        model.params = params;
        Ok(model)
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn shape(&self) -> ModelShape {
        self.shape
    }

    pub fn smoothing(&self) -> &SmoothingSpec {
        &self.smoothing
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut Params {
        &mut self.params
    }

    fn check_tokens(&self, tokens: &[usize]) -> Result<()> {
        match tokens.iter().find(|&&t| t >= self.vocab.len()) {
            Some(&t) => Err(Error::UnknownToken(t)),
            None => Ok(()),
        }
    }

    fn position(&self, i: usize) -> usize {
        i.min(self.shape.max_positions - 1)
    }

    fn encode_source(&self, source: &[usize]) -> Result<SourceEncoding> {
        self.check_tokens(source)?;
        let d = self.shape.embedding_dim;
        let mut tokens: Vec<usize> = source.iter().copied().filter(|&t| t != PAD).collect();
        tokens.push(EOS);
        let len = tokens.len();
        let mut keys = Vec::with_capacity(len * d);
        for (j, &t) in tokens.iter().enumerate() {
            let e = self.params.source_embeddings.row(t);
            let fwd = self.params.source_positions.row(self.position(j));
            let rev = self.params.source_reverse_positions.row(self.position(len - 1 - j));
            keys.extend((0..d).map(|k| e[k] + fwd[k] + rev[k]));
        }
        Ok(SourceEncoding { tokens, keys })
    }

    fn forward_cached(&self, enc: &SourceEncoding, prefix: &[usize]) -> StepCache {
        let d = self.shape.embedding_dim;
        let n = self.shape.context;
        let p = &self.params;

        let context_tokens: Vec<usize> = (0..n)
            .map(|k| {
                // Slot k holds the token n − k steps back.
                let back = n - k;
                if back <= prefix.len() {
                    prefix[prefix.len() - back]
                } else {
                    BOS
                }
            })
            .collect();
        let prev = context_tokens[n - 1];
        let position = self.position(prefix.len());

        let query_input: Vec<f64> = p
            .target_positions
            .row(position)
            .iter()
            .zip(p.target_embeddings.row(prev))
            .map(|(a, b)| a + b)
            .collect();
        let mut query = Vec::with_capacity(d);
        matvec(&p.attention_query, &query_input, None, &mut query);

        let scale = 1.0 / (d as f64).sqrt();
        let scores: Vec<f64> = enc
            .keys
            .chunks_exact(d)
            .map(|k| k.iter().zip(&query).map(|(a, b)| a * b).sum::<f64>() * scale)
            .collect();
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut attention: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
        let z: f64 = attention.iter().sum();
        attention.iter_mut().for_each(|a| *a /= z);

        let mut context = Vec::with_capacity((n + 1) * d);
        for &t in &context_tokens {
            context.extend_from_slice(p.target_embeddings.row(t));
        }
        let mut readout = vec![0.0; d];
        for (a, k) in attention.iter().zip(enc.keys.chunks_exact(d)) {
            for (r, kv) in readout.iter_mut().zip(k) {
                *r += a * kv;
            }
        }
        context.extend_from_slice(&readout);

        let mut hidden = Vec::with_capacity(self.shape.hidden_dim);
        matvec(&p.hidden_weights, &context, Some(&p.hidden_bias), &mut hidden);
        hidden.iter_mut().for_each(|h| *h = h.tanh());

        let mut logits = Vec::with_capacity(self.vocab.len());
        matvec(&p.output_weights, &hidden, Some(&p.output_bias), &mut logits);

        StepCache {
            context_tokens,
            position,
            query_input,
            query,
            attention,
            context,
            hidden,
            logits,
        }
    }

    /// Accumulates parameter gradients for one step into `grads`; key gradients
    /// go to `dkeys` and are scattered once per example.
    fn backward(&self, enc: &SourceEncoding, cache: &StepCache, dlogits: &[f64], grads: &mut Params, dkeys: &mut [f64]) {
        let d = self.shape.embedding_dim;
        let n = self.shape.context;
        let hdim = self.shape.hidden_dim;
        let p = &self.params;

        let mut dhidden = vec![0.0; hdim];
        for (v, &g) in dlogits.iter().enumerate() {
            if g == 0.0 {
                continue;
            }
            grads.output_bias.data[v] += g;
            let grow = grads.output_weights.row_mut(v);
            for (gw, h) in grow.iter_mut().zip(&cache.hidden) {
                *gw += g * h;
            }
            for (dh, w) in dhidden.iter_mut().zip(p.output_weights.row(v)) {
                *dh += g * w;
            }
        }

        let width = (n + 1) * d;
        let mut dcontext = vec![0.0; width];
        for k in 0..hdim {
            let h = cache.hidden[k];
            let dpre = dhidden[k] * (1.0 - h * h);
            if dpre == 0.0 {
                continue;
            }
            grads.hidden_bias.data[k] += dpre;
            let grow = grads.hidden_weights.row_mut(k);
            for (gw, c) in grow.iter_mut().zip(&cache.context) {
                *gw += dpre * c;
            }
            for (dc, w) in dcontext.iter_mut().zip(p.hidden_weights.row(k)) {
                *dc += dpre * w;
            }
        }

        for (slot, &t) in cache.context_tokens.iter().enumerate() {
            add_into(grads.target_embeddings.row_mut(t), &dcontext[slot * d..(slot + 1) * d]);
        }
        let dreadout = &dcontext[n * d..];

        let scale = 1.0 / (d as f64).sqrt();
        let dattn: Vec<f64> = enc
            .keys
            .chunks_exact(d)
            .map(|k| k.iter().zip(dreadout).map(|(a, b)| a * b).sum())
            .collect();
        let weighted: f64 = cache.attention.iter().zip(&dattn).map(|(a, b)| a * b).sum();
        let mut dquery = vec![0.0; d];
        for (j, (key, dkey)) in enc.keys.chunks_exact(d).zip(dkeys.chunks_exact_mut(d)).enumerate() {
            let a = cache.attention[j];
            let dscore = a * (dattn[j] - weighted) * scale;
            for k in 0..d {
                dkey[k] += a * dreadout[k] + dscore * cache.query[k];
                dquery[k] += dscore * key[k];
            }
        }

        let mut dquery_input = vec![0.0; d];
        for (r, &dq) in dquery.iter().enumerate() {
            let grow = grads.attention_query.row_mut(r);
            for (gw, u) in grow.iter_mut().zip(&cache.query_input) {
                *gw += dq * u;
            }
            for (du, w) in dquery_input.iter_mut().zip(p.attention_query.row(r)) {
                *du += dq * w;
            }
        }
        add_into(grads.target_positions.row_mut(cache.position), &dquery_input);
        add_into(grads.target_embeddings.row_mut(cache.context_tokens[n - 1]), &dquery_input);
    }

    fn scatter_key_grads(&self, enc: &SourceEncoding, dkeys: &[f64], grads: &mut Params) {
        let d = self.shape.embedding_dim;
        let len = enc.tokens.len();
        for (j, (&t, dk)) in enc.tokens.iter().zip(dkeys.chunks_exact(d)).enumerate() {
            add_into(grads.source_embeddings.row_mut(t), dk);
            add_into(grads.source_positions.row_mut(self.position(j)), dk);
            add_into(grads.source_reverse_positions.row_mut(self.position(len - 1 - j)), dk);
        }
    }

    /// Logits for the next target token.
    pub fn forward_step(&self, source: &[usize], prefix: &[usize]) -> Result<LogitVector> {
        self.check_tokens(prefix)?;
        let enc = self.encode_source(source)?;
        LogitVector::new(self.forward_cached(&enc, prefix).logits)
    }

    fn count_tokens(batch: &[SequencePair]) -> usize {
        batch
            .iter()
            .map(|p| p.target().iter().filter(|&&t| t != PAD).count())
            .sum()
    }

    /// Mean per-token smoothed loss over the batch, from forward passes only.
    pub fn batch_loss(&self, batch: &[SequencePair]) -> Result<f64> {
        if batch.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut total = 0.0;
        for pair in batch {
            let target = pair.target();
            for (i, &gold) in target.iter().enumerate() {
                if gold == PAD {
                    continue;
                }
                let z = self.forward_step(pair.source(), &target[..i])?;
                total += smoothed_loss(&z, gold, &self.smoothing)?.value;
            }
        }
        Ok(total / Self::count_tokens(batch) as f64)
    }

    /// Mean per-token smoothed loss and its gradient for every parameter.
    pub fn batch_loss_and_gradients(&self, batch: &[SequencePair]) -> Result<(f64, Params)> {
        if batch.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let count = Self::count_tokens(batch) as f64;
        let d = self.shape.embedding_dim;
        let mut grads = self.params.zeros_like();
        let mut total = 0.0;
        for pair in batch {
            let target = pair.target();
            self.check_tokens(target)?;
            let enc = self.encode_source(pair.source())?;
            let mut dkeys = vec![0.0; enc.tokens.len() * d];
            for (i, &gold) in target.iter().enumerate() {
                if gold == PAD {
                    continue;
                }
                let cache = self.forward_cached(&enc, &target[..i]);
                let z = LogitVector::new(cache.logits.clone())?;
                let loss = smoothed_loss(&z, gold, &self.smoothing)?;
                total += loss.value;
                self.backward(&enc, &cache, &loss.gradient, &mut grads, &mut dkeys);
            }
            self.scatter_key_grads(&enc, &dkeys, &mut grads);
        }
        grads.scale(1.0 / count);
        Ok((total / count, grads))
    }
}

impl ScoreModel for ToyModel {
    fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    fn alpha(&self) -> AlphaParam {
        self.smoothing.alpha()
    }

    fn logits(&self, source: &[usize], prefix: &[usize]) -> Result<LogitVector> {
        self.forward_step(source, prefix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn tiny_model(alpha: f64, epsilon: f64, seed: u64) -> ToyModel {
        let mut vocab = Vocabulary::new();
        for t in ["a", "b", "c", "d"] {
            vocab.insert(t);
        }
        let spec = SmoothingSpec::uniform(AlphaParam::new(alpha).unwrap(), epsilon, vocab.len()).unwrap();
        let shape = ModelShape {
            embedding_dim: 4,
            hidden_dim: 5,
            context: 3,
            max_positions: 8,
        };
        ToyModel::new(vocab, shape, spec, seed).unwrap()
    }

    #[test]
    fn logits_have_vocab_length_and_are_deterministic() {
        let m = tiny_model(1.5, 0.0, 3);
        let a = m.forward_step(&[3, 4, 5], &[]).unwrap();
        let b = m.forward_step(&[3, 4, 5], &[]).unwrap();
        assert_eq!(a.len(), m.vocab().len());
        assert_eq!(a, b);
        let c = m.forward_step(&[3, 4, 5], &[4, 4, 3, 6]).unwrap();
        assert_eq!(c.len(), m.vocab().len());
    }

    #[test]
    fn unknown_tokens_rejected() {
        let m = tiny_model(1.0, 0.0, 3);
        assert!(matches!(m.forward_step(&[3, 99], &[]), Err(Error::UnknownToken(99))));
        assert!(matches!(m.forward_step(&[3], &[42]), Err(Error::UnknownToken(42))));
    }

    #[test]
    fn padding_is_ignored() {
        let m = tiny_model(1.5, 0.0, 9);
        let plain = m.forward_step(&[3, 4], &[5]).unwrap();
        let padded = m.forward_step(&[3, 4, PAD, PAD, PAD], &[5]).unwrap();
        assert_eq!(plain, padded);
    }

    #[test]
    fn same_seed_same_parameters() {
        assert_eq!(tiny_model(1.0, 0.0, 5), tiny_model(1.0, 0.0, 5));
        assert_ne!(tiny_model(1.0, 0.0, 5).params(), tiny_model(1.0, 0.0, 6).params());
    }

    #[test]
    fn forward_loss_matches_gradient_pass_loss() {
        let m = tiny_model(1.5, 0.1, 1);
        let batch = vec![
            SequencePair::from_unterminated(vec![3, 4, 5], vec![4, 5, 6]).unwrap(),
            SequencePair::from_unterminated(vec![6], vec![3]).unwrap(),
        ];
        let (loss, grads) = m.batch_loss_and_gradients(&batch).unwrap();
        assert!((loss - m.batch_loss(&batch).unwrap()).abs() < 1e-12);
        assert!(grads.all_finite());
    }

    #[test]
    fn empty_batch_is_an_error() {
        let m = tiny_model(1.0, 0.0, 1);
        assert!(matches!(m.batch_loss_and_gradients(&[]), Err(Error::EmptyDataset)));
    }
}
