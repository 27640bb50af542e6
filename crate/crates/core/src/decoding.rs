//! Beam search, exact best-first search over the nonzero-probability tree, and
//! the empty-string audit.
//!
//! Neither search ever extends a prefix with a zero-probability token, so a
//! sparse model's pruned hypotheses are unreachable at any beam width.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::model::{ScoreModel, SequencePair, EOS};

pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

/// `2 × source length + 8`.
pub fn default_max_len(source_len: usize) -> usize {
    2 * source_len + 8
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub tokens: Vec<usize>,
    /// Natural log; never positive.
    pub log_prob: f64,
    pub complete: bool,
}

impl Hypothesis {
    fn root() -> Self {
        Self {
            tokens: Vec::new(),
            log_prob: 0.0,
            complete: false,
        }
    }

    fn extend(&self, token: usize, prob: f64) -> Self {
        let mut tokens = Vec::with_capacity(self.tokens.len() + 1);
        tokens.extend_from_slice(&self.tokens);
        tokens.push(token);
        Self {
            tokens,
            log_prob: self.log_prob + prob.ln(),
            complete: token == EOS,
        }
    }

    /// Tokens without the trailing EOS.
    pub fn body(&self) -> &[usize] {
        match self.tokens.last() {
            Some(&EOS) => &self.tokens[..self.tokens.len() - 1],
            _ => &self.tokens,
        }
    }
}

/// Higher log-probability first; equal scores fall back to lexicographic order.
fn rank(a: &Hypothesis, b: &Hypothesis) -> Ordering {
    b.log_prob.total_cmp(&a.log_prob).then_with(|| a.tokens.cmp(&b.tokens))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// Complete hypotheses, best first.
    pub hypotheses: Vec<Hypothesis>,
    /// Probability mass of the returned hypotheses (exact search only).
    pub covered_mass: Option<f64>,
    /// Mass of prefixes still open when exact search stopped.
    pub open_mass: Option<f64>,
    pub truncated: bool,
    pub expansions: usize,
}

impl SearchResult {
    pub fn best(&self) -> Option<&Hypothesis> {
        self.hypotheses.first()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamOptions {
    pub beam_width: usize,
    pub max_len: usize,
    /// Rank finished hypotheses by log-probability per token. Off by default.
    pub length_normalize: bool,
}

impl BeamOptions {
    pub fn new(beam_width: usize, max_len: usize) -> Self {
        Self {
            beam_width,
            max_len,
            length_normalize: false,
        }
    }
}

/// Length-unnormalized beam search.
pub fn beam_search<M: ScoreModel + ?Sized>(
    model: &M,
    source: &[usize],
    beam_width: usize,
    max_len: usize,
) -> Result<SearchResult> {
    beam_search_with(model, source, BeamOptions::new(beam_width, max_len))
}

pub fn beam_search_with<M: ScoreModel + ?Sized>(
    model: &M,
    source: &[usize],
    options: BeamOptions,
) -> Result<SearchResult> {
    if options.beam_width == 0 || options.max_len == 0 {
        return Err(Error::InvalidArgument("beam width and max length must be >= 1".into()));
    }
    let mut live = vec![Hypothesis::root()];
    let mut finished: Vec<Hypothesis> = Vec::new();
    let mut last_candidates: Vec<Hypothesis> = Vec::new();
    let mut expansions = 0;

    for _ in 0..options.max_len {
        if live.is_empty() {
            break;
        }
        let mut candidates = Vec::new();
        for hyp in &live {
            let dist = model.distribution(source, &hyp.tokens)?;
            expansions += 1;
            for &t in dist.support() {
                candidates.push(hyp.extend(t, dist.get(t)));
            }
        }
        candidates.sort_by(rank);
        candidates.truncate(options.beam_width);
        live.clear();
        for c in &candidates {
            if c.complete {
                finished.push(c.clone());
            } else {
                live.push(c.clone());
            }
        }
        last_candidates = candidates;
    }

    if finished.is_empty() {
        let best_open = last_candidates.into_iter().next().unwrap_or_else(Hypothesis::root);
        return Err(Error::NoCompleteHypothesis {
            max_len: options.max_len,
            best_open,
        });
    }
    if options.length_normalize {
        let per_token = |h: &Hypothesis| h.log_prob / h.tokens.len() as f64;
        finished.sort_by(|a, b| per_token(b).total_cmp(&per_token(a)).then_with(|| a.tokens.cmp(&b.tokens)));
    } else {
        finished.sort_by(rank);
    }
    Ok(SearchResult {
        hypotheses: finished,
        covered_mass: None,
        open_mass: None,
        truncated: !live.is_empty(),
        expansions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    pub max_len: usize,
    /// Stop once the collected mass reaches `1 − mass_floor`.
    pub mass_floor: f64,
    pub node_budget: usize,
}

impl ExactOptions {
    pub fn new(max_len: usize, mass_floor: f64) -> Self {
        Self {
            max_len,
            mass_floor,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

struct Frontier(Hypothesis);

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    // Max-heap: the best-ranked hypothesis is the greatest.
    fn cmp(&self, other: &Self) -> Ordering {
        rank(&other.0, &self.0)
    }
}

/// Best-first enumeration of complete hypotheses in descending probability.
pub fn exact_search<M: ScoreModel + ?Sized>(
    model: &M,
    source: &[usize],
    max_len: usize,
    mass_floor: f64,
) -> Result<SearchResult> {
    exact_search_with(model, source, ExactOptions::new(max_len, mass_floor))
}

pub fn exact_search_with<M: ScoreModel + ?Sized>(
    model: &M,
    source: &[usize],
    options: ExactOptions,
) -> Result<SearchResult> {
    if options.max_len == 0 || !(0.0..1.0).contains(&options.mass_floor) {
        return Err(Error::InvalidArgument(
            "exact search needs max_len >= 1 and 0 <= mass_floor < 1".into(),
        ));
    }
    let mut heap = BinaryHeap::new();
    heap.push(Frontier(Hypothesis::root()));
    let mut found = Vec::new();
    let mut covered = 0.0;
    let mut cut_mass = 0.0;
    let mut expansions = 0;
    let mut budget_hit = false;
    let mut best_cut: Option<Hypothesis> = None;

    while let Some(Frontier(hyp)) = heap.pop() {
        if hyp.complete {
            covered += hyp.log_prob.exp();
            found.push(hyp);
            if covered >= 1.0 - options.mass_floor {
                break;
            }
            continue;
        }
        if hyp.tokens.len() >= options.max_len {
            cut_mass += hyp.log_prob.exp();
            if best_cut.is_none() {
                best_cut = Some(hyp);
            }
            continue;
        }
        if expansions >= options.node_budget {
            budget_hit = true;
            heap.push(Frontier(hyp));
            break;
        }
        expansions += 1;
        let dist = model.distribution(source, &hyp.tokens)?;
        for &t in dist.support() {
            heap.push(Frontier(hyp.extend(t, dist.get(t))));
        }
    }

    let open_mass: f64 = heap.iter().map(|f| f.0.log_prob.exp()).sum::<f64>() + cut_mass;
    if found.is_empty() {
        if budget_hit {
            return Err(Error::BudgetExceeded(options.node_budget));
        }
        return Err(Error::NoCompleteHypothesis {
            max_len: options.max_len,
            best_open: best_cut.unwrap_or_else(Hypothesis::root),
        });
    }
    Ok(SearchResult {
        hypotheses: found,
        covered_mass: Some(covered.min(1.0)),
        open_mass: Some(open_mass),
        truncated: budget_hit || cut_mass > 0.0,
        expansions,
    })
}

/// `log p(EOS | x, BOS)`; `-inf` when that probability is exactly zero.
pub fn empty_string_log_prob<M: ScoreModel + ?Sized>(model: &M, source: &[usize]) -> Result<f64> {
    let p = model.distribution(source, &[])?.get(EOS);
    Ok(if p == 0.0 { f64::NEG_INFINITY } else { p.ln() })
}

/// Score of the beam result for `source`; a truncated search contributes its best
/// open prefix.
pub fn beam_score<M: ScoreModel + ?Sized>(model: &M, source: &[usize], beam_width: usize) -> Result<Hypothesis> {
    beam_score_with(model, source, beam_width, None)
}

/// As [`beam_score`]; `max_len` of `None` means [`default_max_len`].
pub fn beam_score_with<M: ScoreModel + ?Sized>(
    model: &M,
    source: &[usize],
    beam_width: usize,
    max_len: Option<usize>,
) -> Result<Hypothesis> {
    let max_len = max_len.unwrap_or_else(|| default_max_len(source.len()));
    match beam_search(model, source, beam_width, max_len) {
        Ok(r) => Ok(r.hypotheses.into_iter().next().expect("nonempty on success")),
        Err(Error::NoCompleteHypothesis { best_open, .. }) => Ok(best_open),
        Err(e) => Err(e),
    }
}

/// Beam-decodes every source; returns hypothesis bodies (EOS stripped).
pub fn decode_dataset<M: ScoreModel + ?Sized>(
    model: &M,
    dataset: &[SequencePair],
    beam_width: usize,
) -> Result<Vec<Vec<usize>>> {
    decode_dataset_with(model, dataset, beam_width, None)
}

pub fn decode_dataset_with<M: ScoreModel + ?Sized>(
    model: &M,
    dataset: &[SequencePair],
    beam_width: usize,
    max_len: Option<usize>,
) -> Result<Vec<Vec<usize>>> {
    dataset
        .iter()
        .map(|pair| Ok(beam_score_with(model, pair.source(), beam_width, max_len)?.body().to_vec()))
        .collect()
}

/// Percentage of examples whose empty string outscores the beam hypothesis.
pub fn cat_got_tongue_rate<M: ScoreModel + ?Sized>(
    model: &M,
    dataset: &[SequencePair],
    beam_width: usize,
) -> Result<f64> {
    cat_got_tongue_rate_with(model, dataset, beam_width, None)
}

pub fn cat_got_tongue_rate_with<M: ScoreModel + ?Sized>(
    model: &M,
    dataset: &[SequencePair],
    beam_width: usize,
    max_len: Option<usize>,
) -> Result<f64> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut offenders = 0usize;
    for pair in dataset {
        let empty = empty_string_log_prob(model, pair.source())?;
        let beam = beam_score_with(model, pair.source(), beam_width, max_len)?;
        if empty > beam.log_prob {
            offenders += 1;
        }
    }
    Ok(100.0 * offenders as f64 / dataset.len() as f64)
}
