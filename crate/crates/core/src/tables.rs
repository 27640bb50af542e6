//! Hand-built next-token tables, for tests and oracle checks of the search and
//! analysis code.

use std::collections::HashMap;

use crate::entmax::{AlphaParam, LogitVector};
use crate::error::{Error, Result};
use crate::model::ScoreModel;

/// Logits looked up by `(source, prefix)`, then by `prefix` alone, then a default.
#[derive(Debug, Clone, PartialEq)]
pub struct TableModel {
    vocab_size: usize,
    alpha: AlphaParam,
    by_source: HashMap<(Vec<usize>, Vec<usize>), Vec<f64>>,
    by_prefix: HashMap<Vec<usize>, Vec<f64>>,
    default: Vec<f64>,
}

impl TableModel {
    /// All-zero logits everywhere.
    pub fn uniform(vocab_size: usize, alpha: f64) -> Self {
        Self {
            vocab_size,
            alpha: AlphaParam::new(alpha).expect("alpha >= 1"),
            by_source: HashMap::new(),
            by_prefix: HashMap::new(),
            default: vec![0.0; vocab_size],
        }
    }

    pub fn set_default(&mut self, logits: Vec<f64>) -> &mut Self {
        assert_eq!(logits.len(), self.vocab_size);
        self.default = logits;
        self
    }

    pub fn set(&mut self, prefix: &[usize], logits: Vec<f64>) -> &mut Self {
        assert_eq!(logits.len(), self.vocab_size);
        self.by_prefix.insert(prefix.to_vec(), logits);
        self
    }

    pub fn set_for_source(&mut self, source: &[usize], prefix: &[usize], logits: Vec<f64>) -> &mut Self {
        assert_eq!(logits.len(), self.vocab_size);
        self.by_source.insert((source.to_vec(), prefix.to_vec()), logits);
        self
    }
}

impl ScoreModel for TableModel {
    fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    fn alpha(&self) -> AlphaParam {
        self.alpha
    }

    fn logits(&self, source: &[usize], prefix: &[usize]) -> Result<LogitVector> {
        if let Some(&t) = prefix.iter().find(|&&t| t >= self.vocab_size) {
            return Err(Error::UnknownToken(t));
        }
        let row = self
            .by_source
            .get(&(source.to_vec(), prefix.to_vec()))
            .or_else(|| self.by_prefix.get(prefix))
            .unwrap_or(&self.default);
        LogitVector::new(row.clone())
    }
}
