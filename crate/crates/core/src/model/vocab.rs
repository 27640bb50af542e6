use std::collections::HashMap;

use crate::error::{Error, Result};

pub const PAD: usize = 0;
pub const BOS: usize = 1;
pub const EOS: usize = 2;

pub const PAD_TOKEN: &str = "<pad>";
pub const BOS_TOKEN: &str = "<s>";
pub const EOS_TOKEN: &str = "</s>";

/// Token inventory. Indices 0, 1, 2 are PAD, BOS and EOS; the rest follow in
/// insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Self::new()
    }
}

impl Vocabulary {
    pub fn new() -> Self {
        let mut vocab = Self {
            tokens: Vec::new(),
            index: HashMap::new(),
        };
        for t in [PAD_TOKEN, BOS_TOKEN, EOS_TOKEN] {
            vocab.insert(t);
        }
        vocab
    }

    /// Rebuilds a vocabulary from its full token list (reserved tokens included).
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        if tokens.len() < 3
            || tokens[PAD] != PAD_TOKEN
            || tokens[BOS] != BOS_TOKEN
            || tokens[EOS] != EOS_TOKEN
        {
            return Err(Error::InvalidArgument(
                "vocabulary must start with the reserved tokens".into(),
            ));
        }
        let mut vocab = Self {
            tokens: Vec::with_capacity(tokens.len()),
            index: HashMap::with_capacity(tokens.len()),
        };
        for t in tokens {
            if vocab.index.contains_key(&t) {
                return Err(Error::InvalidArgument(format!("duplicate token {t:?}")));
            }
            vocab.insert(&t);
        }
        Ok(vocab)
    }

    /// Returns the index of `token`, adding it if unseen.
    pub fn insert(&mut self, token: &str) -> usize {
        if let Some(&i) = self.index.get(token) {
            return i;
        }
        let i = self.tokens.len();
        self.tokens.push(token.to_owned());
        self.index.insert(token.to_owned(), i);
        i
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: usize) -> Option<&str> {
        self.tokens.get(index).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Renders indices as a space-separated string, dropping EOS.
    pub fn render(&self, indices: &[usize]) -> String {
        indices
            .iter()
            .filter(|&&i| i != EOS)
            .map(|&i| self.token(i).unwrap_or("<unk>"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A source sequence and its EOS-terminated target.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SequencePair {
    source: Vec<usize>,
    target: Vec<usize>,
}

impl SequencePair {
    pub fn new(source: Vec<usize>, target: Vec<usize>) -> Result<Self> {
        if source.is_empty() {
            return Err(Error::InvalidSequence("source is empty".into()));
        }
        if target.last() != Some(&EOS) {
            return Err(Error::InvalidSequence("target must end with EOS".into()));
        }
        if target.contains(&PAD) {
            return Err(Error::InvalidSequence("target contains PAD".into()));
        }
        Ok(Self { source, target })
    }

    /// Appends EOS to `target` before validating.
    pub fn from_unterminated(source: Vec<usize>, mut target: Vec<usize>) -> Result<Self> {
        target.push(EOS);
        Self::new(source, target)
    }

    pub fn source(&self) -> &[usize] {
        &self.source
    }

    pub fn target(&self) -> &[usize] {
        &self.target
    }

    /// Target without the trailing EOS.
    pub fn target_body(&self) -> &[usize] {
        &self.target[..self.target.len() - 1]
    }
}
