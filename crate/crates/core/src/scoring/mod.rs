//! Teacher-forced scoring of target sequences.
//!
//! A [`Scorer`] returns, for every token of a rendered target, the model's
//! next-token distribution conditioned on the input sentence and the gold
//! prefix. Distributions are sparse: the top-m entries plus an aggregate
//! OTHER bucket.

mod reference;
mod remote;
pub mod wire;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{DistributionError, ScoreError};
use crate::template::TargetSequence;

pub use reference::{tokenize, ReferenceMode, ReferenceScorer};
pub use remote::{RemoteConfig, RemoteScorer};

/// Tolerance on the total mass of a [`TokenDistribution`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;
/// Floor applied to probabilities inside logarithms.
pub const PROB_FLOOR: f64 = 1e-12;
pub const DEFAULT_TOP_M: usize = 50;

/// Sparse next-token distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenDistribution {
    support: Vec<(String, f64)>,
    other_mass: f64,
}

impl TokenDistribution {
    pub fn new(support: Vec<(String, f64)>, other_mass: f64) -> Result<Self, DistributionError> {
        Self::with_tolerance(support, other_mass, NORMALIZATION_TOLERANCE)
    }

    pub fn with_tolerance(
        support: Vec<(String, f64)>,
        other_mass: f64,
        tolerance: f64,
    ) -> Result<Self, DistributionError> {
        let mut seen = HashSet::with_capacity(support.len());
        let mut total = 0.0;
        for (key, p) in &support {
            if !p.is_finite() || *p < 0.0 {
                return Err(DistributionError::BadProbability(*p));
            }
            if !seen.insert(key.as_str()) {
                return Err(DistributionError::DuplicateKey(key.clone()));
            }
            total += p;
        }
        if !other_mass.is_finite() || other_mass < 0.0 {
            return Err(DistributionError::BadProbability(other_mass));
        }
        total += other_mass;
        if (total - 1.0).abs() > tolerance {
            return Err(DistributionError::NotNormalized(total));
        }
        Ok(TokenDistribution {
            support,
            other_mass,
        })
    }

    /// A point mass on `token`.
    pub fn point(token: impl Into<String>) -> Self {
        TokenDistribution {
            support: vec![(token.into(), 1.0)],
            other_mass: 0.0,
        }
    }

    pub fn support(&self) -> &[(String, f64)] {
        &self.support
    }

    pub fn other_mass(&self) -> f64 {
        self.other_mass
    }

    /// Probability of `token`; tokens outside the support get the OTHER mass.
    pub fn prob(&self, token: &str) -> f64 {
        self.support
            .iter()
            .find(|(k, _)| k == token)
            .map_or(self.other_mass, |(_, p)| *p)
    }

    /// Shannon entropy in nats, with OTHER treated as a single outcome.
    pub fn entropy(&self) -> f64 {
        self.support
            .iter()
            .map(|(_, p)| *p)
            .chain(std::iter::once(self.other_mass))
            .filter(|p| *p > 0.0)
            .map(|p| -p * p.ln())
            .sum()
    }
}

/// One token of a scored target, with byte offsets into the target text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredTarget {
    pub target_text: String,
    pub tokens: Vec<Token>,
    pub distributions: Vec<TokenDistribution>,
    pub template_id: String,
    pub prefix_id: Option<String>,
}

impl ScoredTarget {
    /// Checks token/distribution alignment and that token spans tile the
    /// target text in order with only whitespace between them.
    pub fn validate(&self) -> Result<(), ScoreError> {
        if self.tokens.is_empty() {
            return Err(ScoreError::ProtocolViolation("no tokens".into()));
        }
        if self.tokens.len() != self.distributions.len() {
            return Err(ScoreError::ProtocolViolation(format!(
                "{} tokens but {} distributions",
                self.tokens.len(),
                self.distributions.len()
            )));
        }
        check_spans(&self.target_text, &self.tokens)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Token spans must be ordered, non-overlapping, on char boundaries, and
/// separated only by whitespace. Zero-width spans (special tokens) are allowed.
pub fn check_spans(text: &str, tokens: &[Token]) -> Result<(), ScoreError> {
    let mut cursor = 0;
    for tok in tokens {
        if tok.start < cursor || tok.end < tok.start || tok.end > text.len() {
            return Err(ScoreError::ProtocolViolation(format!(
                "token {:?} span {}..{} out of order or out of bounds",
                tok.text, tok.start, tok.end
            )));
        }
        if !text.is_char_boundary(tok.start) || !text.is_char_boundary(tok.end) {
            return Err(ScoreError::ProtocolViolation(format!(
                "token {:?} span not on a char boundary",
                tok.text
            )));
        }
        if !text[cursor..tok.start].chars().all(char::is_whitespace) {
            return Err(ScoreError::ProtocolViolation(format!(
                "text {:?} is not covered by any token",
                &text[cursor..tok.start]
            )));
        }
        cursor = tok.end;
    }
    if !text[cursor..].chars().all(char::is_whitespace) {
        return Err(ScoreError::ProtocolViolation(format!(
            "trailing text {:?} is not covered by any token",
            &text[cursor..]
        )));
    }
    Ok(())
}

/// Teacher-forced scorer. Implementations must be safe to call concurrently.
pub trait Scorer: Send + Sync {
    fn score(
        &self,
        input_text: &str,
        target: &TargetSequence,
        template_id: &str,
    ) -> Result<ScoredTarget, ScoreError>;
}

impl<S: Scorer + ?Sized> Scorer for &S {
    fn score(
        &self,
        input_text: &str,
        target: &TargetSequence,
        template_id: &str,
    ) -> Result<ScoredTarget, ScoreError> {
        (**self).score(input_text, target, template_id)
    }
}

impl<S: Scorer + ?Sized> Scorer for Box<S> {
    fn score(
        &self,
        input_text: &str,
        target: &TargetSequence,
        template_id: &str,
    ) -> Result<ScoredTarget, ScoreError> {
        (**self).score(input_text, target, template_id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    #[default]
    Sum,
    Mean,
}

/// Negative log-likelihood of the realized tokens, in nats.
pub fn cross_entropy(st: &ScoredTarget, reduction: Reduction) -> f64 {
    let total: f64 = st
        .tokens
        .iter()
        .zip(&st.distributions)
        .map(|(tok, dist)| -dist.prob(&tok.text).max(PROB_FLOOR).ln())
        .sum();
    match reduction {
        Reduction::Sum => total,
        Reduction::Mean if st.tokens.is_empty() => 0.0,
        Reduction::Mean => total / st.tokens.len() as f64,
    }
}
