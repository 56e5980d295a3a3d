//! Deterministic stand-in for a pretrained language model.
//!
//! In trigram mode the logit of a candidate token is its mean per-character
//! log-probability under a smoothed character-trigram model fitted to the
//! input sentence plus the teacher-forced target prefix. Smoothing
//! pseudo-counts are perturbed by a seeded hash, and each template adds its
//! own hashed bias per candidate. Echo mode mixes a point mass on the
//! realized token with uniform noise, so its distributions depend only on
//! the realized tokens.

use std::collections::{BTreeSet, HashMap};

use super::{ScoredTarget, Scorer, Token, TokenDistribution, DEFAULT_TOP_M};
use crate::error::ScoreError;
use crate::hash::{stable_hash, unit};
use crate::template::{list_templates, Element, TargetSequence, SSEP};

const MARKERS: [&str; 5] = ["[AT]", "[OT]", "[AC]", "[SP]", SSEP];
const SMOOTHING: f64 = 0.5;
const ALPHABET: f64 = 64.0;

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '\'') || !c.is_ascii()
}

/// Whitespace tokenization with punctuation split off. Element markers and
/// the clause separator are kept whole. Offsets are byte offsets.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < text.len() {
        let rest = &text[pos..];
        let c = rest.chars().next().expect("non-empty rest");
        if c.is_whitespace() {
            pos += c.len_utf8();
            continue;
        }
        let len = if let Some(m) = MARKERS.iter().find(|m| rest.starts_with(*m)) {
            m.len()
        } else if is_word_char(c) {
            rest.char_indices()
                .find(|(_, ch)| !is_word_char(*ch))
                .map_or(rest.len(), |(i, _)| i)
        } else {
            c.len_utf8()
        };
        tokens.push(Token {
            text: rest[..len].to_string(),
            start: pos,
            end: pos + len,
        });
        pos += len;
    }
    tokens
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceMode {
    /// Seeded character-trigram model with a per-template bias of the given weight.
    Trigram { bias_weight: f64, temperature: f64 },
    /// Point mass on the realized token mixed with uniform noise of the given weight.
    Echo { noise: f64 },
}

impl Default for ReferenceMode {
    fn default() -> Self {
        ReferenceMode::Trigram {
            bias_weight: 0.5,
            temperature: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReferenceScorer {
    pub seed: u64,
    pub top_m: usize,
    pub mode: ReferenceMode,
}

impl ReferenceScorer {
    pub fn new(seed: u64) -> Self {
        ReferenceScorer {
            seed,
            top_m: DEFAULT_TOP_M,
            mode: ReferenceMode::default(),
        }
    }

    pub fn echo(noise: f64) -> Self {
        ReferenceScorer {
            seed: 0,
            top_m: DEFAULT_TOP_M,
            mode: ReferenceMode::Echo { noise },
        }
    }

    pub fn with_top_m(mut self, top_m: usize) -> Self {
        self.top_m = top_m.max(1);
        self
    }

    /// Candidate vocabulary for one instance. It is the same for every
    /// template: element tokens are shared and all linking tokens are reserved.
    fn candidates(input_text: &str, target_tokens: &[Token]) -> Vec<String> {
        let mut set: BTreeSet<String> = BTreeSet::new();
        set.extend(tokenize(input_text).into_iter().map(|t| t.text));
        set.extend(target_tokens.iter().map(|t| t.text.clone()));
        for t in list_templates() {
            for lit in &t.linking_literals {
                set.extend(tokenize(lit).into_iter().map(|t| t.text));
            }
        }
        set.extend(Element::ALL.iter().map(|e| e.marker().to_string()));
        set.insert(SSEP.to_string());
        for w in ["great", "ok", "bad", "it"] {
            set.insert(w.to_string());
        }
        set.into_iter().collect()
    }

    fn sparsify(&self, mut probs: Vec<(String, f64)>) -> TokenDistribution {
        probs.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let m = self.top_m.min(probs.len());
        let rest = probs.split_off(m);
        let other_mass: f64 = rest.iter().map(|(_, p)| p).sum();
        TokenDistribution::new(probs, other_mass).expect("softmax output is normalized")
    }

    fn echo_distribution(
        &self,
        candidates: &[String],
        realized: &str,
        noise: f64,
    ) -> TokenDistribution {
        let uniform = noise / candidates.len() as f64;
        let probs = candidates
            .iter()
            .map(|c| {
                let p = if c == realized {
                    1.0 - noise + uniform
                } else {
                    uniform
                };
                (c.clone(), p)
            })
            .collect();
        self.sparsify(probs)
    }
}

struct TrigramModel {
    seed: u64,
    tri: HashMap<[char; 3], u32>,
    bi: HashMap<[char; 2], u32>,
    history: [char; 2],
}

impl TrigramModel {
    fn new(seed: u64, input_text: &str) -> Self {
        let mut model = TrigramModel {
            seed,
            tri: HashMap::new(),
            bi: HashMap::new(),
            history: ['^', '^'],
        };
        model.feed(input_text);
        model.history = ['^', '^'];
        model
    }

    fn feed(&mut self, text: &str) {
        for c in text.chars().flat_map(char::to_lowercase) {
            let [a, b] = self.history;
            *self.tri.entry([a, b, c]).or_default() += 1;
            *self.bi.entry([a, b]).or_default() += 1;
            self.history = [b, c];
        }
    }

    fn log_prob(&self, a: char, b: char, c: char) -> f64 {
        let mut buf = [0u8; 12];
        let mut n = 0;
        for ch in [a, b, c] {
            n += ch.encode_utf8(&mut buf[n..]).len();
        }
        let noise = unit(stable_hash(self.seed, &[&buf[..n]]));
        let tri = *self.tri.get(&[a, b, c]).unwrap_or(&0) as f64;
        let bi = *self.bi.get(&[a, b]).unwrap_or(&0) as f64;
        ((tri + SMOOTHING * (0.5 + noise)) / (bi + SMOOTHING * ALPHABET)).ln()
    }

    /// Mean per-character log-probability of `word` following the current history.
    fn score_word(&self, word: &str) -> f64 {
        let [mut a, mut b] = self.history;
        let mut total = 0.0;
        let mut count = 0usize;
        for c in word.chars().flat_map(char::to_lowercase) {
            total += self.log_prob(a, b, c);
            a = b;
            b = c;
            count += 1;
        }
        if count == 0 {
            0.0
        } else {
            total / count as f64
        }
    }
}

impl Scorer for ReferenceScorer {
    fn score(
        &self,
        input_text: &str,
        target: &TargetSequence,
        template_id: &str,
    ) -> Result<ScoredTarget, ScoreError> {
        let tokens = tokenize(&target.text);
        if tokens.is_empty() {
            return Err(ScoreError::ProtocolViolation("empty target".into()));
        }
        let candidates = Self::candidates(input_text, &tokens);

        let distributions = match self.mode {
            ReferenceMode::Echo { noise } => tokens
                .iter()
                .map(|t| self.echo_distribution(&candidates, &t.text, noise))
                .collect(),
            ReferenceMode::Trigram {
                bias_weight,
                temperature,
            } => {
                let biases: Vec<f64> = candidates
                    .iter()
                    .map(|c| {
                        let h = stable_hash(self.seed, &[template_id.as_bytes(), c.as_bytes()]);
                        bias_weight * (2.0 * unit(h) - 1.0)
                    })
                    .collect();
                let mut model = TrigramModel::new(self.seed, input_text);
                let mut fed = 0;
                let mut out = Vec::with_capacity(tokens.len());
                for tok in &tokens {
                    model.feed(&target.text[fed..tok.start]);
                    fed = tok.start;
                    let logits: Vec<f64> = candidates
                        .iter()
                        .zip(&biases)
                        .map(|(c, b)| (model.score_word(c) + b) / temperature)
                        .collect();
                    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
                    let z: f64 = exps.iter().sum();
                    let probs = candidates
                        .iter()
                        .zip(exps)
                        .map(|(c, e)| (c.clone(), e / z))
                        .collect();
                    out.push(self.sparsify(probs));
                }
                out
            }
        };

        Ok(ScoredTarget {
            target_text: target.text.clone(),
            tokens,
            distributions,
            template_id: template_id.to_string(),
            prefix_id: None,
        })
    }
}
