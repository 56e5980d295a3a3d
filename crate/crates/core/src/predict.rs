//! Per-template quad extraction.
//!
//! A [`Generator`] turns a sentence into target text for one template; the
//! text is parsed back with the same template. [`LexiconGenerator`] is a
//! deterministic stand-in fitted on the support set, used when no model
//! service is available.

use std::collections::BTreeMap;

use crate::aggregation::TemplatePrediction;
use crate::error::ScoreError;
use crate::hash::{stable_hash, unit};
use crate::quad::{normalize, project, unproject, LabeledSentence, Polarity, SentimentQuad, Term};
use crate::scoring::{cross_entropy, tokenize, Reduction, Scorer, Token};
use crate::template::{TargetSequence, Template};

pub trait Generator: Send + Sync {
    fn generate(&self, input_text: &str, template: &Template) -> Result<String, ScoreError>;
}

impl<G: Generator + ?Sized> Generator for &G {
    fn generate(&self, input_text: &str, template: &Template) -> Result<String, ScoreError> {
        (**self).generate(input_text, template)
    }
}

impl<G: Generator + ?Sized> Generator for Box<G> {
    fn generate(&self, input_text: &str, template: &Template) -> Result<String, ScoreError> {
        (**self).generate(input_text, template)
    }
}

fn argmax<K: Ord + Clone>(counts: &BTreeMap<K, usize>) -> Option<K> {
    // Highest count, smallest key on ties.
    counts
        .iter()
        .fold(None, |best: Option<(&K, usize)>, (k, &n)| match best {
            Some((_, m)) if m >= n => best,
            _ => Some((k, n)),
        })
        .map(|(k, _)| k.clone())
}

/// Lowercased word sequence of a phrase, as produced by [`tokenize`].
fn phrase_key(text: &str) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .map(|t| t.text.to_lowercase())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Match {
    start: usize,
    end: usize,
}

fn longest_matches<V>(
    words: &[String],
    lexicon: &BTreeMap<Vec<String>, V>,
    max_len: usize,
) -> Vec<(Match, Vec<String>)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < words.len() {
        let found = (1..=max_len.min(words.len() - i))
            .rev()
            .find(|&n| lexicon.contains_key(&words[i..i + n]));
        match found {
            Some(n) => {
                out.push((
                    Match {
                        start: i,
                        end: i + n,
                    },
                    words[i..i + n].to_vec(),
                ));
                i += n;
            }
            None => i += 1,
        }
    }
    out
}

/// Dictionary extractor fitted on labeled sentences.
///
/// Aspect phrases seen in the support set are looked up in the query with
/// longest-match scanning; each is paired with the nearest known opinion
/// phrase. Opinions that were annotated with an implicit aspect fire on their
/// own. Every template sees the same candidates but drops or flips a few of
/// them according to a hash of (seed, template, sentence), which gives the
/// templates distinct, reproducible error profiles.
#[derive(Debug, Clone, Default)]
pub struct LexiconGenerator {
    aspects: BTreeMap<Vec<String>, BTreeMap<(String, Polarity), usize>>,
    opinions: BTreeMap<Vec<String>, BTreeMap<Polarity, usize>>,
    implicit: BTreeMap<Vec<String>, BTreeMap<(String, Polarity), usize>>,
    max_len: usize,
    pub seed: u64,
    pub drop_rate: f64,
    pub flip_rate: f64,
}

impl LexiconGenerator {
    pub fn fit(support: &[LabeledSentence], seed: u64) -> Self {
        let mut g = LexiconGenerator {
            seed,
            drop_rate: 0.2,
            flip_rate: 0.1,
            ..Default::default()
        };
        for s in support {
            for q in &s.quads {
                let cat = normalize(&q.aspect_category);
                if let Some(ot) = q.opinion_term.as_explicit() {
                    let key = phrase_key(ot);
                    g.max_len = g.max_len.max(key.len());
                    *g.opinions
                        .entry(key.clone())
                        .or_default()
                        .entry(q.polarity)
                        .or_default() += 1;
                    if q.aspect_term.is_implicit() {
                        *g.implicit
                            .entry(key)
                            .or_default()
                            .entry((cat.clone(), q.polarity))
                            .or_default() += 1;
                    }
                }
                if let Some(at) = q.aspect_term.as_explicit() {
                    let key = phrase_key(at);
                    g.max_len = g.max_len.max(key.len());
                    *g.aspects
                        .entry(key)
                        .or_default()
                        .entry((cat, q.polarity))
                        .or_default() += 1;
                }
            }
        }
        g.aspects.retain(|k, _| !k.is_empty());
        g.opinions.retain(|k, _| !k.is_empty());
        g.implicit.retain(|k, _| !k.is_empty());
        g
    }

    /// Noise-free extraction shared by all templates.
    pub fn extract(&self, input_text: &str) -> Vec<SentimentQuad> {
        let tokens: Vec<Token> = tokenize(input_text);
        let words: Vec<String> = tokens.iter().map(|t| t.text.to_lowercase()).collect();
        let surface =
            |m: Match| input_text[tokens[m.start].start..tokens[m.end - 1].end].to_string();

        let aspects = longest_matches(&words, &self.aspects, self.max_len);
        let opinions: Vec<(Match, Vec<String>)> =
            longest_matches(&words, &self.opinions, self.max_len)
                .into_iter()
                .filter(|(m, _)| {
                    !aspects
                        .iter()
                        .any(|(a, _)| a.start < m.end && m.start < a.end)
                })
                .collect();

        let mut used = vec![false; opinions.len()];
        let mut out = Vec::new();
        for (am, akey) in &aspects {
            let (cat, mut pol) = argmax(&self.aspects[akey]).expect("non-empty counts");
            let nearest = opinions
                .iter()
                .enumerate()
                .min_by_key(|(_, (om, _))| {
                    if om.start >= am.end {
                        om.start - am.end
                    } else {
                        am.start - om.end
                    }
                })
                .map(|(i, _)| i);
            let ot = match nearest {
                Some(i) => {
                    used[i] = true;
                    let (om, okey) = &opinions[i];
                    pol = argmax(&self.opinions[okey]).unwrap_or(pol);
                    Term::Explicit(surface(*om))
                }
                None => Term::Implicit,
            };
            out.push(SentimentQuad {
                aspect_term: Term::Explicit(surface(*am)),
                opinion_term: ot,
                aspect_category: cat,
                polarity: pol,
            });
        }
        for ((om, okey), used) in opinions.iter().zip(used) {
            if used {
                continue;
            }
            if let Some((cat, pol)) = self.implicit.get(okey).and_then(argmax) {
                out.push(SentimentQuad {
                    aspect_term: Term::Implicit,
                    opinion_term: Term::Explicit(surface(*om)),
                    aspect_category: cat,
                    polarity: pol,
                });
            }
        }
        out
    }

    fn perturb(
        &self,
        input_text: &str,
        template_id: &str,
        quads: Vec<SentimentQuad>,
    ) -> Vec<SentimentQuad> {
        quads
            .into_iter()
            .enumerate()
            .filter_map(|(i, mut q)| {
                let idx = (i as u64).to_le_bytes();
                let h = |salt: &[u8]| {
                    unit(stable_hash(
                        self.seed,
                        &[template_id.as_bytes(), input_text.as_bytes(), &idx, salt],
                    ))
                };
                if h(b"drop") < self.drop_rate {
                    return None;
                }
                if h(b"flip") < self.flip_rate {
                    let shift = if h(b"dir") < 0.5 { 1 } else { 2 };
                    let pos = Polarity::ALL
                        .iter()
                        .position(|p| *p == q.polarity)
                        .expect("known polarity");
                    q.polarity = Polarity::ALL[(pos + shift) % 3];
                }
                Some(q)
            })
            .collect()
    }
}

impl Generator for LexiconGenerator {
    fn generate(&self, input_text: &str, template: &Template) -> Result<String, ScoreError> {
        let quads = self.perturb(input_text, &template.id, self.extract(input_text));
        // Quads whose text clashes with the template's literals are left out.
        let surfaces: Vec<_> = quads
            .iter()
            .map(project)
            .filter(|s| template.render(std::slice::from_ref(s)).is_ok())
            .collect();
        if surfaces.is_empty() {
            return Ok(String::new());
        }
        Ok(template.render(&surfaces)?.text)
    }
}

/// Parses generated text, keeping well-formed quads in generation order.
/// Returns the quads and the number of clauses that could not be used.
pub fn parse_prediction(template: &Template, text: &str) -> (Vec<SentimentQuad>, usize) {
    let outcome = template.parse(text);
    let mut malformed = outcome.malformed;
    let mut quads = Vec::with_capacity(outcome.quads.len());
    for s in &outcome.quads {
        match unproject(s) {
            Ok(q) => quads.push(q),
            Err(_) => malformed += 1,
        }
    }
    (quads, malformed)
}

/// Per-token perplexity of `text` under the scorer, teacher-forced.
pub fn perplexity<S: Scorer + ?Sized>(
    scorer: &S,
    input_text: &str,
    text: &str,
    template_id: &str,
) -> Result<Option<f64>, ScoreError> {
    if tokenize(text).is_empty() {
        return Ok(None);
    }
    let target = TargetSequence {
        text: text.to_string(),
        element_spans: Vec::new(),
        separator_spans: Vec::new(),
    };
    let scored = scorer.score(input_text, &target, template_id)?;
    Ok(Some(cross_entropy(&scored, Reduction::Mean).exp()))
}

/// Runs every template on one sentence. When a scorer is given, each output
/// is also scored for rank-based aggregation.
pub fn predict_sentence<G: Generator + ?Sized>(
    generator: &G,
    scorer: Option<&dyn Scorer>,
    input_text: &str,
    templates: &[&Template],
) -> Result<Vec<TemplatePrediction>, ScoreError> {
    templates
        .iter()
        .map(|t| {
            let text = generator.generate(input_text, t)?;
            let (quads, _) = parse_prediction(t, &text);
            let perplexity = match scorer {
                Some(s) => perplexity(s, input_text, &text, &t.id)?,
                None => None,
            };
            Ok(TemplatePrediction {
                template_id: t.id.clone(),
                quads,
                perplexity,
            })
        })
        .collect()
}
