//! Combining per-template predictions into one quad set.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::VoteError;
use crate::hash::{stable_hash, unit};
use crate::quad::{QuadKey, SentimentQuad};

/// Majority threshold for k templates: ceil(k / 2).
pub fn default_tau(k: usize) -> usize {
    k.div_ceil(2).max(1)
}

/// Per-quad vote counts over k template predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct VoteTally {
    pub k: usize,
    /// Count per normalized quad, with the smallest surface variant seen.
    pub counts: BTreeMap<QuadKey, (usize, SentimentQuad)>,
}

impl VoteTally {
    /// Counts each quad once per template, however often that template repeats it.
    pub fn new<'a, I>(predictions: I) -> Self
    where
        I: IntoIterator<Item = &'a [SentimentQuad]>,
    {
        let mut counts: BTreeMap<QuadKey, (usize, SentimentQuad)> = BTreeMap::new();
        let mut k = 0;
        for quads in predictions {
            k += 1;
            let mut seen = BTreeSet::new();
            for q in quads {
                let key = q.key();
                if !seen.insert(key.clone()) {
                    // Same template already voted; still track the smallest variant.
                    if let Some(entry) = counts.get_mut(&key) {
                        if *q < entry.1 {
                            entry.1 = q.clone();
                        }
                    }
                    continue;
                }
                counts
                    .entry(key)
                    .and_modify(|(n, rep)| {
                        *n += 1;
                        if *q < *rep {
                            *rep = q.clone();
                        }
                    })
                    .or_insert_with(|| (1, q.clone()));
            }
        }
        VoteTally { k, counts }
    }

    pub fn count(&self, q: &SentimentQuad) -> usize {
        self.counts.get(&q.key()).map_or(0, |(n, _)| *n)
    }

    /// Quads with at least `tau` votes, ordered by normalized key.
    pub fn winners(&self, tau: usize) -> Result<Vec<SentimentQuad>, VoteError> {
        if tau < 1 || tau > self.k {
            return Err(VoteError::InvalidTau {
                tau,
                templates: self.k,
            });
        }
        Ok(self
            .counts
            .values()
            .filter(|(n, _)| *n >= tau)
            .map(|(_, q)| q.clone())
            .collect())
    }
}

/// Quads predicted by at least `tau` of the templates.
pub fn vote(
    predictions: &[(String, Vec<SentimentQuad>)],
    tau: usize,
) -> Result<Vec<SentimentQuad>, VoteError> {
    VoteTally::new(predictions.iter().map(|(_, q)| q.as_slice())).winners(tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AggregationStrategy {
    #[default]
    Vote,
    /// Output of the template whose generated sequence has the lowest perplexity.
    Rank,
    /// Output of one template chosen at random per sentence.
    Rand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplatePrediction {
    pub template_id: String,
    pub quads: Vec<SentimentQuad>,
    /// Per-token perplexity of the generated text, when it was scored.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perplexity: Option<f64>,
}

/// Applies an aggregation strategy to one sentence's template predictions.
/// `key` seeds the random pick and should identify the sentence.
pub fn aggregate(
    predictions: &[TemplatePrediction],
    strategy: AggregationStrategy,
    tau: usize,
    seed: u64,
    key: &str,
) -> Result<Vec<SentimentQuad>, VoteError> {
    let single = |p: &TemplatePrediction| {
        VoteTally::new(std::iter::once(p.quads.as_slice()))
            .winners(1)
            .expect("tau 1 of 1 is valid")
    };
    match strategy {
        AggregationStrategy::Vote => {
            VoteTally::new(predictions.iter().map(|p| p.quads.as_slice())).winners(tau)
        }
        AggregationStrategy::Rank => Ok(predictions
            .iter()
            .min_by(|a, b| {
                let pa = a.perplexity.unwrap_or(f64::INFINITY);
                let pb = b.perplexity.unwrap_or(f64::INFINITY);
                pa.total_cmp(&pb)
                    .then_with(|| a.template_id.cmp(&b.template_id))
            })
            .map(single)
            .unwrap_or_default()),
        AggregationStrategy::Rand => {
            if predictions.is_empty() {
                return Ok(Vec::new());
            }
            let mut ids: Vec<&TemplatePrediction> = predictions.iter().collect();
            ids.sort_by(|a, b| a.template_id.cmp(&b.template_id));
            let u = unit(stable_hash(seed, &[key.as_bytes()]));
            let pick = ((u * ids.len() as f64) as usize).min(ids.len() - 1);
            Ok(single(ids[pick]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{Polarity, Term};

    fn q(at: &str, sp: Polarity) -> SentimentQuad {
        SentimentQuad::new(Term::Explicit(at.into()), Term::Implicit, "food", sp).unwrap()
    }

    fn preds(sets: &[&[SentimentQuad]]) -> Vec<(String, Vec<SentimentQuad>)> {
        sets.iter()
            .enumerate()
            .map(|(i, s)| (format!("t{i}"), s.to_vec()))
            .collect()
    }

    #[test]
    fn majority_of_three() {
        let (q1, q2, q3) = (
            q("a", Polarity::Positive),
            q("b", Polarity::Positive),
            q("c", Polarity::Negative),
        );
        let p = preds(&[
            &[q1.clone(), q2],
            std::slice::from_ref(&q1),
            &[q1.clone(), q3],
        ]);
        assert_eq!(vote(&p, 2).unwrap(), vec![q1.clone()]);
        assert_eq!(vote(&p, 1).unwrap().len(), 3);
        assert_eq!(vote(&p, 3).unwrap(), vec![q1]);
    }

    #[test]
    fn duplicates_within_a_template_count_once() {
        let a = q("a", Polarity::Positive);
        let upper = q("A", Polarity::Positive);
        let p = preds(&[&[a.clone(), upper.clone(), a.clone()], &[]]);
        assert!(vote(&p, 2).unwrap().is_empty());
        let tally = VoteTally::new(p.iter().map(|(_, q)| q.as_slice()));
        assert_eq!(tally.count(&a), 1);
    }

    #[test]
    fn representative_is_order_independent() {
        let a = q("Spa", Polarity::Positive);
        let b = q("spa", Polarity::Positive);
        let x = vote(
            &preds(&[std::slice::from_ref(&a), std::slice::from_ref(&b)]),
            2,
        )
        .unwrap();
        let y = vote(&preds(&[&[b], &[a]]), 2).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn invalid_tau() {
        let p = preds(&[&[], &[]]);
        assert_eq!(
            vote(&p, 0),
            Err(VoteError::InvalidTau {
                tau: 0,
                templates: 2
            })
        );
        assert!(vote(&p, 3).is_err());
        assert!(vote(&[], 1).is_err());
    }

    #[test]
    fn default_tau_values() {
        assert_eq!(default_tau(3), 2);
        assert_eq!(default_tau(1), 1);
        assert_eq!(default_tau(10), 5);
        assert_eq!(default_tau(15), 8);
    }

    #[test]
    fn rank_and_rand() {
        let mk = |id: &str, at: &str, ppl: Option<f64>| TemplatePrediction {
            template_id: id.into(),
            quads: vec![q(at, Polarity::Positive)],
            perplexity: ppl,
        };
        let p = vec![
            mk("x", "a", Some(3.0)),
            mk("y", "b", Some(1.5)),
            mk("z", "c", None),
        ];
        let best = aggregate(&p, AggregationStrategy::Rank, 1, 0, "s1").unwrap();
        assert_eq!(best, vec![q("b", Polarity::Positive)]);
        let r = aggregate(&p, AggregationStrategy::Rand, 1, 3, "s1").unwrap();
        assert_eq!(
            r,
            aggregate(&p, AggregationStrategy::Rand, 1, 3, "s1").unwrap()
        );
        assert_eq!(r.len(), 1);
        assert!(aggregate(&[], AggregationStrategy::Rand, 1, 3, "s1")
            .unwrap()
            .is_empty());
    }
}
