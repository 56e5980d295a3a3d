//! Correlation-guided template selection.
//!
//! For each support instance, every template's target is scored under
//! teacher forcing and reduced to the distributions at quad-element tokens.
//! Two templates are compared by the mean Jensen-Shannon divergence over
//! element tokens aligned by (quad, role, position within element); the
//! support-set mean of that value fills a symmetric T x T matrix. The k
//! templates taken from the lowest-divergence pairs are selected.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{SelectionError, TemplateError};
use crate::quad::{project, LabeledSentence, SurfaceQuad};
use crate::scoring::{ScoredTarget, Scorer, TokenDistribution};
use crate::template::{Element, TargetSequence, Template};

/// One kept token position.
#[derive(Debug, Clone, PartialEq)]
pub struct Slot {
    pub quad: usize,
    pub role: Element,
    /// Position of the token within its element.
    pub index: usize,
    /// Position of the token within the scored target.
    pub token_index: usize,
    pub token: String,
    pub distribution: TokenDistribution,
}

/// Distributions at element tokens only; linking literals and separators are gone.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FilteredRepresentation {
    pub slots: Vec<Slot>,
}

impl FilteredRepresentation {
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    fn by_element(&self) -> BTreeMap<(usize, Element), Vec<&TokenDistribution>> {
        let mut map: BTreeMap<(usize, Element), Vec<&TokenDistribution>> = BTreeMap::new();
        for slot in &self.slots {
            map.entry((slot.quad, slot.role))
                .or_default()
                .push(&slot.distribution);
        }
        map
    }

    /// Mean entropy of the kept distributions, 0 when nothing is kept.
    pub fn mean_entropy(&self) -> f64 {
        if self.slots.is_empty() {
            return 0.0;
        }
        self.slots
            .iter()
            .map(|s| s.distribution.entropy())
            .sum::<f64>()
            / self.slots.len() as f64
    }
}

/// Keeps the distributions of tokens whose span overlaps an element span.
pub fn filter(
    st: &ScoredTarget,
    target: &TargetSequence,
) -> Result<FilteredRepresentation, SelectionError> {
    if st.target_text != target.text {
        return Err(SelectionError::SpanMismatch {
            scored: st.target_text.clone(),
            target: target.text.clone(),
        });
    }
    let mut counters: HashMap<(usize, Element), usize> = HashMap::new();
    let mut slots = Vec::new();
    for (i, (tok, dist)) in st.tokens.iter().zip(&st.distributions).enumerate() {
        let hit = target
            .element_spans
            .iter()
            .find(|span| tok.start < span.end && span.start < tok.end);
        if let Some(span) = hit {
            let counter = counters.entry((span.quad, span.role)).or_insert(0);
            slots.push(Slot {
                quad: span.quad,
                role: span.role,
                index: *counter,
                token_index: i,
                token: tok.text.clone(),
                distribution: dist.clone(),
            });
            *counter += 1;
        }
    }
    Ok(FilteredRepresentation { slots })
}

fn xlogx_ratio(x: f64, m: f64) -> f64 {
    if x > 0.0 {
        x * (x / m).ln()
    } else {
        0.0
    }
}

/// Jensen-Shannon divergence in nats over the union of both supports plus
/// one shared OTHER outcome. Keys missing from a support have probability 0.
pub fn js_divergence(p: &TokenDistribution, q: &TokenDistribution) -> f64 {
    let mut merged: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    for (k, v) in p.support() {
        merged.entry(k.as_str()).or_default().0 = *v;
    }
    for (k, v) in q.support() {
        merged.entry(k.as_str()).or_default().1 = *v;
    }
    let term = |a: f64, b: f64| {
        let m = 0.5 * (a + b);
        0.5 * (xlogx_ratio(a, m) + xlogx_ratio(b, m))
    };
    let mut total = term(p.other_mass(), q.other_mass());
    for (a, b) in merged.values() {
        total += term(*a, *b);
    }
    total.clamp(0.0, std::f64::consts::LN_2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDivergence {
    pub mean: f64,
    /// Number of aligned slot pairs averaged over.
    pub pairs: usize,
}

/// Mean JS divergence over slots aligned by (quad, role, index within
/// element); each element is truncated to the shorter token count. Returns a
/// mean of 0 over 0 pairs when nothing aligns.
pub fn pair_divergence(hi: &FilteredRepresentation, hj: &FilteredRepresentation) -> PairDivergence {
    let a = hi.by_element();
    let b = hj.by_element();
    let mut total = 0.0;
    let mut pairs = 0usize;
    for (key, left) in &a {
        if let Some(right) = b.get(key) {
            for (p, q) in left.iter().zip(right) {
                total += js_divergence(p, q);
                pairs += 1;
            }
        }
    }
    PairDivergence {
        mean: if pairs == 0 {
            0.0
        } else {
            total / pairs as f64
        },
        pairs,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub ids: Vec<String>,
    pub values: Vec<Vec<f64>>,
    /// Mean element-token entropy per template, averaged over the support set.
    pub mean_entropy: Vec<f64>,
    pub instances: usize,
    /// Support instances skipped because some template could not render them.
    pub skipped_instances: usize,
    /// (instance, template pair) combinations with no aligned slots.
    pub empty_alignments: usize,
}

impl CorrelationMatrix {
    /// Builds a matrix from a full square of values. The lower triangle and
    /// diagonal are replaced from the upper triangle and zero respectively.
    #[allow(clippy::needless_range_loop)]
    pub fn from_values(ids: Vec<String>, mut values: Vec<Vec<f64>>) -> Self {
        let n = ids.len();
        for i in 0..n {
            values[i][i] = 0.0;
            for j in 0..i {
                values[i][j] = values[j][i];
            }
        }
        CorrelationMatrix {
            mean_entropy: vec![0.0; n],
            ids,
            values,
            instances: 0,
            skipped_instances: 0,
            empty_alignments: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    /// Mean of row `i` over off-diagonal entries.
    pub fn row_mean(&self, i: usize) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        (0..n)
            .filter(|&j| j != i)
            .map(|j| self.values[i][j])
            .sum::<f64>()
            / (n - 1) as f64
    }

    /// Tab-separated matrix with 9 significant digits and a header row of ids.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("template");
        for id in &self.ids {
            out.push('\t');
            out.push_str(id);
        }
        out.push('\n');
        for (id, row) in self.ids.iter().zip(&self.values) {
            out.push_str(id);
            for v in row {
                out.push('\t');
                out.push_str(&significant(*v, 9));
            }
            out.push('\n');
        }
        out
    }
}

/// Formats `v` with `digits` significant digits in positional notation.
fn significant(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

struct InstanceScores {
    pairs: Vec<f64>,
    entropy: Vec<f64>,
    empty: usize,
}

fn score_instance<S: Scorer + ?Sized>(
    sentence: &LabeledSentence,
    templates: &[&Template],
    scorer: &S,
) -> Result<Option<InstanceScores>, SelectionError> {
    let surfaces: Vec<SurfaceQuad> = sentence.quads.iter().map(project).collect();
    let mut targets = Vec::with_capacity(templates.len());
    for t in templates {
        match t.render(&surfaces) {
            Ok(target) => targets.push(target),
            Err(TemplateError::MarkerCollision { .. } | TemplateError::EmptyInput) => {
                return Ok(None)
            }
            Err(e) => return Err(e.into()),
        }
    }
    let mut reps = Vec::with_capacity(templates.len());
    for (t, target) in templates.iter().zip(&targets) {
        let st = scorer.score(&sentence.text, target, &t.id)?;
        reps.push(filter(&st, target)?);
    }
    let n = templates.len();
    let mut pairs = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    let mut empty = 0;
    for i in 0..n {
        for j in i + 1..n {
            let d = pair_divergence(&reps[i], &reps[j]);
            if d.pairs == 0 {
                empty += 1;
            }
            pairs.push(d.mean);
        }
    }
    Ok(Some(InstanceScores {
        pairs,
        entropy: reps
            .iter()
            .map(FilteredRepresentation::mean_entropy)
            .collect(),
        empty,
    }))
}

/// Support-set mean of pairwise template divergences.
///
/// Instances are scored in parallel on the current rayon pool; sums are
/// taken in support order so the result does not depend on the thread count.
#[allow(clippy::needless_range_loop)]
pub fn correlation_matrix<S: Scorer + ?Sized>(
    support: &[LabeledSentence],
    templates: &[&Template],
    scorer: &S,
) -> Result<CorrelationMatrix, SelectionError> {
    if support.is_empty() {
        return Err(SelectionError::EmptySupport);
    }
    if templates.is_empty() {
        return Err(SelectionError::NoTemplates);
    }
    let per_instance = support
        .par_iter()
        .map(|s| score_instance(s, templates, scorer))
        .collect::<Result<Vec<_>, _>>()?;

    let n = templates.len();
    let mut upper = vec![0.0; n * (n.saturating_sub(1)) / 2];
    let mut entropy = vec![0.0; n];
    let mut used = 0usize;
    let mut empty = 0usize;
    for scores in per_instance.iter().flatten() {
        for (acc, v) in upper.iter_mut().zip(&scores.pairs) {
            *acc += v;
        }
        for (acc, v) in entropy.iter_mut().zip(&scores.entropy) {
            *acc += v;
        }
        used += 1;
        empty += scores.empty;
    }
    if used == 0 {
        return Err(SelectionError::EmptySupport);
    }

    let mut values = vec![vec![0.0; n]; n];
    let mut pairs = upper.iter().map(|v| v / used as f64);
    for i in 0..n {
        for j in i + 1..n {
            let v = pairs.next().expect("one value per pair");
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    Ok(CorrelationMatrix {
        ids: templates.iter().map(|t| t.id.clone()).collect(),
        values,
        mean_entropy: entropy.into_iter().map(|e| e / used as f64).collect(),
        instances: used,
        skipped_instances: support.len() - used,
        empty_alignments: empty,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionStrategy {
    /// Templates from the lowest-divergence pairs.
    #[default]
    JsMin,
    /// Templates from the highest-divergence pairs.
    JsMax,
    /// Templates with the lowest mean element-token entropy.
    EntropyMin,
    EntropyMax,
    /// Uniformly random templates, seeded.
    Random,
}

fn check_k(s: &CorrelationMatrix, k: usize) -> Result<(), SelectionError> {
    if k < 1 || k > s.len() {
        return Err(SelectionError::InvalidK {
            k,
            templates: s.len(),
        });
    }
    Ok(())
}

fn pair_walk(s: &CorrelationMatrix, k: usize, descending: bool) -> Vec<String> {
    let n = s.len();
    if n == 1 {
        return vec![s.ids[0].clone()];
    }
    let mut pairs: Vec<(f64, &str, &str, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = if s.ids[i] <= s.ids[j] { (i, j) } else { (j, i) };
            pairs.push((s.values[i][j], &s.ids[a], &s.ids[b], a, b));
        }
    }
    pairs.sort_by(|x, y| {
        let by_value = if descending {
            y.0.total_cmp(&x.0)
        } else {
            x.0.total_cmp(&y.0)
        };
        by_value.then_with(|| (x.1, x.2).cmp(&(y.1, y.2)))
    });

    let mut selected: Vec<usize> = Vec::with_capacity(k);
    for (_, _, _, a, b) in pairs {
        let fresh: Vec<usize> = [a, b]
            .into_iter()
            .filter(|t| !selected.contains(t))
            .collect();
        if selected.len() + fresh.len() > k {
            // Overshoot: keep the endpoint whose row is most extreme in the
            // walk's direction, ties by id.
            let best = fresh
                .into_iter()
                .min_by(|&x, &y| {
                    let ord = s.row_mean(x).total_cmp(&s.row_mean(y));
                    let ord = if descending { ord.reverse() } else { ord };
                    ord.then_with(|| s.ids[x].cmp(&s.ids[y]))
                })
                .expect("overshoot implies a fresh endpoint");
            selected.push(best);
        } else {
            selected.extend(fresh);
        }
        if selected.len() >= k {
            break;
        }
    }
    selected.into_iter().map(|i| s.ids[i].clone()).collect()
}

/// Walks the upper-triangle entries in ascending order (ties by id pair),
/// adding both templates of each pair until k are chosen.
pub fn select_top_k(s: &CorrelationMatrix, k: usize) -> Result<Vec<String>, SelectionError> {
    check_k(s, k)?;
    Ok(pair_walk(s, k, false))
}

pub fn select(
    s: &CorrelationMatrix,
    k: usize,
    strategy: SelectionStrategy,
    seed: u64,
) -> Result<Vec<String>, SelectionError> {
    check_k(s, k)?;
    let ids = match strategy {
        SelectionStrategy::JsMin => pair_walk(s, k, false),
        SelectionStrategy::JsMax => pair_walk(s, k, true),
        SelectionStrategy::EntropyMin | SelectionStrategy::EntropyMax => {
            let mut order: Vec<usize> = (0..s.len()).collect();
            order.sort_by(|&x, &y| {
                let ord = s.mean_entropy[x].total_cmp(&s.mean_entropy[y]);
                let ord = if strategy == SelectionStrategy::EntropyMax {
                    ord.reverse()
                } else {
                    ord
                };
                ord.then_with(|| s.ids[x].cmp(&s.ids[y]))
            });
            order
                .into_iter()
                .take(k)
                .map(|i| s.ids[i].clone())
                .collect()
        }
        SelectionStrategy::Random => {
            let mut ids = s.ids.clone();
            ids.sort();
            ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            ids.truncate(k);
            ids
        }
    };
    Ok(ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{Polarity, SentimentQuad, Term};
    use crate::scoring::{ReferenceScorer, Token};
    use crate::template::{find_template, list_templates};

    fn dist(entries: &[(&str, f64)], other: f64) -> TokenDistribution {
        TokenDistribution::new(
            entries.iter().map(|(k, p)| (k.to_string(), *p)).collect(),
            other,
        )
        .unwrap()
    }

    fn room_sentence() -> LabeledSentence {
        LabeledSentence {
            id: "1".into(),
            text: "The room is clean .".into(),
            quads: vec![SentimentQuad::new(
                Term::Explicit("room".into()),
                Term::Explicit("clean".into()),
                "room_overall",
                Polarity::Positive,
            )
            .unwrap()],
        }
    }

    #[test]
    fn js_closed_forms() {
        let p = dist(&[("a", 0.5), ("b", 0.5)], 0.0);
        assert_eq!(js_divergence(&p, &p), 0.0);
        let a = dist(&[("a", 1.0)], 0.0);
        let b = dist(&[("b", 1.0)], 0.0);
        assert!((js_divergence(&a, &b) - std::f64::consts::LN_2).abs() < 1e-15);
        let q = dist(&[("a", 0.9), ("b", 0.1)], 0.0);
        // High-precision reference value.
        assert!((js_divergence(&p, &q) - 0.101_749_225_079_196_69).abs() < 1e-12);
    }

    #[test]
    fn js_other_bucket_is_shared() {
        let a = dist(&[("x", 0.5)], 0.5);
        let b = dist(&[("y", 0.5)], 0.5);
        // OTHER matches exactly; x and y are disjoint halves.
        let expected = 0.5 * std::f64::consts::LN_2;
        assert!((js_divergence(&a, &b) - expected).abs() < 1e-15);
    }

    #[test]
    fn filters_paraphrase_linking_words() {
        let t = find_template("paraphrase").unwrap();
        let sentence = room_sentence();
        let surfaces: Vec<_> = sentence.quads.iter().map(project).collect();
        let target = t.render(&surfaces).unwrap();
        let st = ReferenceScorer::new(1)
            .score(&sentence.text, &target, &t.id)
            .unwrap();
        let h = filter(&st, &target).unwrap();
        let kept: Vec<&str> = h.slots.iter().map(|s| s.token.as_str()).collect();
        assert_eq!(kept, ["room_overall", "great", "room", "clean"]);
    }

    #[test]
    fn filters_markers() {
        let t = find_template("marker_SP_OT_AT_AC").unwrap();
        let surfaces: Vec<_> = room_sentence().quads.iter().map(project).collect();
        let target = t.render(&surfaces).unwrap();
        let st = ReferenceScorer::new(1).score("x", &target, &t.id).unwrap();
        let h = filter(&st, &target).unwrap();
        assert!(h.slots.iter().all(|s| !s.token.starts_with('[')));
        assert_eq!(h.len(), 4);
    }

    #[test]
    fn filter_span_mismatch_and_empty() {
        let target = TargetSequence {
            text: "is because".into(),
            element_spans: vec![],
            separator_spans: vec![],
        };
        let st = ScoredTarget {
            target_text: "is because".into(),
            tokens: vec![
                Token {
                    text: "is".into(),
                    start: 0,
                    end: 2,
                },
                Token {
                    text: "because".into(),
                    start: 3,
                    end: 10,
                },
            ],
            distributions: vec![
                TokenDistribution::point("is"),
                TokenDistribution::point("because"),
            ],
            template_id: "x".into(),
            prefix_id: None,
        };
        assert!(filter(&st, &target).unwrap().is_empty());
        let mut other = target.clone();
        other.text = "different".into();
        assert!(matches!(
            filter(&st, &other),
            Err(SelectionError::SpanMismatch { .. })
        ));
    }

    fn slot(quad: usize, role: Element, index: usize, d: TokenDistribution) -> Slot {
        Slot {
            quad,
            role,
            index,
            token_index: 0,
            token: String::new(),
            distribution: d,
        }
    }

    #[test]
    fn pair_divergence_cases() {
        let a = FilteredRepresentation {
            slots: vec![
                slot(0, Element::AspectTerm, 0, dist(&[("a", 1.0)], 0.0)),
                slot(0, Element::OpinionTerm, 0, dist(&[("b", 1.0)], 0.0)),
            ],
        };
        assert_eq!(pair_divergence(&a, &a).mean, 0.0);
        let b = FilteredRepresentation {
            slots: vec![
                slot(0, Element::OpinionTerm, 0, dist(&[("c", 1.0)], 0.0)),
                slot(0, Element::AspectTerm, 0, dist(&[("d", 1.0)], 0.0)),
                // Extra token of a longer element is truncated away.
                slot(0, Element::AspectTerm, 1, dist(&[("e", 1.0)], 0.0)),
            ],
        };
        let d = pair_divergence(&a, &b);
        assert_eq!(d.pairs, 2);
        assert!((d.mean - std::f64::consts::LN_2).abs() < 1e-15);
        let none = pair_divergence(&a, &FilteredRepresentation::default());
        assert_eq!((none.mean, none.pairs), (0.0, 0));
    }

    #[test]
    fn echo_scorer_gives_zero_matrix() {
        let templates: Vec<&Template> = list_templates().iter().collect();
        let m = correlation_matrix(&[room_sentence()], &templates, &ReferenceScorer::echo(0.3))
            .unwrap();
        for row in &m.values {
            assert!(row.iter().all(|v| *v == 0.0));
        }
        assert_eq!(m.empty_alignments, 0);
    }

    #[test]
    fn two_templates_one_instance() {
        let templates = [
            find_template("gas").unwrap(),
            find_template("paraphrase").unwrap(),
        ];
        let s = room_sentence();
        let scorer = ReferenceScorer::new(9);
        let m = correlation_matrix(std::slice::from_ref(&s), &templates, &scorer).unwrap();
        let surfaces: Vec<_> = s.quads.iter().map(project).collect();
        let reps: Vec<_> = templates
            .iter()
            .map(|t| {
                let target = t.render(&surfaces).unwrap();
                filter(&scorer.score(&s.text, &target, &t.id).unwrap(), &target).unwrap()
            })
            .collect();
        let d = pair_divergence(&reps[0], &reps[1]).mean;
        assert!(d > 0.0);
        assert_eq!(m.values, vec![vec![0.0, d], vec![d, 0.0]]);
    }

    #[test]
    fn skips_unrenderable_instances() {
        let mut bad = room_sentence();
        bad.quads[0].aspect_term = Term::Explicit("room, bed".into());
        let templates: Vec<&Template> = list_templates().iter().take(3).collect();
        let scorer = ReferenceScorer::new(1);
        let m = correlation_matrix(&[bad.clone(), room_sentence()], &templates, &scorer).unwrap();
        assert_eq!((m.instances, m.skipped_instances), (1, 1));
        assert!(matches!(
            correlation_matrix(&[bad], &templates, &scorer),
            Err(SelectionError::EmptySupport)
        ));
        assert!(matches!(
            correlation_matrix(&[], &templates, &scorer),
            Err(SelectionError::EmptySupport)
        ));
    }

    fn matrix(ids: &[&str], values: Vec<Vec<f64>>) -> CorrelationMatrix {
        CorrelationMatrix::from_values(ids.iter().map(|s| s.to_string()).collect(), values)
    }

    #[test]
    fn selects_smallest_pair() {
        let m = matrix(
            &["T1", "T2", "T3"],
            vec![
                vec![0.0, 0.0, 0.5],
                vec![0.0, 0.0, 0.5],
                vec![0.5, 0.5, 0.0],
            ],
        );
        assert_eq!(select_top_k(&m, 2).unwrap(), ["T1", "T2"]);
        let flat = matrix(&["a", "b", "c"], vec![vec![0.1; 3]; 3]);
        let mut all = select_top_k(&flat, 3).unwrap();
        all.sort();
        assert_eq!(all, ["a", "b", "c"]);
    }

    #[test]
    fn overshoot_keeps_lower_row_mean() {
        // Pairs: (a,b)=0.1, (c,d)=0.2, (a,c)=0.9, ... k=3 -> a, b, then one of c/d.
        let v = vec![
            vec![0.0, 0.1, 0.9, 0.9],
            vec![0.1, 0.0, 0.9, 0.9],
            vec![0.9, 0.9, 0.0, 0.2],
            vec![0.9, 0.9, 0.2, 0.0],
        ];
        let mut m = matrix(&["a", "b", "c", "d"], v);
        // Make d's row slightly lighter than c's.
        m.values[1][3] = 0.8;
        m.values[3][1] = 0.8;
        assert_eq!(select_top_k(&m, 3).unwrap(), ["a", "b", "d"]);
        // k = 1 overshoots on the first pair; b's row is lighter than a's.
        assert_eq!(select_top_k(&m, 1).unwrap(), ["b"]);
    }

    #[test]
    fn invalid_k() {
        let m = matrix(&["a", "b"], vec![vec![0.0; 2]; 2]);
        assert!(matches!(
            select_top_k(&m, 0),
            Err(SelectionError::InvalidK { .. })
        ));
        assert!(matches!(
            select_top_k(&m, 3),
            Err(SelectionError::InvalidK { .. })
        ));
        let single = matrix(&["a"], vec![vec![0.0]]);
        assert_eq!(select_top_k(&single, 1).unwrap(), ["a"]);
    }

    #[test]
    fn alternative_strategies() {
        let v = vec![
            vec![0.0, 0.1, 0.9],
            vec![0.1, 0.0, 0.5],
            vec![0.9, 0.5, 0.0],
        ];
        let mut m = matrix(&["a", "b", "c"], v);
        m.mean_entropy = vec![2.0, 1.0, 3.0];
        assert_eq!(
            select(&m, 2, SelectionStrategy::JsMax, 0).unwrap(),
            ["a", "c"]
        );
        assert_eq!(
            select(&m, 2, SelectionStrategy::EntropyMin, 0).unwrap(),
            ["b", "a"]
        );
        assert_eq!(
            select(&m, 1, SelectionStrategy::EntropyMax, 0).unwrap(),
            ["c"]
        );
        let r1 = select(&m, 2, SelectionStrategy::Random, 7).unwrap();
        assert_eq!(r1, select(&m, 2, SelectionStrategy::Random, 7).unwrap());
        assert_eq!(r1.len(), 2);
    }

    #[test]
    fn tsv_has_header_and_rows() {
        let m = matrix(&["a", "b"], vec![vec![0.0, 0.123456789012], vec![0.0, 0.0]]);
        let tsv = m.to_tsv();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines[0], "template\ta\tb");
        assert_eq!(lines[1], "a\t0\t0.123456789");
        assert_eq!(significant(0.000123456789123, 9), "0.000123456789");
        assert_eq!(significant(std::f64::consts::LN_2, 9), "0.693147181");
    }
}
