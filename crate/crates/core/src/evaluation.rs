//! Exact-match precision, recall and F1 at quad and element level.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::Hash;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::EvalError;
use crate::quad::{normalize, SentimentQuad, Term};
use crate::template::Element;

/// Sentence id with its quads.
pub type Annotated = (String, Vec<SentimentQuad>);

pub(crate) fn six_decimals<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    let raw = serde_json::value::RawValue::from_string(format!("{v:.6}"))
        .map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Counts summed over the corpus.
    #[default]
    Micro,
    /// Mean of per-sentence scores; sentences with neither gold nor
    /// predicted items are left out.
    Macro,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    #[serde(serialize_with = "six_decimals")]
    pub precision: f64,
    #[serde(serialize_with = "six_decimals")]
    pub recall: f64,
    #[serde(serialize_with = "six_decimals")]
    pub f1: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

impl Metrics {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        Metrics {
            tp,
            fp,
            fn_,
            precision,
            recall,
            f1: f1(precision, recall),
        }
    }
}

fn score_sets<K: Ord>(pairs: Vec<(BTreeSet<K>, BTreeSet<K>)>, averaging: Averaging) -> Metrics {
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    let (mut sp, mut sr, mut sf, mut n) = (0.0, 0.0, 0.0, 0usize);
    for (gold, pred) in &pairs {
        let hit = gold.intersection(pred).count();
        tp += hit;
        fp += pred.len() - hit;
        fn_ += gold.len() - hit;
        if !gold.is_empty() || !pred.is_empty() {
            let m = Metrics::from_counts(hit, pred.len() - hit, gold.len() - hit);
            sp += m.precision;
            sr += m.recall;
            sf += m.f1;
            n += 1;
        }
    }
    let mut m = Metrics::from_counts(tp, fp, fn_);
    if averaging == Averaging::Macro {
        m.precision = if n == 0 { 0.0 } else { sp / n as f64 };
        m.recall = if n == 0 { 0.0 } else { sr / n as f64 };
        m.f1 = if n == 0 { 0.0 } else { sf / n as f64 };
    }
    m
}

type Row<'a> = (&'a str, &'a [SentimentQuad], &'a [SentimentQuad]);

/// Pairs every gold sentence with its predictions (empty when missing).
fn align<'a>(gold: &'a [Annotated], pred: &'a [Annotated]) -> Result<Vec<Row<'a>>, EvalError> {
    let mut gold_ids = BTreeSet::new();
    for (id, _) in gold {
        if !gold_ids.insert(id.as_str()) {
            return Err(EvalError::DuplicateId(id.clone()));
        }
    }
    let mut by_id: HashMap<&str, &[SentimentQuad]> = HashMap::new();
    for (id, quads) in pred {
        if !gold_ids.contains(id.as_str()) {
            return Err(EvalError::UnknownId(id.clone()));
        }
        if by_id.insert(id.as_str(), quads.as_slice()).is_some() {
            return Err(EvalError::DuplicateId(id.clone()));
        }
    }
    Ok(gold
        .iter()
        .map(|(id, g)| {
            (
                id.as_str(),
                g.as_slice(),
                by_id.get(id.as_str()).copied().unwrap_or(&[]),
            )
        })
        .collect())
}

fn keyed<K: Ord, F: Fn(&SentimentQuad) -> K>(quads: &[SentimentQuad], f: F) -> BTreeSet<K> {
    quads.iter().map(f).collect()
}

fn quad_metrics(rows: &[Row<'_>], averaging: Averaging) -> Metrics {
    score_sets(
        rows.iter()
            .map(|(_, g, p)| (keyed(g, SentimentQuad::key), keyed(p, SentimentQuad::key)))
            .collect(),
        averaging,
    )
}

/// Normalized value of one role; implicit terms are their own value.
fn role_value(q: &SentimentQuad, role: Element) -> Option<String> {
    let term = |t: &Term| t.as_explicit().map(normalize);
    match role {
        Element::AspectTerm => term(&q.aspect_term),
        Element::OpinionTerm => term(&q.opinion_term),
        Element::AspectCategory => Some(normalize(&q.aspect_category)),
        Element::Polarity => Some(q.polarity.label().to_string()),
    }
}

fn element_metrics(rows: &[Row<'_>], averaging: Averaging) -> BTreeMap<String, Metrics> {
    Element::ALL
        .iter()
        .map(|&role| {
            let pairs = rows
                .iter()
                .map(|(_, g, p)| {
                    (
                        keyed(g, |q| role_value(q, role)),
                        keyed(p, |q| role_value(q, role)),
                    )
                })
                .collect();
            (role.name().to_string(), score_sets(pairs, averaging))
        })
        .collect()
}

/// Sentence ids whose gold quads are all fully explicit, and the rest.
/// A sentence without quads counts as explicit.
pub fn split_explicit_implicit(gold: &[Annotated]) -> (Vec<String>, Vec<String>) {
    let mut explicit = Vec::new();
    let mut implicit = Vec::new();
    for (id, quads) in gold {
        if quads.iter().all(SentimentQuad::is_fully_explicit) {
            explicit.push(id.clone());
        } else {
            implicit.push(id.clone());
        }
    }
    (explicit, implicit)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetReport {
    pub sentences: usize,
    #[serde(flatten)]
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub averaging: Averaging,
    pub sentences: usize,
    #[serde(flatten)]
    pub quad: Metrics,
    pub elements: BTreeMap<String, Metrics>,
    pub subsets: BTreeMap<String, SubsetReport>,
}

/// Quad-level metrics only.
pub fn evaluate_quads(gold: &[Annotated], pred: &[Annotated]) -> Result<Metrics, EvalError> {
    Ok(quad_metrics(&align(gold, pred)?, Averaging::Micro))
}

/// Per-role metrics over deduplicated per-sentence role values.
pub fn evaluate_elements(
    gold: &[Annotated],
    pred: &[Annotated],
) -> Result<BTreeMap<String, Metrics>, EvalError> {
    Ok(element_metrics(&align(gold, pred)?, Averaging::Micro))
}

pub fn evaluate(gold: &[Annotated], pred: &[Annotated]) -> Result<EvalReport, EvalError> {
    evaluate_with(gold, pred, Averaging::Micro)
}

pub fn evaluate_with(
    gold: &[Annotated],
    pred: &[Annotated],
    averaging: Averaging,
) -> Result<EvalReport, EvalError> {
    let rows = align(gold, pred)?;
    let (explicit, _) = split_explicit_implicit(gold);
    let explicit: BTreeSet<&str> = explicit.iter().map(String::as_str).collect();
    let (ex_rows, im_rows): (Vec<_>, Vec<_>) = rows
        .iter()
        .copied()
        .partition(|(id, _, _)| explicit.contains(id));
    let mut subsets = BTreeMap::new();
    for (name, part) in [("explicit", &ex_rows), ("implicit", &im_rows)] {
        subsets.insert(
            name.to_string(),
            SubsetReport {
                sentences: part.len(),
                metrics: quad_metrics(part, averaging),
            },
        );
    }
    Ok(EvalReport {
        averaging,
        sentences: rows.len(),
        quad: quad_metrics(&rows, averaging),
        elements: element_metrics(&rows, averaging),
        subsets,
    })
}

/// Convenience for callers holding key-able sets rather than quads.
pub fn prf<K: Eq + Hash + Ord + Clone>(gold: &[K], pred: &[K]) -> Metrics {
    let g: BTreeSet<K> = gold.iter().cloned().collect();
    let p: BTreeSet<K> = pred.iter().cloned().collect();
    score_sets(vec![(g, p)], Averaging::Micro)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::Polarity;

    fn q(at: Option<&str>, ot: Option<&str>, ac: &str, sp: Polarity) -> SentimentQuad {
        let t = |s: Option<&str>| s.map_or(Term::Implicit, |x| Term::Explicit(x.into()));
        SentimentQuad::new(t(at), t(ot), ac, sp).unwrap()
    }

    fn a() -> SentimentQuad {
        q(
            Some("room"),
            Some("clean"),
            "room_overall",
            Polarity::Positive,
        )
    }
    fn b() -> SentimentQuad {
        q(Some("bed"), Some("soft"), "room_bed", Polarity::Positive)
    }
    fn c() -> SentimentQuad {
        q(Some("staff"), Some("rude"), "service", Polarity::Negative)
    }

    #[test]
    fn half_right() {
        let gold = vec![("1".to_string(), vec![a(), b()])];
        let pred = vec![("1".to_string(), vec![a(), c()])];
        let m = evaluate_quads(&gold, &pred).unwrap();
        assert_eq!((m.tp, m.fp, m.fn_), (1, 1, 1));
        assert_eq!((m.precision, m.recall, m.f1), (0.5, 0.5, 0.5));
    }

    #[test]
    fn perfect_and_empty() {
        let gold = vec![
            ("1".to_string(), vec![a()]),
            ("2".to_string(), vec![b(), c()]),
        ];
        let r = evaluate(&gold, &gold).unwrap();
        assert_eq!(
            (r.quad.precision, r.quad.recall, r.quad.f1),
            (1.0, 1.0, 1.0)
        );
        for m in r.elements.values() {
            assert_eq!(m.f1, 1.0);
        }
        let none = evaluate(&gold, &[]).unwrap();
        assert_eq!(
            (none.quad.precision, none.quad.recall, none.quad.f1),
            (0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn element_isolation() {
        let gold = vec![("1".to_string(), vec![a()])];
        let wrong_opinion = q(
            Some("room"),
            Some("dirty"),
            "room_overall",
            Polarity::Positive,
        );
        let pred = vec![("1".to_string(), vec![wrong_opinion])];
        let e = evaluate_elements(&gold, &pred).unwrap();
        assert_eq!(e["aspect_category"].f1, 1.0);
        assert_eq!(e["opinion_term"].f1, 0.0);
        assert_eq!(e["aspect_term"].f1, 1.0);
        assert_eq!(e["sentiment_polarity"].f1, 1.0);
    }

    #[test]
    fn id_errors() {
        let gold = vec![("1".to_string(), vec![a()]), ("1".to_string(), vec![])];
        assert_eq!(
            evaluate(&gold, &[]).unwrap_err(),
            EvalError::DuplicateId("1".into())
        );
        let gold = vec![("1".to_string(), vec![a()])];
        let pred = vec![("9".to_string(), vec![a()])];
        assert_eq!(
            evaluate(&gold, &pred).unwrap_err(),
            EvalError::UnknownId("9".into())
        );
        let pred = vec![("1".to_string(), vec![a()]), ("1".to_string(), vec![])];
        assert!(evaluate(&gold, &pred).is_err());
    }

    #[test]
    fn explicit_implicit_split() {
        let gold = vec![
            ("1".to_string(), vec![a(), b()]),
            (
                "2".to_string(),
                vec![a(), q(None, Some("nice"), "hotel", Polarity::Positive)],
            ),
            ("3".to_string(), vec![]),
            (
                "4".to_string(),
                vec![q(Some("x"), None, "hotel", Polarity::Neutral)],
            ),
        ];
        let (ex, im) = split_explicit_implicit(&gold);
        assert_eq!(ex, ["1", "3"]);
        assert_eq!(im, ["2", "4"]);
        let r = evaluate(&gold, &gold).unwrap();
        assert_eq!(
            r.subsets["explicit"].sentences + r.subsets["implicit"].sentences,
            4
        );
        assert_eq!(r.subsets["implicit"].metrics.tp, 3);
    }

    #[test]
    fn macro_averaging() {
        let gold = vec![
            ("1".to_string(), vec![a()]),
            ("2".to_string(), vec![b(), c()]),
        ];
        let pred = vec![("1".to_string(), vec![a()]), ("2".to_string(), vec![b()])];
        let r = evaluate_with(&gold, &pred, Averaging::Macro).unwrap();
        assert_eq!(r.quad.precision, 1.0);
        assert_eq!(r.quad.recall, 0.75);
        assert_eq!(r.quad.tp, 2);
    }

    #[test]
    fn report_prints_six_decimals() {
        let gold = vec![("1".to_string(), vec![a(), b(), c()])];
        let pred = vec![("1".to_string(), vec![a()])];
        let json = serde_json::to_string(&evaluate(&gold, &pred).unwrap()).unwrap();
        assert!(json.contains(r#""precision":1.000000"#), "{json}");
        assert!(json.contains(r#""recall":0.333333"#), "{json}");
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["fn"], 2);
    }

    #[test]
    fn prf_helper() {
        let m = prf(&[1, 2, 3], &[2, 3, 4, 4]);
        assert_eq!((m.tp, m.fp, m.fn_), (2, 1, 1));
    }
}
