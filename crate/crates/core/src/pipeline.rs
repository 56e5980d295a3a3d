//! select -> predict -> vote -> evaluate on one support/query split.

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::aggregation::{aggregate, default_tau, AggregationStrategy, TemplatePrediction};
use crate::error::{Error, VoteError};
use crate::evaluation::{evaluate_with, Averaging, EvalReport};
use crate::fewshot::Episode;
use crate::predict::{predict_sentence, Generator, LexiconGenerator};
use crate::quad::{Dataset, LabeledSentence, SentimentQuad};
use crate::scoring::{ReferenceScorer, Scorer};
use crate::selection::{correlation_matrix, select, CorrelationMatrix, SelectionStrategy};
use crate::template::{find_template, list_templates, Template};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub k_templates: usize,
    /// Defaults to a majority of `k_templates`.
    pub tau: Option<usize>,
    pub selection: SelectionStrategy,
    pub aggregation: AggregationStrategy,
    pub averaging: Averaging,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            k_templates: 3,
            tau: None,
            selection: SelectionStrategy::JsMin,
            aggregation: AggregationStrategy::Vote,
            averaging: Averaging::Micro,
            seed: 42,
        }
    }
}

impl PipelineConfig {
    pub fn tau(&self) -> usize {
        self.tau.unwrap_or_else(|| default_tau(self.k_templates))
    }
}

fn opt_six_decimals<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => crate::evaluation::six_decimals(x, s),
        None => s.serialize_none(),
    }
}

/// One line of a per-template predictions file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub sentence_id: String,
    pub template_id: String,
    pub quads: Vec<SentimentQuad>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "opt_six_decimals"
    )]
    pub perplexity: Option<f64>,
}

impl PredictionRecord {
    pub fn into_prediction(self) -> TemplatePrediction {
        TemplatePrediction {
            template_id: self.template_id,
            quads: self.quads,
            perplexity: self.perplexity,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SelectionOutcome {
    pub matrix: CorrelationMatrix,
    pub selected: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub selection: SelectionOutcome,
    pub predictions: Vec<PredictionRecord>,
    /// Final quads per query sentence, in query order.
    pub final_predictions: Vec<LabeledSentence>,
    pub report: EvalReport,
}

/// Scores every template on the support set and picks `k` of them.
pub fn select_templates<S: Scorer + ?Sized>(
    support: &[LabeledSentence],
    scorer: &S,
    k: usize,
    strategy: SelectionStrategy,
    seed: u64,
) -> Result<SelectionOutcome, Error> {
    let templates: Vec<&Template> = list_templates().iter().collect();
    let matrix = correlation_matrix(support, &templates, scorer)?;
    let selected = select(&matrix, k, strategy, seed)?;
    Ok(SelectionOutcome { matrix, selected })
}

/// Runs the selected templates on every query sentence, in parallel on the
/// current rayon pool. Output order follows `query`, then `template_ids`.
pub fn predict_all<G: Generator + ?Sized>(
    query: &[LabeledSentence],
    template_ids: &[String],
    generator: &G,
    scorer: Option<&dyn Scorer>,
) -> Result<Vec<PredictionRecord>, Error> {
    let templates = template_ids
        .iter()
        .map(|id| find_template(id))
        .collect::<Result<Vec<_>, _>>()?;
    let per_sentence = query
        .par_iter()
        .map(|s| {
            predict_sentence(generator, scorer, &s.text, &templates).map(|preds| {
                preds
                    .into_iter()
                    .map(|p| PredictionRecord {
                        sentence_id: s.id.clone(),
                        template_id: p.template_id,
                        quads: p.quads,
                        perplexity: p.perplexity,
                    })
                    .collect::<Vec<_>>()
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(per_sentence.into_iter().flatten().collect())
}

/// Groups per-template records by sentence (first-appearance order) and
/// aggregates each group.
pub fn aggregate_records(
    records: &[PredictionRecord],
    strategy: AggregationStrategy,
    tau: usize,
    seed: u64,
) -> Result<Vec<(String, Vec<SentimentQuad>)>, VoteError> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: std::collections::HashMap<&str, Vec<TemplatePrediction>> = Default::default();
    for r in records {
        let g = groups.entry(r.sentence_id.as_str()).or_insert_with(|| {
            order.push(r.sentence_id.as_str());
            Vec::new()
        });
        g.push(r.clone().into_prediction());
    }
    order
        .into_iter()
        .map(|id| {
            Ok((
                id.to_string(),
                aggregate(&groups[id], strategy, tau, seed, id)?,
            ))
        })
        .collect()
}

/// Full pipeline with caller-supplied scorer and generator.
pub fn run_pipeline(
    support: &[LabeledSentence],
    query: &[LabeledSentence],
    config: &PipelineConfig,
    scorer: &dyn Scorer,
    generator: &dyn Generator,
) -> Result<PipelineOutput, Error> {
    let selection = select_templates(
        support,
        scorer,
        config.k_templates,
        config.selection,
        config.seed,
    )?;
    let tau = config.tau();
    if tau < 1 || tau > selection.selected.len() {
        return Err(VoteError::InvalidTau {
            tau,
            templates: selection.selected.len(),
        }
        .into());
    }
    let rank_scorer = (config.aggregation == AggregationStrategy::Rank).then_some(scorer);
    let predictions = predict_all(query, &selection.selected, generator, rank_scorer)?;
    let finals = aggregate_records(&predictions, config.aggregation, tau, config.seed)?;

    let by_id: std::collections::HashMap<&str, &Vec<SentimentQuad>> =
        finals.iter().map(|(id, q)| (id.as_str(), q)).collect();
    let final_predictions: Vec<LabeledSentence> = query
        .iter()
        .map(|s| LabeledSentence {
            id: s.id.clone(),
            text: s.text.clone(),
            quads: by_id
                .get(s.id.as_str())
                .map(|q| (*q).clone())
                .unwrap_or_default(),
        })
        .collect();

    let gold: Vec<(String, Vec<SentimentQuad>)> = query
        .iter()
        .map(|s| (s.id.clone(), s.quads.clone()))
        .collect();
    let pred: Vec<(String, Vec<SentimentQuad>)> = final_predictions
        .iter()
        .map(|s| (s.id.clone(), s.quads.clone()))
        .collect();
    let report = evaluate_with(&gold, &pred, config.averaging)?;
    Ok(PipelineOutput {
        selection,
        predictions,
        final_predictions,
        report,
    })
}

/// Pipeline with the built-in reference scorer and a lexicon generator
/// fitted on the support set, both seeded from the config.
pub fn run_reference(
    support: &[LabeledSentence],
    query: &[LabeledSentence],
    config: &PipelineConfig,
) -> Result<PipelineOutput, Error> {
    let scorer = ReferenceScorer::new(config.seed);
    let generator = LexiconGenerator::fit(support, config.seed);
    run_pipeline(support, query, config, &scorer, &generator)
}

/// Splits a pool according to an episode.
pub fn episode_split(
    pool: &Dataset,
    episode: &Episode,
) -> (Vec<LabeledSentence>, Vec<LabeledSentence>) {
    (
        pool.subset(&episode.support_ids).sentences,
        pool.subset(&episode.query_ids).sentences,
    )
}

/// Newline-terminated JSON lines.
pub fn to_jsonl<T: Serialize>(rows: &[T]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}
