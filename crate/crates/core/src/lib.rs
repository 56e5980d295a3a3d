//! Multi-template aspect sentiment quad prediction.
//!
//! Quads are rendered into target sequences by 26 templates, templates are
//! ranked by the Jensen-Shannon divergence of a scorer's token distributions
//! on a support set, the most correlated ones are run on each query sentence
//! and their outputs are combined by voting.

pub mod aggregation;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod fewshot;
mod hash;
pub mod pipeline;
pub mod predict;
pub mod quad;
pub mod scoring;
pub mod selection;
pub mod template;

pub use aggregation::{
    aggregate, default_tau, vote, AggregationStrategy, TemplatePrediction, VoteTally,
};
pub use data::{load, save, stats, DatasetStats, Format};
pub use error::Error;
pub use evaluation::{
    evaluate, evaluate_elements, evaluate_quads, split_explicit_implicit, EvalReport, Metrics,
};
pub use fewshot::{run_protocol, sample_episode, Episode};
pub use pipeline::{run_pipeline, run_reference, PipelineConfig};
pub use predict::{Generator, LexiconGenerator};
pub use quad::{Dataset, LabeledSentence, Polarity, SentimentQuad, SurfaceQuad, Term};
pub use scoring::{ReferenceScorer, RemoteConfig, RemoteScorer, Scorer, TokenDistribution};
pub use selection::{
    correlation_matrix, js_divergence, select, select_top_k, CorrelationMatrix, SelectionStrategy,
};
pub use template::{find_template, list_templates, Element, Template, TemplateKind};
