use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadError {
    #[error("unknown polarity surface word {0:?} (expected great, ok or bad)")]
    UnknownPolaritySurface(String),
    #[error("unknown polarity label {0:?}")]
    UnknownPolarity(String),
    #[error("explicit term must be non-empty")]
    EmptyTerm,
    #[error("aspect category must be non-empty")]
    EmptyCategory,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("field {field:?} collides with a reserved literal of template {template}")]
    MarkerCollision { template: String, field: String },
    #[error("cannot render an empty quad list")]
    EmptyInput,
    #[error("unknown template id {0:?}")]
    UnknownTemplate(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistributionError {
    #[error("probability {0} is negative or not finite")]
    BadProbability(f64),
    #[error("probabilities sum to {0}, outside 1 +/- tolerance")]
    NotNormalized(f64),
    #[error("duplicate support key {0:?}")]
    DuplicateKey(String),
}

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("scorer unavailable: {0}")]
    ScorerUnavailable(String),
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Template(#[from] TemplateError),
}

#[derive(Debug, Error)]
pub enum SelectionError {
    #[error("scored text {scored:?} does not match target {target:?}")]
    SpanMismatch { scored: String, target: String },
    #[error("k = {k} is outside 1..={templates}")]
    InvalidK { k: usize, templates: usize },
    #[error("support set is empty")]
    EmptySupport,
    #[error("no templates given")]
    NoTemplates,
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Template(#[from] TemplateError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VoteError {
    #[error("tau = {tau} is outside 1..={templates}")]
    InvalidTau { tau: usize, templates: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("duplicate sentence id {0:?}")]
    DuplicateId(String),
    #[error("predicted sentence id {0:?} has no gold entry")]
    UnknownId(String),
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("input is empty")]
    EmptyFile,
    #[error("invalid buckets: {0}")]
    InvalidBuckets(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EpisodeError {
    #[error("episode pool is empty")]
    EmptyPool,
    #[error("shots must be at least 1")]
    InvalidShots,
    #[error("runs must be at least 1")]
    InvalidRuns,
}

/// Any failure of the end-to-end pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Vote(#[from] VoteError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Episode(#[from] EpisodeError),
}
