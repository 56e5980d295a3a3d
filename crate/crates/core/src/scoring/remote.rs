use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::wire::{GenerateRequest, GenerateResponse, HealthResponse, ScoreRequest, ScoreResponse};
use super::{ScoredTarget, Scorer, DEFAULT_TOP_M};
use crate::error::ScoreError;
use crate::predict::Generator;
use crate::template::{TargetSequence, Template};

#[derive(Debug, Clone)]
pub struct RemoteConfig {
    /// Base URL, e.g. `http://127.0.0.1:8080`.
    pub endpoint: String,
    pub timeout: Duration,
    pub top_m: usize,
    /// Allowed deviation of a distribution's total mass from 1.
    pub tolerance: f64,
    pub prefix_id: Option<String>,
    pub num_beams: usize,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        RemoteConfig {
            endpoint: endpoint.into(),
            timeout: Duration::from_millis(30_000),
            top_m: DEFAULT_TOP_M,
            tolerance: 1e-4,
            prefix_id: None,
            num_beams: 1,
        }
    }
}

/// HTTP client for an external scoring service. The underlying agent keeps a
/// connection pool and may be shared across threads.
#[derive(Debug, Clone)]
pub struct RemoteScorer {
    agent: ureq::Agent,
    config: RemoteConfig,
}

fn map_err(err: ureq::Error) -> ScoreError {
    match err {
        ureq::Error::StatusCode(503) => {
            ScoreError::ScorerUnavailable("service loading (503)".into())
        }
        ureq::Error::StatusCode(code) => {
            ScoreError::ProtocolViolation(format!("HTTP status {code}"))
        }
        ureq::Error::Json(e) => ScoreError::ProtocolViolation(format!("malformed response: {e}")),
        other => ScoreError::ScorerUnavailable(other.to_string()),
    }
}

impl RemoteScorer {
    pub fn new(config: RemoteConfig) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .build()
            .into();
        RemoteScorer { agent, config }
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    fn url(&self, path: &str) -> String {
        format!("{}/{}", self.config.endpoint.trim_end_matches('/'), path)
    }

    fn post<Req: Serialize, Resp: DeserializeOwned>(
        &self,
        path: &str,
        body: &Req,
    ) -> Result<Resp, ScoreError> {
        let mut resp = self
            .agent
            .post(&self.url(path))
            .send_json(body)
            .map_err(map_err)?;
        resp.body_mut().read_json().map_err(map_err)
    }

    pub fn health(&self) -> Result<HealthResponse, ScoreError> {
        let mut resp = self
            .agent
            .get(&self.url("health"))
            .call()
            .map_err(map_err)?;
        resp.body_mut().read_json().map_err(map_err)
    }
}

impl Scorer for RemoteScorer {
    fn score(
        &self,
        input_text: &str,
        target: &TargetSequence,
        template_id: &str,
    ) -> Result<ScoredTarget, ScoreError> {
        let request = ScoreRequest {
            input_text: input_text.to_string(),
            target_text: target.text.clone(),
            template_id: template_id.to_string(),
            prefix_id: self.config.prefix_id.clone(),
            top_m: self.config.top_m,
        };
        let response: ScoreResponse = self.post("score", &request)?;
        response.into_scored(&request, self.config.tolerance)
    }
}

impl Generator for RemoteScorer {
    fn generate(&self, input_text: &str, template: &Template) -> Result<String, ScoreError> {
        let request = GenerateRequest {
            input_text: input_text.to_string(),
            template_id: template.id.clone(),
            prefix_id: self.config.prefix_id.clone(),
            num_beams: self.config.num_beams,
        };
        let response: GenerateResponse = self.post("generate", &request)?;
        Ok(response.output_text)
    }
}
