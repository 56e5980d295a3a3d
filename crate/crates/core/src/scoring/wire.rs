//! JSON wire protocol spoken with an external scoring service.
//!
//! * `POST /score`    [`ScoreRequest`] -> [`ScoreResponse`]
//! * `POST /generate` [`GenerateRequest`] -> [`GenerateResponse`]
//! * `GET /health`    -> [`HealthResponse`]
//!
//! Token offsets on the wire count Unicode scalar values, not bytes.

use serde::{Deserialize, Serialize};

use super::{ScoredTarget, Token, TokenDistribution};
use crate::error::{DistributionError, ScoreError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub input_text: String,
    pub target_text: String,
    pub template_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix_id: Option<String>,
    pub top_m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireToken {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

/// Support keys may be token strings or vocabulary ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WireKey {
    Text(String),
    Id(i64),
}

impl WireKey {
    fn into_key(self) -> String {
        match self {
            WireKey::Text(s) => s,
            WireKey::Id(i) => i.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireDistribution {
    pub support: Vec<(WireKey, f64)>,
    pub other_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreResponse {
    pub tokens: Vec<WireToken>,
    pub distributions: Vec<WireDistribution>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateRequest {
    pub input_text: String,
    pub template_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix_id: Option<String>,
    pub num_beams: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateResponse {
    pub output_text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    pub model_name: String,
    pub vocab_size: u64,
}

fn char_to_byte_offsets(text: &str) -> Vec<usize> {
    let mut offsets: Vec<usize> = text.char_indices().map(|(i, _)| i).collect();
    offsets.push(text.len());
    offsets
}

impl ScoreResponse {
    /// Converts a response into a validated [`ScoredTarget`]. Nothing is
    /// renormalized: a distribution off by more than `tolerance` is rejected.
    pub fn into_scored(
        self,
        request: &ScoreRequest,
        tolerance: f64,
    ) -> Result<ScoredTarget, ScoreError> {
        let offsets = char_to_byte_offsets(&request.target_text);
        let byte = |c: usize| {
            offsets.get(c).copied().ok_or_else(|| {
                ScoreError::ProtocolViolation(format!(
                    "offset {c} beyond target of {} chars",
                    offsets.len() - 1
                ))
            })
        };
        let tokens = self
            .tokens
            .into_iter()
            .map(|t| {
                Ok(Token {
                    start: byte(t.start)?,
                    end: byte(t.end)?,
                    text: t.text,
                })
            })
            .collect::<Result<Vec<_>, ScoreError>>()?;
        let distributions = self
            .distributions
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                let support = d
                    .support
                    .into_iter()
                    .map(|(k, p)| (k.into_key(), p))
                    .collect();
                TokenDistribution::with_tolerance(support, d.other_mass, tolerance).map_err(
                    |e: DistributionError| {
                        ScoreError::ProtocolViolation(format!("distribution {i}: {e}"))
                    },
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        let scored = ScoredTarget {
            target_text: request.target_text.clone(),
            tokens,
            distributions,
            template_id: request.template_id.clone(),
            prefix_id: request.prefix_id.clone(),
        };
        scored.validate()?;
        Ok(scored)
    }
}

impl From<&ScoredTarget> for ScoreResponse {
    fn from(st: &ScoredTarget) -> Self {
        let char_index = |byte: usize| st.target_text[..byte].chars().count();
        ScoreResponse {
            tokens: st
                .tokens
                .iter()
                .map(|t| WireToken {
                    text: t.text.clone(),
                    start: char_index(t.start),
                    end: char_index(t.end),
                })
                .collect(),
            distributions: st
                .distributions
                .iter()
                .map(|d| WireDistribution {
                    support: d
                        .support()
                        .iter()
                        .map(|(k, p)| (WireKey::Text(k.clone()), *p))
                        .collect(),
                    other_mass: d.other_mass(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(target: &str) -> ScoreRequest {
        ScoreRequest {
            input_text: "x".into(),
            target_text: target.into(),
            template_id: "gas".into(),
            prefix_id: None,
            top_m: 5,
        }
    }

    #[test]
    fn decodes_mixed_keys_and_char_offsets() {
        let json = r#"{"tokens":[{"text":"café","start":0,"end":4},{"text":"ok","start":5,"end":7}],
            "distributions":[{"support":[["café",0.5],[17,0.25]],"other_mass":0.25},
                             {"support":[["ok",1.0]],"other_mass":0.0}]}"#;
        let resp: ScoreResponse = serde_json::from_str(json).unwrap();
        let st = resp.into_scored(&request("café ok"), 1e-6).unwrap();
        assert_eq!(st.tokens[1].start, 6);
        assert_eq!(
            &st.target_text[st.tokens[0].start..st.tokens[0].end],
            "café"
        );
        assert_eq!(st.distributions[0].prob("17"), 0.25);
    }

    #[test]
    fn rejects_unnormalized_and_bad_spans() {
        let bad_sum = ScoreResponse {
            tokens: vec![WireToken {
                text: "a".into(),
                start: 0,
                end: 1,
            }],
            distributions: vec![WireDistribution {
                support: vec![(WireKey::Text("a".into()), 0.9)],
                other_mass: 0.0,
            }],
        };
        assert!(matches!(
            bad_sum.into_scored(&request("a"), 1e-6),
            Err(ScoreError::ProtocolViolation(_))
        ));
        let bad_span = ScoreResponse {
            tokens: vec![WireToken {
                text: "a".into(),
                start: 0,
                end: 9,
            }],
            distributions: vec![WireDistribution {
                support: vec![(WireKey::Text("a".into()), 1.0)],
                other_mass: 0.0,
            }],
        };
        assert!(bad_span.into_scored(&request("a"), 1e-6).is_err());
    }

    #[test]
    fn request_omits_missing_prefix() {
        let json = serde_json::to_string(&request("a")).unwrap();
        assert!(!json.contains("prefix_id"));
    }
}
