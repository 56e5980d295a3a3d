//! Remote scorer against an in-process HTTP service speaking the wire protocol.

use std::thread;
use std::time::Duration;

use bvsp_core::aggregation::{default_tau, AggregationStrategy};
use bvsp_core::data::{load, Format};
use bvsp_core::error::ScoreError;
use bvsp_core::pipeline::{aggregate_records, predict_all, select_templates};
use bvsp_core::predict::{parse_prediction, Generator, LexiconGenerator};
use bvsp_core::quad::{project, LabeledSentence};
use bvsp_core::scoring::wire::{
    GenerateRequest, GenerateResponse, HealthResponse, ScoreRequest, ScoreResponse, WireKey,
};
use bvsp_core::scoring::{check_spans, ReferenceScorer, RemoteConfig, RemoteScorer, Scorer};
use bvsp_core::selection::SelectionStrategy;
use bvsp_core::template::find_template;

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Normal,
    Loading,
    Garbage,
    /// Every probability scaled by the given factor.
    Scaled(f64),
    /// Numeric vocabulary ids instead of token strings.
    NumericKeys,
}

fn fixture() -> Vec<LabeledSentence> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/sample.txt");
    load(std::path::Path::new(path), Format::QuadLines)
        .unwrap()
        .sentences
}

/// Serves the reference scorer and a lexicon generator fitted on the fixture.
fn serve(mode: Mode) -> String {
    let server = tiny_http::Server::http("127.0.0.1:0").unwrap();
    let port = server.server_addr().to_ip().unwrap().port();
    let scorer = ReferenceScorer::new(5);
    let generator = LexiconGenerator::fit(&fixture(), 5);
    thread::spawn(move || {
        for mut req in server.incoming_requests() {
            let mut body = String::new();
            req.as_reader().read_to_string(&mut body).unwrap();
            let (status, payload) = match mode {
                Mode::Loading => (503, "{\"detail\":\"loading\"}".to_string()),
                Mode::Garbage => (200, "not json".to_string()),
                _ => match req.url() {
                    "/health" => (
                        200,
                        serde_json::to_string(&HealthResponse {
                            status: "ok".into(),
                            model_name: "reference".into(),
                            vocab_size: 32128,
                        })
                        .unwrap(),
                    ),
                    "/score" => {
                        let r: ScoreRequest = serde_json::from_str(&body).unwrap();
                        let template = find_template(&r.template_id).unwrap();
                        // The service only sees text; rebuild a target from it.
                        let target = bvsp_core::template::TargetSequence {
                            text: r.target_text.clone(),
                            element_spans: vec![],
                            separator_spans: vec![],
                        };
                        let st = scorer.score(&r.input_text, &target, &template.id).unwrap();
                        let mut resp = ScoreResponse::from(&st);
                        for d in &mut resp.distributions {
                            match mode {
                                Mode::Scaled(f) => {
                                    d.support.iter_mut().for_each(|(_, p)| *p *= f);
                                    d.other_mass *= f;
                                }
                                Mode::NumericKeys => {
                                    for (i, (k, _)) in d.support.iter_mut().enumerate() {
                                        *k = WireKey::Id(i as i64);
                                    }
                                }
                                _ => {}
                            }
                        }
                        (200, serde_json::to_string(&resp).unwrap())
                    }
                    "/generate" => {
                        let r: GenerateRequest = serde_json::from_str(&body).unwrap();
                        let template = find_template(&r.template_id).unwrap();
                        let output_text = generator.generate(&r.input_text, template).unwrap();
                        (
                            200,
                            serde_json::to_string(&GenerateResponse { output_text }).unwrap(),
                        )
                    }
                    _ => (404, "{}".to_string()),
                },
            };
            let header = tiny_http::Header::from_bytes("Content-Type", "application/json").unwrap();
            let _ = req.respond(
                tiny_http::Response::from_string(payload)
                    .with_status_code(status)
                    .with_header(header),
            );
        }
    });
    format!("http://127.0.0.1:{port}")
}

fn client(endpoint: &str) -> RemoteScorer {
    let mut cfg = RemoteConfig::new(endpoint);
    cfg.timeout = Duration::from_secs(5);
    RemoteScorer::new(cfg)
}

fn room_target(template: &str) -> bvsp_core::template::TargetSequence {
    let s = &fixture()[0];
    let surfaces: Vec<_> = s.quads.iter().map(project).collect();
    find_template(template).unwrap().render(&surfaces).unwrap()
}

#[test]
fn health_reports_model() {
    let h = client(&serve(Mode::Normal)).health().unwrap();
    assert_eq!(h.status, "ok");
    assert!(h.vocab_size > 0);
}

#[test]
fn remote_scores_match_local_reference() {
    let endpoint = serve(Mode::Normal);
    let remote = client(&endpoint);
    let local = ReferenceScorer::new(5);
    let input = &fixture()[0].text;
    for id in ["gas", "paraphrase", "marker_SP_AC_OT_AT"] {
        let target = room_target(id);
        let a = remote.score(input, &target, id).unwrap();
        let b = local.score(input, &target, id).unwrap();
        check_spans(&a.target_text, &a.tokens).unwrap();
        assert_eq!(a.tokens, b.tokens);
        for (x, y) in a.distributions.iter().zip(&b.distributions) {
            for (tok, p) in y.support() {
                assert!((x.prob(tok) - p).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn char_offsets_survive_non_ascii_text() {
    let remote = client(&serve(Mode::Normal));
    let target = bvsp_core::template::TargetSequence {
        text: "(café crème, food_drinks, great, très bon)".into(),
        element_spans: vec![],
        separator_spans: vec![],
    };
    let st = remote
        .score("Le café crème était très bon .", &target, "gas")
        .unwrap();
    for t in &st.tokens {
        assert_eq!(&st.target_text[t.start..t.end], t.text);
    }
}

#[test]
fn numeric_vocabulary_keys_are_accepted() {
    let remote = client(&serve(Mode::NumericKeys));
    let st = remote
        .score(&fixture()[0].text, &room_target("gas"), "gas")
        .unwrap();
    assert!(st.distributions[0].prob("0") > 0.0);
}

#[test]
fn loading_service_is_unavailable() {
    let err = client(&serve(Mode::Loading)).health().unwrap_err();
    assert!(matches!(err, ScoreError::ScorerUnavailable(_)), "{err:?}");
}

#[test]
fn garbage_is_a_protocol_violation() {
    let remote = client(&serve(Mode::Garbage));
    let err = remote
        .score(&fixture()[0].text, &room_target("gas"), "gas")
        .unwrap_err();
    assert!(matches!(err, ScoreError::ProtocolViolation(_)), "{err:?}");
}

#[test]
fn normalization_tolerance_is_enforced_without_renormalizing() {
    let text = &fixture()[0].text;
    let target = room_target("gas");
    let ok = client(&serve(Mode::Scaled(1.0 + 5e-5)));
    let st = ok.score(text, &target, "gas").unwrap();
    let total: f64 = st.distributions[0]
        .support()
        .iter()
        .map(|(_, p)| p)
        .sum::<f64>()
        + st.distributions[0].other_mass();
    assert!((total - (1.0 + 5e-5)).abs() < 1e-9);

    let mut strict = RemoteConfig::new(serve(Mode::Scaled(1.0 + 5e-5)));
    strict.tolerance = 1e-6;
    let err = RemoteScorer::new(strict)
        .score(text, &target, "gas")
        .unwrap_err();
    assert!(matches!(err, ScoreError::ProtocolViolation(_)));

    let bad = client(&serve(Mode::Scaled(0.9)));
    assert!(matches!(
        bad.score(text, &target, "gas"),
        Err(ScoreError::ProtocolViolation(_))
    ));
}

#[test]
fn generate_round_trips_through_parser() {
    let remote = client(&serve(Mode::Normal));
    let t = find_template("paraphrase").unwrap();
    let out = remote.generate(&fixture()[8].text, t).unwrap();
    let (quads, malformed) = parse_prediction(t, &out);
    assert_eq!(malformed, 0);
    assert!(!quads.is_empty(), "{out}");
}

#[test]
fn select_predict_vote_over_remote_on_five_sentences() {
    let remote = client(&serve(Mode::Normal));
    let data = fixture();
    let (support, query) = (&data[..5], &data[5..10]);
    let sel = select_templates(support, &remote, 3, SelectionStrategy::JsMin, 0).unwrap();
    assert_eq!(sel.selected.len(), 3);
    let records = predict_all(query, &sel.selected, &remote, None).unwrap();
    assert_eq!(records.len(), 15);
    let finals = aggregate_records(&records, AggregationStrategy::Vote, default_tau(3), 0).unwrap();
    assert_eq!(finals.len(), 5);
}
