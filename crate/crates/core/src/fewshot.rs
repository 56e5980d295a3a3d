//! k-shot episodes: a per-category support set drawn from the pool, the rest
//! as queries, and averaging over several seeded runs.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::EpisodeError;
use crate::evaluation::{six_decimals, EvalReport};
use crate::quad::Dataset;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Episode {
    pub shots: usize,
    pub seed: u64,
    pub support_ids: Vec<String>,
    pub query_ids: Vec<String>,
}

/// Draws a k-shot support set.
///
/// Each category's candidate instances are shuffled once from `seed`. Draws
/// then proceed in rounds: in round r every category (ascending order) that
/// still has fewer than r supporting instances takes its next undrawn
/// candidate. A drawn instance counts for every category it contains.
/// Because rounds 1..k never depend on k, the k-shot support is contained in
/// the (k+1)-shot support for the same seed. Both id lists keep pool order.
pub fn sample_episode(pool: &Dataset, k: usize, seed: u64) -> Result<Episode, EpisodeError> {
    if pool.is_empty() {
        return Err(EpisodeError::EmptyPool);
    }
    if k == 0 {
        return Err(EpisodeError::InvalidShots);
    }
    let mut candidates: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, s) in pool.sentences.iter().enumerate() {
        for c in s.categories() {
            candidates.entry(c.to_string()).or_default().push(i);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for list in candidates.values_mut() {
        list.shuffle(&mut rng);
    }

    let cats: Vec<&String> = candidates.keys().collect();
    let mut count: BTreeMap<&str, usize> = cats.iter().map(|c| (c.as_str(), 0)).collect();
    let mut cursor = vec![0usize; cats.len()];
    let mut drawn = vec![false; pool.len()];
    for round in 1..=k {
        for (ci, cat) in cats.iter().enumerate() {
            if count[cat.as_str()] >= round {
                continue;
            }
            let list = &candidates[*cat];
            while cursor[ci] < list.len() && drawn[list[cursor[ci]]] {
                cursor[ci] += 1;
            }
            let Some(&pick) = list.get(cursor[ci]) else {
                continue;
            };
            cursor[ci] += 1;
            drawn[pick] = true;
            for c in pool.sentences[pick].categories() {
                *count.get_mut(c).expect("category indexed") += 1;
            }
        }
    }

    let (support, query): (Vec<_>, Vec<_>) =
        pool.sentences.iter().zip(&drawn).partition(|(_, d)| **d);
    Ok(Episode {
        shots: k,
        seed,
        support_ids: support.into_iter().map(|(s, _)| s.id.clone()).collect(),
        query_ids: query.into_iter().map(|(s, _)| s.id.clone()).collect(),
    })
}

/// One episode per run with seeds `seed0, seed0 + 1, ...`.
pub fn sample_episodes(
    pool: &Dataset,
    k: usize,
    runs: usize,
    seed0: u64,
) -> Result<Vec<Episode>, EpisodeError> {
    if runs == 0 {
        return Err(EpisodeError::InvalidRuns);
    }
    (0..runs as u64)
        .map(|r| sample_episode(pool, k, seed0.wrapping_add(r)))
        .collect()
}

/// Headline numbers tracked across runs.
pub fn headline(report: &EvalReport) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    m.insert("precision".to_string(), report.quad.precision);
    m.insert("recall".to_string(), report.quad.recall);
    m.insert("f1".to_string(), report.quad.f1);
    for (name, sub) in &report.subsets {
        m.insert(format!("{name}_f1"), sub.metrics.f1);
    }
    for (name, e) in &report.elements {
        m.insert(format!("{name}_f1"), e.f1);
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    #[serde(serialize_with = "six_decimals")]
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    #[serde(serialize_with = "six_decimals")]
    pub std: f64,
}

pub fn summarize(values: &[f64]) -> Summary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Summary { mean, std }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub seed: u64,
    pub support: usize,
    pub query: usize,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolReport {
    pub shots: usize,
    pub runs: Vec<RunReport>,
    pub summary: BTreeMap<String, Summary>,
}

impl ProtocolReport {
    pub fn from_runs(shots: usize, runs: Vec<RunReport>) -> Self {
        let mut columns: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for r in &runs {
            for (name, v) in headline(&r.report) {
                columns.entry(name).or_default().push(v);
            }
        }
        ProtocolReport {
            shots,
            runs,
            summary: columns
                .into_iter()
                .map(|(k, v)| (k, summarize(&v)))
                .collect(),
        }
    }
}

/// Runs `pipeline` on the given episodes in order, stopping at the first error.
pub fn run_episodes<F, E>(episodes: &[Episode], mut pipeline: F) -> Result<ProtocolReport, E>
where
    F: FnMut(&Episode) -> Result<EvalReport, E>,
    E: From<EpisodeError>,
{
    if episodes.is_empty() {
        return Err(EpisodeError::InvalidRuns.into());
    }
    let mut runs = Vec::with_capacity(episodes.len());
    for ep in episodes {
        runs.push(RunReport {
            seed: ep.seed,
            support: ep.support_ids.len(),
            query: ep.query_ids.len(),
            report: pipeline(ep)?,
        });
    }
    let shots = episodes[0].shots;
    Ok(ProtocolReport::from_runs(shots, runs))
}

/// Samples `runs` episodes from `seed0` and runs the pipeline on each.
pub fn run_protocol<F, E>(
    pool: &Dataset,
    k: usize,
    runs: usize,
    seed0: u64,
    pipeline: F,
) -> Result<ProtocolReport, E>
where
    F: FnMut(&Episode) -> Result<EvalReport, E>,
    E: From<EpisodeError>,
{
    let episodes = sample_episodes(pool, k, runs, seed0)?;
    run_episodes(&episodes, pipeline)
}

/// True when every category of the pool has at least min(k, available)
/// supporting instances in the episode.
pub fn covers_categories(pool: &Dataset, episode: &Episode) -> bool {
    let support: BTreeSet<&str> = episode.support_ids.iter().map(String::as_str).collect();
    let mut available: BTreeMap<&str, usize> = BTreeMap::new();
    let mut got: BTreeMap<&str, usize> = BTreeMap::new();
    for s in &pool.sentences {
        for c in s.categories() {
            *available.entry(c).or_default() += 1;
            if support.contains(s.id.as_str()) {
                *got.entry(c).or_default() += 1;
            }
        }
    }
    available
        .iter()
        .all(|(c, n)| got.get(c).copied().unwrap_or(0) >= episode.shots.min(*n))
}
