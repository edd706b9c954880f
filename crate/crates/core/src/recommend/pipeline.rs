//! Profile, group, retrieve, sample, rank and explain.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::props::{profile, ProfileConfig, PropertyProfile};
use crate::recommend::metrics::{hit_ratio_at_k, ndcg_at_k};
use crate::recommend::query::group_queries;
use crate::recommend::report::{interpret, Interpretation, ModelShift};
use crate::recommend::retrieval::{
    draw_count, model_names, nearest_key, rank_models, sample_values, RankedModel,
};
use crate::recommend::strategy::StrategyMap;
use crate::series::{test_window_histories, SeriesSet, SplitSpec, TimeSeries};
use crate::store::{Bag, LogEntry, PropertyVector, Store};
use crate::synth::derive_seed;

pub const RANKING_KEY: &str = "mean MAE, ties by mean MSE then model name";
pub const NDCG_RELEVANCE: &str = "graded, k - rank in the true top-k (rank from 0)";
pub const TOP_N: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecommendConfig {
    /// Sampling fraction in (0, 1].
    pub tau: f64,
    pub seed: u64,
    pub profile: ProfileConfig,
    /// When set, each query series is cut into its test-window histories.
    pub windows: Option<SplitSpec>,
}

impl RecommendConfig {
    pub fn new(tau: f64, seed: u64) -> Self {
        Self {
            tau,
            seed,
            profile: ProfileConfig::default(),
            windows: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupRetrieval {
    pub vector: PropertyVector,
    pub weight: usize,
    pub members: Vec<String>,
    pub key: PropertyVector,
    pub distance: u32,
    pub draws: usize,
    /// Models ranked on this group's draws alone.
    pub ranking: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedQuery {
    pub id: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMetrics {
    pub k: usize,
    pub hit_ratio_i: Option<f64>,
    pub ndcg_i: Option<f64>,
    pub hit_ratio_o: f64,
    pub ndcg_o: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub truth: Vec<RankedModel>,
    pub metrics: Vec<KMetrics>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub tau: f64,
    pub seed: u64,
    pub store_config_hash: String,
    pub ranking_key: String,
    pub ndcg_relevance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub ranked_models: Vec<RankedModel>,
    pub interpretation: Interpretation,
    pub groups: Vec<GroupRetrieval>,
    pub query_count: usize,
    pub skipped: Vec<SkippedQuery>,
    pub stationary_queries: usize,
    pub store_excluded_stationary: usize,
    pub settings: Settings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<Validation>,
}

fn query_series(queries: &SeriesSet, windows: Option<&SplitSpec>) -> Vec<TimeSeries> {
    match windows {
        None => queries.iter().cloned().collect(),
        Some(spec) => queries
            .iter()
            .flat_map(|s| test_window_histories(s, spec))
            .collect(),
    }
}

pub fn recommend(
    store: &Store,
    queries: &SeriesSet,
    cfg: &RecommendConfig,
) -> Result<Recommendation> {
    if store.is_empty() {
        return Err(Error::EmptyStore);
    }
    if !(cfg.tau > 0.0 && cfg.tau <= 1.0) {
        return Err(Error::param("tau", "must be in (0, 1]"));
    }
    let series = query_series(queries, cfg.windows.as_ref());
    let results: Vec<(String, Result<PropertyProfile>)> = series
        .par_iter()
        .map(|s| (s.id().to_string(), profile(s.values(), &cfg.profile)))
        .collect();
    let mut profiles = Vec::new();
    let mut skipped = Vec::new();
    for (id, r) in results {
        match r {
            Ok(p) => profiles.push((id, p)),
            Err(e) => skipped.push(SkippedQuery {
                id,
                reason: e.to_string(),
            }),
        }
    }
    recommend_profiles(store, &profiles, skipped, cfg)
}

/// Recommendation from already computed query profiles.
pub fn recommend_profiles(
    store: &Store,
    profiles: &[(String, PropertyProfile)],
    skipped: Vec<SkippedQuery>,
    cfg: &RecommendConfig,
) -> Result<Recommendation> {
    if store.is_empty() {
        return Err(Error::EmptyStore);
    }
    let groups = group_queries(profiles.iter().map(|(id, p)| (id.as_str(), p)));
    let stationary_queries = groups
        .iter()
        .filter(|g| g.is_stationary())
        .map(|g| g.weight)
        .sum();
    let retrieved: Vec<(GroupRetrieval, Vec<&Bag>)> = groups
        .par_iter()
        .enumerate()
        .filter(|(_, g)| !g.is_stationary())
        .map(|(gi, g)| {
            let (key, distance) = nearest_key(store, &g.vector)?;
            let draws = draw_count(cfg.tau, g.weight);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, gi as u64));
            let bags = sample_values(store, &key, draws, &mut rng)?;
            let ranking = model_names(&rank_models(bags.iter().copied()));
            Ok((
                GroupRetrieval {
                    vector: g.vector,
                    weight: g.weight,
                    members: g.members.clone(),
                    key,
                    distance,
                    draws,
                    ranking,
                },
                bags,
            ))
        })
        .collect::<Result<_>>()?;
    if retrieved.is_empty() {
        return Err(Error::NoQueries);
    }
    let ranked = rank_models(retrieved.iter().flat_map(|(_, b)| b.iter().copied()));
    let vectors: Vec<PropertyVector> = groups
        .iter()
        .flat_map(|g| std::iter::repeat_n(g.vector, g.weight))
        .collect();
    let interpretation = interpret(
        &vectors,
        &ranked,
        Some(&store.regular),
        &StrategyMap::bundled(),
    );
    Ok(Recommendation {
        ranked_models: ranked,
        interpretation,
        groups: retrieved.into_iter().map(|(g, _)| g).collect(),
        query_count: profiles.len() + skipped.len(),
        skipped,
        stationary_queries,
        store_excluded_stationary: store.excluded_stationary,
        settings: Settings {
            tau: cfg.tau,
            seed: cfg.seed,
            store_config_hash: store.config_hash.clone(),
            ranking_key: RANKING_KEY.into(),
            ndcg_relevance: NDCG_RELEVANCE.into(),
        },
        validation: None,
    })
}

/// Ranking of a performance log restricted to `ids`. A query id
/// `series@offset` falls back to `series` when it is not logged itself.
pub fn truth_ranking<'a>(
    truth: &[LogEntry],
    ids: impl IntoIterator<Item = &'a str>,
) -> Vec<RankedModel> {
    let mut by_series: BTreeMap<&str, Bag> = BTreeMap::new();
    for e in truth {
        by_series
            .entry(e.series_id.as_str())
            .or_insert_with(|| Bag {
                series_id: e.series_id.clone(),
                records: Vec::new(),
            })
            .records
            .push(e.record.clone());
    }
    let bags: Vec<&Bag> = ids
        .into_iter()
        .filter_map(|id| {
            by_series.get(id).or_else(|| {
                id.rsplit_once('@')
                    .and_then(|(base, _)| by_series.get(base))
            })
        })
        .collect();
    rank_models(bags)
}

/// Overall (`_o`) and per-group (`_i`, weight-averaged) agreement with the
/// ranking observed in a truth log.
pub fn validate(rec: &Recommendation, truth: &[LogEntry], ks: &[usize]) -> Validation {
    let overall = truth_ranking(
        truth,
        rec.groups
            .iter()
            .flat_map(|g| g.members.iter().map(String::as_str)),
    );
    let truth_names = model_names(&overall);
    let rec_names = model_names(&rec.ranked_models);
    let per_group: Vec<(usize, Vec<String>, Vec<String>)> = rec
        .groups
        .iter()
        .map(|g| {
            (
                g.weight,
                g.ranking.clone(),
                model_names(&truth_ranking(truth, g.members.iter().map(String::as_str))),
            )
        })
        .filter(|(_, _, t)| !t.is_empty())
        .collect();
    let total_w: usize = per_group.iter().map(|g| g.0).sum();
    let metrics = ks
        .iter()
        .map(|&k| {
            let avg = |f: fn(&[String], &[String], usize) -> f64| {
                (total_w > 0).then(|| {
                    per_group
                        .iter()
                        .map(|(w, r, t)| *w as f64 * f(r, t, k))
                        .sum::<f64>()
                        / total_w as f64
                })
            };
            KMetrics {
                k,
                hit_ratio_i: avg(hit_ratio_at_k::<String>),
                ndcg_i: avg(ndcg_at_k::<String>),
                hit_ratio_o: hit_ratio_at_k(&rec_names, &truth_names, k),
                ndcg_o: ndcg_at_k(&rec_names, &truth_names, k),
            }
        })
        .collect();
    Validation {
        truth: overall,
        metrics,
    }
}

fn shift_list(shifts: &[ModelShift]) -> String {
    if shifts.is_empty() {
        return "none".to_string();
    }
    shifts
        .iter()
        .map(|s| format!("{} ({:+.1}%)", s.model, 100.0 * s.improvement))
        .collect::<Vec<_>>()
        .join(", ")
}

fn or_none(items: &[String]) -> String {
    if items.is_empty() {
        "none".to_string()
    } else {
        items.join(", ")
    }
}

impl Recommendation {
    /// Human-readable report.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let i = &self.interpretation;
        s.push_str("Interpretability Suggestions:\n");
        s.push_str("  Main properties:\n");
        for p in &i.top_properties {
            writeln!(s, "    {}", p.text()).unwrap();
        }
        for n in &i.property_notes {
            writeln!(s, "    note: {n}").unwrap();
        }
        writeln!(
            s,
            "  Strategies that can be adopted:\n    {}",
            or_none(&i.strategies_adopt)
        )
        .unwrap();
        writeln!(
            s,
            "  Strategies to be avoided:\n    {}",
            or_none(&i.strategies_avoid)
        )
        .unwrap();
        match (&i.preferred_models, &i.unsuitable_models) {
            (Some(p), Some(u)) => {
                writeln!(
                    s,
                    "  Models with potential preferences:\n    {}",
                    shift_list(p)
                )
                .unwrap();
                writeln!(s, "  Potentially unsuitable Models:\n    {}", shift_list(u)).unwrap();
            }
            _ => {
                for n in &i.notices {
                    writeln!(s, "  {n}").unwrap();
                }
            }
        }
        writeln!(s, "Top {TOP_N} Recommended Models:").unwrap();
        for (r, m) in self.ranked_models.iter().take(TOP_N).enumerate() {
            writeln!(
                s,
                "  {:>2}. {:<16} MAE {:.4}  MSE {:.4}",
                r + 1,
                m.model,
                m.mean_mae,
                m.mean_mse
            )
            .unwrap();
        }
        s.push_str("Validation:\n");
        match &self.validation {
            None => s.push_str("  no ground-truth log supplied\n"),
            Some(v) => {
                writeln!(s, "  The {TOP_N} Best Models for Real:").unwrap();
                let names: Vec<String> = v
                    .truth
                    .iter()
                    .take(TOP_N)
                    .map(|m| m.model.clone())
                    .collect();
                writeln!(s, "    {}", or_none(&names)).unwrap();
                for m in &v.metrics {
                    let opt = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.3}"));
                    writeln!(
                        s,
                        "  Hit Ratio@{k}_i: {}  NDCG@{k}_i: {}  Hit Ratio@{k}_o: {:.3}  NDCG@{k}_o: {:.3}",
                        opt(m.hit_ratio_i),
                        opt(m.ndcg_i),
                        m.hit_ratio_o,
                        m.ndcg_o,
                        k = m.k
                    )
                    .unwrap();
                }
            }
        }
        let profiled = self.query_count - self.skipped.len();
        let share = if profiled > 0 {
            100.0 * self.stationary_queries as f64 / profiled as f64
        } else {
            0.0
        };
        s.push_str("--\n");
        writeln!(
            s,
            "queries: {} ({} skipped); stationary queries: {} ({share:.2}%), excluded from retrieval; stationary series excluded from the store: {}",
            self.query_count,
            self.skipped.len(),
            self.stationary_queries,
            self.store_excluded_stationary
        )
        .unwrap();
        writeln!(
            s,
            "sampling: tau = {}, seed = {}",
            self.settings.tau, self.settings.seed
        )
        .unwrap();
        writeln!(
            s,
            "ranking: {}; NDCG relevance: {}",
            self.settings.ranking_key, self.settings.ndcg_relevance
        )
        .unwrap();
        s
    }
}
