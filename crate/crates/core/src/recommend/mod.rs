//! Property-based retrieval of forecaster rankings.

pub mod metrics;
pub mod pipeline;
pub mod query;
pub mod report;
pub mod retrieval;
pub mod strategy;

pub use metrics::{hit_ratio_at_k, ndcg_at_k};
pub use pipeline::{
    recommend, recommend_profiles, truth_ranking, validate, GroupRetrieval, KMetrics,
    RecommendConfig, Recommendation, SkippedQuery, Validation,
};
pub use query::{group_queries, QueryGroup};
pub use report::{interpret, top_properties, Interpretation, ModelShift, PropertyShare};
pub use retrieval::{
    draw_count, model_names, nearest_key, rank_models, sample_values, RankedModel,
};
pub use strategy::{StrategyEntry, StrategyMap};
