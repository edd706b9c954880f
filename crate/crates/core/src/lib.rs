//! Time-series property profiling, synthetic data generation and
//! property-indexed forecaster recommendation.

// NaN-rejecting comparisons and index loops over matrices are intended
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]
#![cfg_attr(test, allow(clippy::approx_constant))]

pub mod baselines;
pub mod error;
pub mod io;
pub mod linalg;
pub mod props;
pub mod recommend;
pub mod scalar;
pub mod series;
pub mod store;
pub mod synth;

pub use error::{Error, Result};
pub use props::{profile, ProfileConfig, ProfileRecord, PropertyProfile};
pub use recommend::{recommend, RecommendConfig, Recommendation};
pub use scalar::Scalar;
pub use series::{SeriesSet, SplitSpec, TimeSeries};
pub use store::{LogEntry, PerfRecord, PropertyVector, Store};
pub use synth::{generate_dataset, SynthConfig};

pub type Series = series::TimeSeries<f64>;
pub type Dataset = series::SeriesSet<f64>;
pub type Decomposition = props::Decomposition<f64>;
pub type Forecast = baselines::Forecast<f64>;
pub type ArModel = baselines::ArModel<f64>;
pub type LinearWindowModel = baselines::LinearWindowModel<f64>;
pub type Matrix = linalg::Mat<f64>;
