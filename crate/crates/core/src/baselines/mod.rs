//! Cheap local forecasters and the harness that scores them.

pub mod eval;
pub mod models;

pub use eval::{evaluate, evaluate_series, normalize_by_train, EvalConfig, EvalReport, EvalResult};
pub use models::{
    predict_ar, predict_hi, predict_linear_window, predict_naive_mean, predict_seasonal_naive,
    ArModel, Forecast, LinearWindowModel, ModelKind,
};
