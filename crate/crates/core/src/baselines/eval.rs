//! Sliding-window evaluation over the test segment.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::models::{
    predict_hi, predict_naive_mean, predict_seasonal_naive, ArModel, LinearWindowModel, ModelKind,
    DEFAULT_AR_ORDER, DEFAULT_RIDGE,
};
use crate::error::{Error, Result};
use crate::props::detect_seasons_full;
use crate::scalar::{mean, std_dev, Scalar};
use crate::series::{SeriesSet, SplitSpec, TimeSeries};
use crate::store::{LogEntry, PerfRecord};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub models: Vec<ModelKind>,
    pub spec: SplitSpec,
    pub ar_order: usize,
    /// Linear-window lookback; defaults to the history length.
    pub lookback: Option<usize>,
    pub ridge: f64,
}

impl EvalConfig {
    pub fn new(models: Vec<ModelKind>, spec: SplitSpec) -> Self {
        Self {
            models,
            spec,
            ar_order: DEFAULT_AR_ORDER,
            lookback: None,
            ridge: DEFAULT_RIDGE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub series_id: String,
    pub model: String,
    pub mae: f64,
    pub mse: f64,
    pub window_count: usize,
    /// Set when a fallback produced some or all forecasts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub results: Vec<EvalResult>,
    pub skipped: Vec<(String, String)>,
}

impl EvalReport {
    pub fn log_entries(&self) -> Vec<LogEntry> {
        self.results
            .iter()
            .map(|r| LogEntry {
                series_id: r.series_id.clone(),
                record: PerfRecord {
                    model: r.model.clone(),
                    mae: r.mae,
                    mse: r.mse,
                },
            })
            .collect()
    }
}

/// A model prepared on the train segment of one series.
enum Prepared<T> {
    Hi,
    NaiveMean,
    SeasonalNaive(usize),
    Ar(Option<ArModel<T>>),
    Linear(Option<LinearWindowModel<T>>),
}

impl<T: Scalar> Prepared<T> {
    fn new(kind: ModelKind, train: &[T], cfg: &EvalConfig) -> (Self, Option<&'static str>) {
        let spec = &cfg.spec;
        match kind {
            ModelKind::Hi => (Prepared::Hi, None),
            ModelKind::NaiveMean => (Prepared::NaiveMean, None),
            ModelKind::SeasonalNaive => {
                let det =
                    detect_seasons_full(train, crate::props::seasons::DEFAULT_MAX_CANDIDATES, 1.0);
                match det.accepted_order.iter().find(|&&p| p <= spec.history_len) {
                    Some(&p) => (Prepared::SeasonalNaive(p), None),
                    None => (Prepared::SeasonalNaive(1), Some("period_1")),
                }
            }
            ModelKind::Ar => match ArModel::fit(train, cfg.ar_order) {
                Ok(m) => (Prepared::Ar(Some(m)), None),
                Err(_) => (Prepared::Ar(None), Some("naive_mean")),
            },
            ModelKind::Linear => {
                let w = cfg.lookback.unwrap_or(spec.history_len);
                match LinearWindowModel::fit(train, w, spec.horizon, cfg.ridge) {
                    Ok(m) => (Prepared::Linear(Some(m)), None),
                    Err(_) => (Prepared::Linear(None), Some("hi")),
                }
            }
        }
    }

    /// Forecast from `history` alone; the flag marks a per-window fallback.
    fn forecast(&self, history: &[T], f: usize) -> Result<(Vec<T>, bool)> {
        let fc = match self {
            Prepared::Hi => predict_hi(history, f)?,
            Prepared::NaiveMean => predict_naive_mean(history, f),
            Prepared::SeasonalNaive(p) => predict_seasonal_naive(history, f, *p)?,
            Prepared::Ar(Some(m)) => m.forecast(history, f)?,
            Prepared::Ar(None) => predict_naive_mean(history, f),
            Prepared::Linear(Some(m)) => m.forecast(history)?,
            Prepared::Linear(None) => predict_hi(history, f)?,
        };
        if fc.iter().all(|v| v.is_finite()) {
            Ok((fc, false))
        } else {
            Ok((predict_naive_mean(history, f), true))
        }
    }
}

/// Z-scores the series with its train-segment mean and standard deviation.
pub fn normalize_by_train<T: Scalar>(x: &[T], train_len: usize) -> Vec<T> {
    let train = &x[..train_len.min(x.len())];
    let mu = mean(train);
    let sd = std_dev(train);
    let sd = if sd > T::zero() && sd.is_finite() {
        sd
    } else {
        T::one()
    };
    x.iter().map(|&v| (v - mu) / sd).collect()
}

pub fn evaluate_series<T: Scalar>(
    series: &TimeSeries<T>,
    cfg: &EvalConfig,
) -> Result<Vec<EvalResult>> {
    let spec = &cfg.spec;
    let n = series.len();
    let starts = spec.test_window_starts(n);
    if starts.is_empty() {
        return Err(Error::TooShort {
            required: spec.history_len + spec.horizon,
            actual: n,
        });
    }
    let (train_len, _, _) = spec.segment_lengths(n);
    let x = normalize_by_train(series.values(), train_len);
    let train = &x[..train_len];
    let (h, f) = (spec.history_len, spec.horizon);
    cfg.models
        .iter()
        .map(|&kind| {
            let (model, mut fallback) = Prepared::new(kind, train, cfg);
            let mut maes = Vec::with_capacity(starts.len());
            let mut mses = Vec::with_capacity(starts.len());
            for &s in &starts {
                let (fc, fell_back) = model.forecast(&x[s - h..s], f)?;
                if fell_back {
                    fallback.get_or_insert("naive_mean");
                }
                let (mut a, mut q) = (0.0, 0.0);
                for (p, y) in fc.iter().zip(&x[s..s + f]) {
                    let e = (*p - *y).as_f64();
                    a += e.abs();
                    q += e * e;
                }
                maes.push(a / f as f64);
                mses.push(q / f as f64);
            }
            let k = starts.len() as f64;
            Ok(EvalResult {
                series_id: series.id().to_string(),
                model: kind.name().to_string(),
                mae: maes.iter().sum::<f64>() / k,
                mse: mses.iter().sum::<f64>() / k,
                window_count: starts.len(),
                fallback: fallback.map(String::from),
            })
        })
        .collect()
}

/// Every model on every series; series that cannot be evaluated are
/// skipped and reported.
pub fn evaluate<T: Scalar>(set: &SeriesSet<T>, cfg: &EvalConfig) -> Result<EvalReport> {
    cfg.spec.validate()?;
    if cfg.models.is_empty() {
        return Err(Error::param("models", "no models selected"));
    }
    let per: Vec<(String, Result<Vec<EvalResult>>)> = set
        .as_slice()
        .par_iter()
        .map(|s| (s.id().to_string(), evaluate_series(s, cfg)))
        .collect();
    let mut report = EvalReport::default();
    for (id, r) in per {
        match r {
            Ok(mut v) => report.results.append(&mut v),
            Err(e) => report.skipped.push((id, e.to_string())),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn sine_series(id: &str, n: usize) -> TimeSeries {
        TimeSeries::new(
            id,
            (1..=n)
                .map(|t| (2.0 * PI * t as f64 / 24.0).sin())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn hi_exact_on_period_multiple() {
        let spec = SplitSpec::new((0.7, 0.1, 0.2), 336, 336, 24).unwrap();
        let set = SeriesSet::from_series(vec![sine_series("s", 3360)]).unwrap();
        let rep = evaluate(
            &set,
            &EvalConfig::new(vec![ModelKind::Hi, ModelKind::NaiveMean], spec),
        )
        .unwrap();
        let hi = &rep.results[0];
        assert!(hi.mae < 1e-9, "{}", hi.mae);
        // train std of a unit sine is 1/sqrt(2), so the z-scored amplitude is sqrt(2)
        let nm = &rep.results[1];
        assert!((nm.mae / 2f64.sqrt() - 2.0 / PI).abs() < 0.02, "{}", nm.mae);
    }

    #[test]
    fn row_count_conserved() {
        let spec = SplitSpec::new((0.7, 0.1, 0.2), 336, 96, 8).unwrap();
        let short = TimeSeries::new("short", vec![0.0, 1.0, 2.0]).unwrap();
        let set =
            SeriesSet::from_series(vec![sine_series("a", 1024), short, sine_series("b", 1024)])
                .unwrap();
        let rep = evaluate(&set, &EvalConfig::new(ModelKind::ALL.to_vec(), spec)).unwrap();
        assert_eq!(rep.results.len(), 5 * 2);
        assert_eq!(rep.skipped.len(), 1);
        let sn = rep
            .results
            .iter()
            .find(|r| r.model == "SeasonalNaive")
            .unwrap();
        let nm = rep.results.iter().find(|r| r.model == "NaiveMean").unwrap();
        assert!(sn.mae < nm.mae);
        assert!(rep.log_entries().iter().all(|e| e.record.mae >= 0.0));
    }

    #[test]
    fn forecasts_never_see_the_future() {
        let spec = SplitSpec::new((0.7, 0.1, 0.2), 336, 96, 1).unwrap();
        let base = sine_series("c", 1024);
        let cfg = EvalConfig::new(ModelKind::ALL.to_vec(), spec);
        let (train_len, _, _) = spec.segment_lengths(1024);
        let sentinel = 1e6;
        for &start in spec.test_window_starts(1024).iter().step_by(37) {
            let mut v = base.values().to_vec();
            for x in &mut v[start..] {
                *x = sentinel;
            }
            let x = normalize_by_train(&v, train_len);
            let z = (sentinel - mean(&base.values()[..train_len]))
                / std_dev(&base.values()[..train_len]);
            for kind in ModelKind::ALL {
                let (m, _) = Prepared::new(kind, &x[..train_len], &cfg);
                let (fc, _) = m.forecast(&x[start - 336..start], 96).unwrap();
                assert!(
                    fc.iter().all(|p| (p - z).abs() > 1.0 && p.abs() < 100.0),
                    "{kind}"
                );
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn mae_squared_bounded_by_mse(vals in proptest::collection::vec(-50.0f64..50.0, 200..260)) {
            let spec = SplitSpec::new((0.6, 0.2, 0.2), 48, 12, 3).unwrap();
            let set = SeriesSet::from_series(vec![TimeSeries::new("p", vals).unwrap()]).unwrap();
            let rep = evaluate(&set, &EvalConfig::new(ModelKind::ALL.to_vec(), spec)).unwrap();
            for r in &rep.results {
                prop_assert!(r.mae * r.mae <= r.mse + 1e-12);
                prop_assert!(r.mae.is_finite() && r.mse.is_finite());
            }
        }
    }
}
