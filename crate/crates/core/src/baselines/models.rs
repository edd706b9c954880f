//! Local forecasters. Every forecast sees only a history slice.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{lstsq, ridge, Mat};
use crate::scalar::{mean, Scalar};

pub const DEFAULT_AR_ORDER: usize = 8;
pub const DEFAULT_RIDGE: f64 = 1e-3;
/// Training windows the linear model needs.
pub const MIN_TRAIN_WINDOWS: usize = 10;

pub fn predict_hi<T: Scalar>(history: &[T], f: usize) -> Result<Vec<T>> {
    if history.len() < f {
        return Err(Error::HistoryTooShort {
            required: f,
            actual: history.len(),
        });
    }
    Ok(history[history.len() - f..].to_vec())
}

pub fn predict_naive_mean<T: Scalar>(history: &[T], f: usize) -> Vec<T> {
    if history.is_empty() {
        return vec![T::zero(); f];
    }
    vec![mean(history); f]
}

/// `forecast[t] = history[h - period + (t mod period)]`.
pub fn predict_seasonal_naive<T: Scalar>(history: &[T], f: usize, period: usize) -> Result<Vec<T>> {
    let h = history.len();
    if period == 0 || h < period {
        return Err(Error::HistoryTooShort {
            required: period.max(1),
            actual: h,
        });
    }
    Ok((0..f).map(|t| history[h - period + t % period]).collect())
}

/// `x_t = c + sum_i phi_i x_{t-i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArModel<T> {
    pub intercept: T,
    pub phi: Vec<T>,
}

impl<T: Scalar> ArModel<T> {
    pub fn fit(x: &[T], p: usize) -> Result<Self> {
        let need = 3 * p + 10;
        if p == 0 || x.len() < need {
            return Err(Error::HistoryTooShort {
                required: need,
                actual: x.len(),
            });
        }
        let rows = x.len() - p;
        let design = Mat::from_fn(
            rows,
            p + 1,
            |r, c| if c == 0 { T::one() } else { x[p + r - c] },
        );
        let fit = lstsq(&design, &x[p..]).ok_or(Error::SingularRegression)?;
        Ok(Self {
            intercept: fit.coef[0],
            phi: fit.coef[1..].to_vec(),
        })
    }

    /// Recursive multi-step forecast.
    pub fn forecast(&self, history: &[T], f: usize) -> Result<Vec<T>> {
        let p = self.phi.len();
        if history.len() < p {
            return Err(Error::HistoryTooShort {
                required: p,
                actual: history.len(),
            });
        }
        let mut buf: Vec<T> = history[history.len() - p..].to_vec();
        for _ in 0..f {
            let n = buf.len();
            let mut v = self.intercept;
            for (i, &c) in self.phi.iter().enumerate() {
                v += c * buf[n - 1 - i];
            }
            buf.push(v);
        }
        Ok(buf.split_off(p))
    }
}

/// A forecast and whether a fallback model produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Forecast<T> {
    pub values: Vec<T>,
    pub fallback: Option<&'static str>,
}

/// AR(p) fitted on the history itself; a singular fit falls back to the
/// history mean.
pub fn predict_ar<T: Scalar>(history: &[T], f: usize, p: usize) -> Result<Forecast<T>> {
    match ArModel::fit(history, p) {
        Ok(m) => {
            let values = m.forecast(history, f)?;
            if values.iter().all(|v| v.is_finite()) {
                Ok(Forecast {
                    values,
                    fallback: None,
                })
            } else {
                Ok(Forecast {
                    values: predict_naive_mean(history, f),
                    fallback: Some("naive_mean"),
                })
            }
        }
        Err(Error::SingularRegression) => Ok(Forecast {
            values: predict_naive_mean(history, f),
            fallback: Some("naive_mean"),
        }),
        Err(e) => Err(e),
    }
}

/// Direct multi-output ridge map from the last `w` values (plus an
/// intercept) to the next `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearWindowModel<T> {
    pub lookback: usize,
    pub horizon: usize,
    /// `(w + 1) x f`, intercept row first.
    pub coef: Mat<T>,
}

impl<T: Scalar> LinearWindowModel<T> {
    pub fn fit(x: &[T], w: usize, f: usize, lambda: f64) -> Result<Self> {
        let available = (x.len() + 1).saturating_sub(w + f);
        if w == 0 || f == 0 || available < MIN_TRAIN_WINDOWS {
            return Err(Error::InsufficientWindows {
                required: MIN_TRAIN_WINDOWS,
                available,
            });
        }
        let xs = Mat::from_fn(available, w + 1, |r, c| {
            if c == 0 {
                T::one()
            } else {
                x[r + c - 1]
            }
        });
        let ys = Mat::from_fn(available, f, |r, c| x[r + w + c]);
        let coef = ridge(&xs, &ys, T::lit(lambda)).ok_or(Error::SingularRegression)?;
        Ok(Self {
            lookback: w,
            horizon: f,
            coef,
        })
    }

    pub fn forecast(&self, history: &[T]) -> Result<Vec<T>> {
        let w = self.lookback;
        if history.len() < w {
            return Err(Error::HistoryTooShort {
                required: w,
                actual: history.len(),
            });
        }
        let last = &history[history.len() - w..];
        Ok((0..self.horizon)
            .map(|c| {
                let mut v = self.coef.get(0, c);
                for (i, &xi) in last.iter().enumerate() {
                    v += self.coef.get(i + 1, c) * xi;
                }
                v
            })
            .collect())
    }
}

/// Ridge window model trained on the history's own windows; too few
/// windows falls back to HI.
pub fn predict_linear_window<T: Scalar>(
    history: &[T],
    f: usize,
    w: usize,
    lambda: f64,
) -> Result<Forecast<T>> {
    match LinearWindowModel::fit(history, w, f, lambda) {
        Ok(m) => Ok(Forecast {
            values: m.forecast(history)?,
            fallback: None,
        }),
        Err(Error::InsufficientWindows { .. }) | Err(Error::SingularRegression) => Ok(Forecast {
            values: predict_hi(history, f)?,
            fallback: Some("hi"),
        }),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelKind {
    Hi,
    NaiveMean,
    SeasonalNaive,
    Ar,
    Linear,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Hi,
        ModelKind::NaiveMean,
        ModelKind::SeasonalNaive,
        ModelKind::Ar,
        ModelKind::Linear,
    ];

    /// Name written to performance logs.
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Hi => "HI",
            ModelKind::NaiveMean => "NaiveMean",
            ModelKind::SeasonalNaive => "SeasonalNaive",
            ModelKind::Ar => "AR",
            ModelKind::Linear => "Linear",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s
            .trim()
            .to_ascii_lowercase()
            .replace(['-', '_'], "")
            .as_str()
        {
            "hi" => Ok(ModelKind::Hi),
            "naive" | "naivemean" | "mean" => Ok(ModelKind::NaiveMean),
            "snaive" | "seasonalnaive" => Ok(ModelKind::SeasonalNaive),
            "ar" => Ok(ModelKind::Ar),
            "linear" | "linearwindow" => Ok(ModelKind::Linear),
            _ => Err(Error::param("model", format!("unknown model '{s}'"))),
        }
    }
}
