//! Multi-seasonal decomposition by iterated STL.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::props::loess::loess_fraction;
use crate::props::stl::{stl, StlParams};
use crate::scalar::{variance, Scalar};

/// LOESS span (fraction of the series) for the trend when no period is given.
pub const TREND_ONLY_FRACTION: f64 = 2.0 / 3.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition<T = f64> {
    pub periods: Vec<usize>,
    pub seasonals: Vec<Vec<T>>,
    pub trend: Vec<T>,
    pub residual: Vec<T>,
}

impl<T: Scalar> Decomposition<T> {
    /// Elementwise sum of all seasonal components.
    pub fn seasonal_sum(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.trend.len()];
        for s in &self.seasonals {
            for (o, v) in out.iter_mut().zip(s) {
                *o += *v;
            }
        }
        out
    }

    /// Largest `|x - trend - sum(S) - residual|`.
    pub fn reconstruction_error(&self, x: &[T]) -> T {
        let s = self.seasonal_sum();
        x.iter()
            .enumerate()
            .map(|(i, &v)| (v - self.trend[i] - s[i] - self.residual[i]).abs())
            .fold(T::zero(), T::max)
    }
}

/// Seasonal LOESS span of the `i`-th period (0-based, ascending order).
pub fn seasonal_span(i: usize) -> usize {
    7 + 4 * (i + 1)
}

pub fn mstl_decompose<T: Scalar>(x: &[T], periods: &[usize]) -> Result<Decomposition<T>> {
    let n = x.len();
    if n < 4 {
        return Err(Error::TooShort {
            required: 4,
            actual: n,
        });
    }
    for (i, &p) in periods.iter().enumerate() {
        if p < 2 || 2 * p > n {
            return Err(Error::PeriodTooLarge { period: p, len: n });
        }
        if i > 0 && periods[i - 1] >= p {
            return Err(Error::param("periods", "must be strictly ascending"));
        }
    }
    if periods.is_empty() {
        let trend = loess_fraction(x, TREND_ONLY_FRACTION);
        let residual = x.iter().zip(&trend).map(|(&v, &t)| v - t).collect();
        return Ok(Decomposition {
            periods: Vec::new(),
            seasonals: Vec::new(),
            trend,
            residual,
        });
    }

    let iterations = if periods.len() == 1 { 1 } else { 2 };
    let mut seasonals = vec![vec![T::zero(); n]; periods.len()];
    let mut deseason = x.to_vec();
    let mut trend = vec![T::zero(); n];
    for _ in 0..iterations {
        for (j, &p) in periods.iter().enumerate() {
            for (d, s) in deseason.iter_mut().zip(&seasonals[j]) {
                *d += *s;
            }
            let fit = stl(&deseason, &StlParams::new(p, seasonal_span(j)))?;
            for (d, s) in deseason.iter_mut().zip(&fit.seasonal) {
                *d -= *s;
            }
            seasonals[j] = fit.seasonal;
            trend = fit.trend;
        }
    }
    let mut decomp = Decomposition {
        periods: periods.to_vec(),
        seasonals,
        trend,
        residual: Vec::new(),
    };
    let s = decomp.seasonal_sum();
    decomp.residual = (0..n).map(|i| x[i] - decomp.trend[i] - s[i]).collect();
    Ok(decomp)
}

/// `max(0, 1 - var(R) / var(R + sum S))` with population variances.
pub fn season_strength<T: Scalar>(d: &Decomposition<T>) -> f64 {
    if d.seasonals.is_empty() {
        return 0.0;
    }
    let s = d.seasonal_sum();
    let rs: Vec<T> = d.residual.iter().zip(&s).map(|(&r, &v)| r + v).collect();
    let denom = variance(&rs).as_f64();
    if !(denom > 0.0) {
        return 0.0;
    }
    let v = 1.0 - variance(&d.residual).as_f64() / denom;
    v.clamp(0.0, 1.0)
}
