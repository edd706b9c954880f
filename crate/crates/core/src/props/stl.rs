//! Single-period STL without robustness weights.

use crate::error::{Error, Result};
use crate::props::loess::{fit_at, smooth_into};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StlParams {
    pub period: usize,
    pub seasonal_span: usize,
    pub trend_span: usize,
    pub low_pass_span: usize,
    pub inner_iterations: usize,
}

fn next_odd(v: usize) -> usize {
    if v.is_multiple_of(2) {
        v + 1
    } else {
        v
    }
}

impl StlParams {
    /// Default trend and low-pass spans for a period and seasonal span.
    pub fn new(period: usize, seasonal_span: usize) -> Self {
        let trend = (1.5 * period as f64 / (1.0 - 1.5 / seasonal_span as f64)).ceil() as usize;
        Self {
            period,
            seasonal_span,
            trend_span: next_odd(trend.max(3)),
            low_pass_span: next_odd(period + 1),
            inner_iterations: 2,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.period < 2 || 2 * self.period > n {
            return Err(Error::PeriodTooLarge {
                period: self.period,
                len: n,
            });
        }
        for (name, span) in [
            ("seasonal_span", self.seasonal_span),
            ("trend_span", self.trend_span),
            ("low_pass_span", self.low_pass_span),
        ] {
            if span < 3 || span % 2 == 0 {
                return Err(Error::param(
                    name,
                    format!("{span} must be odd and at least 3"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct StlFit<T> {
    pub seasonal: Vec<T>,
    pub trend: Vec<T>,
}

fn moving_average<T: Scalar>(x: &[T], len: usize, out: &mut [T]) {
    let newn = x.len() + 1 - len;
    let flen = T::from_usize_lossy(len);
    let mut v: T = x[..len].iter().copied().sum();
    out[0] = v / flen;
    for m in 1..newn {
        v = v - x[m - 1] + x[m + len - 1];
        out[m] = v / flen;
    }
}

/// Cycle-subseries smoothing, extended by one cycle at each end.
fn seasonal_smooth<T: Scalar>(
    y: &[T],
    np: usize,
    ns: usize,
    out: &mut [T],
    sub: &mut [T],
    fit: &mut [T],
    w: &mut [T],
) {
    let n = y.len();
    for j in 0..np {
        let k = (n - j - 1) / np + 1;
        for i in 0..k {
            sub[i] = y[i * np + j];
        }
        smooth_into(&sub[..k], ns, 1, &mut fit[1..k + 1], w);
        let nright = ns.min(k);
        fit[0] = fit_at(&sub[..k], ns, 1, T::zero(), 1, nright, w).unwrap_or(fit[1]);
        let nleft = if k + 1 > ns { k + 1 - ns } else { 1 };
        fit[k + 1] =
            fit_at(&sub[..k], ns, 1, T::from_usize_lossy(k + 1), nleft, k, w).unwrap_or(fit[k]);
        for m in 0..k + 2 {
            out[m * np + j] = fit[m];
        }
    }
}

/// STL inner loop starting from a zero trend.
pub fn stl<T: Scalar>(y: &[T], params: &StlParams) -> Result<StlFit<T>> {
    let n = y.len();
    params.validate(n)?;
    let np = params.period;
    let ext = n + 2 * np;
    let mut season = vec![T::zero(); n];
    let mut trend = vec![T::zero(); n];
    let mut detrended = vec![T::zero(); n];
    let mut cycle = vec![T::zero(); ext];
    let mut ma1 = vec![T::zero(); ext];
    let mut ma2 = vec![T::zero(); ext];
    let mut low = vec![T::zero(); n];
    let mut sub = vec![T::zero(); n / np + 2];
    let mut fit = vec![T::zero(); n / np + 3];
    let mut w = vec![T::zero(); ext];

    for _ in 0..params.inner_iterations {
        for i in 0..n {
            detrended[i] = y[i] - trend[i];
        }
        seasonal_smooth(
            &detrended,
            np,
            params.seasonal_span,
            &mut cycle,
            &mut sub,
            &mut fit,
            &mut w,
        );
        // low-pass: moving averages of length p, p, 3 then LOESS
        moving_average(&cycle[..ext], np, &mut ma1);
        moving_average(&ma1[..n + np + 1], np, &mut ma2);
        moving_average(&ma2[..n + 2], 3, &mut ma1);
        smooth_into(&ma1[..n], params.low_pass_span, 1, &mut low, &mut w);
        for i in 0..n {
            season[i] = cycle[np + i] - low[i];
            detrended[i] = y[i] - season[i];
        }
        smooth_into(&detrended, params.trend_span, 1, &mut trend, &mut w);
    }
    Ok(StlFit {
        seasonal: season,
        trend,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn default_spans() {
        let p = StlParams::new(24, 11);
        assert_eq!(p.trend_span, 43);
        assert_eq!(p.low_pass_span, 25);
        let p = StlParams::new(2, 11);
        assert_eq!((p.trend_span, p.low_pass_span), (5, 3));
    }

    #[test]
    fn recovers_sine_on_ramp() {
        let y: Vec<f64> = (0..240)
            .map(|t| 0.05 * t as f64 + (2.0 * PI * t as f64 / 12.0).sin())
            .collect();
        let fit = stl(&y, &StlParams::new(12, 11)).unwrap();
        for t in 24..216 {
            assert!((fit.seasonal[t] - (2.0 * PI * t as f64 / 12.0).sin()).abs() < 0.05);
            assert!((fit.trend[t] - 0.05 * t as f64).abs() < 0.05);
        }
    }

    #[test]
    fn period_too_large() {
        assert!(matches!(
            stl(&[0.0; 10], &StlParams::new(6, 11)),
            Err(Error::PeriodTooLarge { .. })
        ));
    }
}
