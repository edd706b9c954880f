use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::linalg::{lstsq, Mat};
use crate::scalar::{mean, Scalar};

pub const SIGNIFICANCE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchLmResult {
    /// `n * R^2`; `None` when the auxiliary regression was singular.
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub lags: usize,
    pub heteroscedastic: bool,
}

impl ArchLmResult {
    pub fn singular(&self) -> bool {
        self.statistic.is_none()
    }
}

/// Lag order used by the profiler: `min(12, floor(L/20))`, at least 1.
pub fn default_lags(len: usize, max_lags: usize) -> usize {
    (len / 20).min(max_lags).max(1)
}

/// Engle's LM test: regress `e_t^2` on a constant and `q` of its lags.
pub fn arch_lm_test<T: Scalar>(residual: &[T], lags: usize) -> Result<ArchLmResult> {
    let n = residual.len();
    if lags == 0 {
        return Err(Error::param("lags", "must be positive"));
    }
    if n < lags + 10 {
        return Err(Error::TooShort {
            required: lags + 10,
            actual: n,
        });
    }
    let singular = ArchLmResult {
        statistic: None,
        p_value: None,
        lags,
        heteroscedastic: false,
    };
    let sq: Vec<f64> = residual.iter().map(|e| e.as_f64() * e.as_f64()).collect();
    let nobs = n - lags;
    let design = Mat::from_fn(
        nobs,
        lags + 1,
        |r, c| if c == 0 { 1.0 } else { sq[lags + r - c] },
    );
    let target = &sq[lags..];
    let m = mean(target);
    let tss: f64 = target.iter().map(|v| (v - m) * (v - m)).sum();
    if !(tss > 0.0) {
        return Ok(singular);
    }
    let Some(fit) = lstsq(&design, target) else {
        return Ok(singular);
    };
    let r2 = (1.0 - fit.rss / tss).clamp(0.0, 1.0);
    let lm = nobs as f64 * r2;
    let chi = ChiSquared::new(lags as f64).map_err(|e| Error::param("lags", e.to_string()))?;
    let p = 1.0 - chi.cdf(lm);
    Ok(ArchLmResult {
        statistic: Some(lm),
        p_value: Some(p),
        lags,
        heteroscedastic: p <= SIGNIFICANCE,
    })
}
