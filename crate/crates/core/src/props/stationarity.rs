use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{lstsq, Mat};
use crate::props::acf::acf_convergent;
use crate::scalar::{is_constant, mean, Scalar};

pub const MIN_LEN: usize = 32;
pub const KPSS_CRITICAL_5PCT: f64 = 0.463;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    /// t-statistic of the lagged level; `None` when the design was singular.
    pub statistic: Option<f64>,
    pub critical_value: f64,
    pub lags: usize,
    pub reject_unit_root: bool,
}

impl AdfResult {
    pub fn singular(&self) -> bool {
        self.statistic.is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KpssResult {
    pub statistic: f64,
    pub lags: usize,
    pub reject_stationarity: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationarityReport {
    pub adf: AdfResult,
    pub kpss: KpssResult,
    pub acf_convergent: bool,
    pub stationary: bool,
}

fn check_len(n: usize) -> Result<()> {
    if n < MIN_LEN {
        return Err(Error::TooShort {
            required: MIN_LEN,
            actual: n,
        });
    }
    Ok(())
}

/// 5% critical value of the constant-only Dickey-Fuller t statistic.
pub fn adf_critical_5pct(nobs: usize) -> f64 {
    let t = nobs as f64;
    -2.8621 - 2.738 / t - 8.36 / (t * t)
}

/// Augmented Dickey-Fuller test, constant term only, Schwert lag rule.
pub fn adf_test<T: Scalar>(x: &[T]) -> Result<AdfResult> {
    let n = x.len();
    check_len(n)?;
    let mut p = (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize;
    // nobs = n - 1 - p, params = p + 2
    while p > 0 && (n - 1 - p) < p + 2 + 10 {
        p -= 1;
    }
    let dy: Vec<T> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let nobs = n - 1 - p;
    let crit = adf_critical_5pct(nobs);
    let singular = AdfResult {
        statistic: None,
        critical_value: crit,
        lags: p,
        reject_unit_root: false,
    };
    if is_constant(x) || nobs < p + 2 {
        return Ok(singular);
    }
    // row r is time t = p + 1 + r (0-based into x); dy index t - 1
    let design = Mat::from_fn(nobs, p + 2, |r, c| {
        let t = p + 1 + r;
        match c {
            0 => T::one(),
            1 => x[t - 1],
            j => dy[t - 1 - (j - 1)],
        }
    });
    let target: Vec<T> = (0..nobs).map(|r| dy[p + r]).collect();
    let Some(fit) = lstsq(&design, &target) else {
        return Ok(singular);
    };
    let dof = (nobs - (p + 2)) as f64;
    let sigma2 = fit.rss.as_f64() / dof;
    let se = (sigma2 * fit.xtx_inv_diag[1].as_f64()).sqrt();
    if !(se > 0.0) || !se.is_finite() {
        return Ok(singular);
    }
    let stat = fit.coef[1].as_f64() / se;
    Ok(AdfResult {
        statistic: Some(stat),
        critical_value: crit,
        lags: p,
        reject_unit_root: stat < crit,
    })
}

/// Level-stationarity KPSS test with a Bartlett long-run variance.
pub fn kpss_test<T: Scalar>(x: &[T]) -> Result<KpssResult> {
    let n = x.len();
    check_len(n)?;
    let lags = ((4.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize).min(n - 1);
    if is_constant(x) {
        return Ok(KpssResult {
            statistic: 0.0,
            lags,
            reject_stationarity: false,
        });
    }
    let m = mean(x);
    let e: Vec<f64> = x.iter().map(|&v| (v - m).as_f64()).collect();
    let nf = n as f64;
    let mut s = 0.0;
    let mut eta = 0.0;
    for &v in &e {
        s += v;
        eta += s * s;
    }
    eta /= nf * nf;
    let mut lrv = e.iter().map(|v| v * v).sum::<f64>() / nf;
    for k in 1..=lags {
        let gamma: f64 = e[k..]
            .iter()
            .zip(&e[..n - k])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / nf;
        lrv += 2.0 * (1.0 - k as f64 / (lags as f64 + 1.0)) * gamma;
    }
    let statistic = if lrv > 0.0 { eta / lrv } else { 0.0 };
    Ok(KpssResult {
        statistic,
        lags,
        reject_stationarity: statistic > KPSS_CRITICAL_5PCT,
    })
}

/// Stationary iff ADF rejects a unit root, KPSS does not reject level
/// stationarity and the ACF converges.
pub fn stationarity<T: Scalar>(x: &[T]) -> Result<StationarityReport> {
    let adf = adf_test(x)?;
    let kpss = kpss_test(x)?;
    let conv = acf_convergent(x);
    Ok(StationarityReport {
        adf,
        kpss,
        acf_convergent: conv,
        stationary: adf.reject_unit_root && !kpss.reject_stationarity && conv,
    })
}

pub fn is_stationary<T: Scalar>(x: &[T]) -> Result<bool> {
    Ok(stationarity(x)?.stationary)
}
