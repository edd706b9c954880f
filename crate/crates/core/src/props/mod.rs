//! Statistical property profile of a single series.

pub mod acf;
pub mod arch;
pub mod dispersion;
pub mod hurst;
pub mod loess;
pub mod mstl;
pub mod seasons;
pub mod stationarity;
pub mod stl;
pub mod trend;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scalar::{is_constant, Scalar};
use crate::series::{SeriesSet, TimeSeries};

pub use acf::{acf, acf_convergent, Acf};
pub use arch::{arch_lm_test, ArchLmResult};
pub use dispersion::{anomaly_rate, volatility_cv};
pub use hurst::{hurst, hurst_rs, HurstEstimate};
pub use mstl::{mstl_decompose, season_strength, Decomposition};
pub use seasons::{detect_seasons, detect_seasons_full, SeasonDetection};
pub use stationarity::{
    adf_test, is_stationary, kpss_test, stationarity, AdfResult, KpssResult, StationarityReport,
};
pub use trend::mann_kendall;

pub const MIN_PROFILE_LEN: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileConfig {
    pub max_candidates: usize,
    pub sampling_freq: f64,
    pub arch_max_lags: usize,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self {
            max_candidates: seasons::DEFAULT_MAX_CANDIDATES,
            sampling_freq: 1.0,
            arch_max_lags: 12,
        }
    }
}

impl ProfileConfig {
    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        config_hash(self)
    }
}

/// Hex SHA-256 of any serialisable configuration.
pub fn config_hash<S: Serialize>(config: &S) -> String {
    let json = serde_json::to_vec(config).expect("config serialises");
    hex::encode(Sha256::digest(&json))
}

/// The seven properties of one series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyProfile {
    pub is_stationary: bool,
    /// Mann-Kendall tau in [-1, 1]; binning uses the magnitude.
    pub trend_strength: f64,
    pub seasons: Vec<usize>,
    /// Strongest detected period, if any.
    #[serde(default)]
    pub primary_season: Option<usize>,
    pub season_strength: f64,
    pub volatility: f64,
    pub memory: f64,
    pub is_heteroscedastic: bool,
    pub anomaly_rate: f64,
    /// Degenerate-case notes such as `constant`, `adf_singular`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

/// A profile plus the id it belongs to and the config it was computed with;
/// one line of the profile export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub id: String,
    pub config_hash: String,
    #[serde(flatten)]
    pub profile: PropertyProfile,
}

pub fn profile<T: Scalar>(x: &[T], config: &ProfileConfig) -> Result<PropertyProfile> {
    let n = x.len();
    if n < MIN_PROFILE_LEN {
        return Err(Error::TooShort {
            required: MIN_PROFILE_LEN,
            actual: n,
        });
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::param(
            "series",
            format!("non-finite value at index {i}"),
        ));
    }
    let mut flags = Vec::new();
    if is_constant(x) {
        flags.push("constant".to_string());
    }
    let st = stationarity(x)?;
    if st.adf.singular() {
        flags.push("adf_singular".into());
    }
    let tau = mann_kendall(x);
    let det = detect_seasons_full(x, config.max_candidates, config.sampling_freq);
    let decomp = mstl_decompose(x, &det.periods)?;
    let strength = season_strength(&decomp);
    let volatility = volatility_cv(x);
    let h = hurst_rs(x);
    if h.degenerate {
        flags.push("hurst_degenerate".into());
    }
    let lags = arch::default_lags(n, config.arch_max_lags);
    let arch = arch_lm_test(&decomp.residual, lags)?;
    if arch.singular() {
        flags.push("arch_singular".into());
    }
    Ok(PropertyProfile {
        is_stationary: st.stationary,
        trend_strength: tau,
        primary_season: det.primary(),
        seasons: det.periods,
        season_strength: strength,
        volatility,
        memory: h.value,
        is_heteroscedastic: arch.heteroscedastic,
        anomaly_rate: anomaly_rate(x),
        flags,
    })
}

pub fn profile_series<T: Scalar>(
    series: &TimeSeries<T>,
    config: &ProfileConfig,
) -> Result<PropertyProfile> {
    profile(series.values(), config)
}

/// Profiles every series in parallel; results keep the input order.
pub fn profile_set<T: Scalar>(
    set: &SeriesSet<T>,
    config: &ProfileConfig,
) -> Vec<(String, Result<PropertyProfile>)> {
    set.as_slice()
        .par_iter()
        .map(|s| (s.id().to_string(), profile_series(s, config)))
        .collect()
}
