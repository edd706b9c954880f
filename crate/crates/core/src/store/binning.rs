//! Interval binning of profiles into 8-component property vectors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::props::PropertyProfile;

/// Upper bin edges; every interval is closed on the upper side.
pub const TREND_EDGES: [f64; 3] = [0.1, 0.5, 0.9];
pub const SEASON_STRENGTH_EDGES: [f64; 3] = [0.25, 0.5, 0.75];
pub const VOLATILITY_EDGES: [f64; 3] = [0.4, 0.6, 0.8];
pub const MEMORY_EDGES: [f64; 3] = [0.25, 0.5, 0.75];
pub const ANOMALY_EDGES: [f64; 3] = [0.05, 0.1, 0.15];

/// Version of the component order and edges above.
pub const BINNING_VERSION: u32 = 1;

/// Index of the first interval whose closed upper edge holds `v`.
pub fn bin_value(v: f64, edges: &[f64]) -> u8 {
    edges.iter().filter(|&&e| v > e).count() as u8
}

/// Property dimensions in key order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Stationarity,
    Trend,
    SeasonStrength,
    SeasonCount,
    Volatility,
    Memory,
    Scedasticity,
    Anomaly,
}

impl Dimension {
    pub const ALL: [Dimension; 8] = [
        Dimension::Stationarity,
        Dimension::Trend,
        Dimension::SeasonStrength,
        Dimension::SeasonCount,
        Dimension::Volatility,
        Dimension::Memory,
        Dimension::Scedasticity,
        Dimension::Anomaly,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Stationarity => "stationarity",
            Dimension::Trend => "trend",
            Dimension::SeasonStrength => "season_strength",
            Dimension::SeasonCount => "season_count",
            Dimension::Volatility => "volatility",
            Dimension::Memory => "memory",
            Dimension::Scedasticity => "scedasticity",
            Dimension::Anomaly => "anomaly",
        }
    }

    /// Number of bins.
    pub fn cardinality(self) -> u8 {
        match self {
            Dimension::Stationarity | Dimension::Scedasticity => 2,
            Dimension::SeasonCount => 3,
            _ => 4,
        }
    }

    /// Human-readable label of one bin.
    pub fn label(self, bin: u8) -> &'static str {
        const TREND: [&str; 4] = ["[0, 0.1]", "(0.1, 0.5]", "(0.5, 0.9]", "(0.9, 1]"];
        const QUARTER: [&str; 4] = ["[0, 0.25]", "(0.25, 0.5]", "(0.5, 0.75]", "(0.75, 1]"];
        const VOL: [&str; 4] = ["[0, 0.4]", "(0.4, 0.6]", "(0.6, 0.8]", "> 0.8"];
        const ANOM: [&str; 4] = ["[0, 0.05]", "(0.05, 0.1]", "(0.1, 0.15]", "> 0.15"];
        let b = bin as usize;
        match self {
            Dimension::Stationarity => ["Stationary", "Non-stationary"][b],
            Dimension::Trend => TREND[b],
            Dimension::SeasonStrength | Dimension::Memory => QUARTER[b],
            Dimension::SeasonCount => ["Non-seasonal", "Single-season", "Multi-season"][b],
            Dimension::Volatility => VOL[b],
            Dimension::Scedasticity => ["Homo-scedasticity", "Hetero-scedasticity"][b],
            Dimension::Anomaly => ANOM[b],
        }
    }

    /// Short description used in reports, e.g. "Strong trend".
    pub fn describe(self, bin: u8) -> String {
        const LEVEL: [&str; 4] = ["Weak", "Moderate", "Strong", "Very strong"];
        const AMOUNT: [&str; 4] = ["Low", "Moderate", "High", "Very high"];
        let b = bin as usize;
        match self {
            Dimension::Stationarity | Dimension::SeasonCount | Dimension::Scedasticity => {
                self.label(bin).to_string()
            }
            Dimension::Trend => format!("{} trend", LEVEL[b]),
            Dimension::SeasonStrength => format!("{} seasonality", LEVEL[b]),
            Dimension::Volatility => format!("{} volatility", AMOUNT[b]),
            Dimension::Memory => format!("{} memorability", AMOUNT[b]),
            Dimension::Anomaly => format!("{} anomaly", AMOUNT[b]),
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let alias = match key.as_str() {
            "stationary" => "stationarity",
            "seasonality" | "season" | "strength" => "season_strength",
            "seasons" | "count" => "season_count",
            "cv" => "volatility",
            "hurst" | "memorability" => "memory",
            "heteroscedasticity" | "arch" => "scedasticity",
            "anomalies" => "anomaly",
            k => k,
        };
        Dimension::ALL
            .into_iter()
            .find(|d| d.name() == alias)
            .ok_or_else(|| Error::param("property", format!("unknown property '{s}'")))
    }
}

/// Binned profile. Field order is the key order; the derived `Ord` is
/// lexicographic over it.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
#[serde(into = "[u8; 8]", try_from = "[u8; 8]")]
pub struct PropertyVector {
    /// 1 when the series is non-stationary.
    pub stationarity: u8,
    pub trend: u8,
    pub season_strength: u8,
    pub season_count: u8,
    pub volatility: u8,
    pub memory: u8,
    /// 1 when heteroscedastic.
    pub scedasticity: u8,
    pub anomaly: u8,
}

impl PropertyVector {
    pub fn components(&self) -> [u8; 8] {
        [
            self.stationarity,
            self.trend,
            self.season_strength,
            self.season_count,
            self.volatility,
            self.memory,
            self.scedasticity,
            self.anomaly,
        ]
    }

    pub fn from_components(c: [u8; 8]) -> Result<Self> {
        for (d, &v) in Dimension::ALL.iter().zip(&c) {
            if v >= d.cardinality() {
                return Err(Error::param(d.name(), format!("bin {v} out of range")));
            }
        }
        Ok(Self {
            stationarity: c[0],
            trend: c[1],
            season_strength: c[2],
            season_count: c[3],
            volatility: c[4],
            memory: c[5],
            scedasticity: c[6],
            anomaly: c[7],
        })
    }

    pub fn get(&self, d: Dimension) -> u8 {
        self.components()[d.index()]
    }

    pub fn is_stationary(&self) -> bool {
        self.stationarity == 0
    }

    /// L1 distance over the integer components.
    pub fn l1(&self, other: &PropertyVector) -> u32 {
        self.components()
            .iter()
            .zip(other.components())
            .map(|(&a, b)| (a as i32 - b as i32).unsigned_abs())
            .sum()
    }
}

impl From<PropertyVector> for [u8; 8] {
    fn from(v: PropertyVector) -> Self {
        v.components()
    }
}

impl TryFrom<[u8; 8]> for PropertyVector {
    type Error = Error;

    fn try_from(c: [u8; 8]) -> Result<Self> {
        PropertyVector::from_components(c)
    }
}

impl fmt::Display for PropertyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.components();
        write!(
            f,
            "({},{},{},{},{},{},{},{})",
            c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]
        )
    }
}

impl FromStr for PropertyVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 8 {
            return Err(Error::param(
                "property vector",
                format!("expected 8 components in '{s}'"),
            ));
        }
        let mut c = [0u8; 8];
        for (slot, p) in c.iter_mut().zip(&parts) {
            *slot = p
                .parse()
                .map_err(|_| Error::param("property vector", format!("bad component '{p}'")))?;
        }
        Self::from_components(c)
    }
}

pub fn bin_profile(p: &PropertyProfile) -> PropertyVector {
    PropertyVector {
        stationarity: u8::from(!p.is_stationary),
        trend: bin_value(p.trend_strength.abs(), &TREND_EDGES),
        season_strength: bin_value(p.season_strength, &SEASON_STRENGTH_EDGES),
        season_count: p.seasons.len().min(2) as u8,
        volatility: bin_value(p.volatility, &VOLATILITY_EDGES),
        memory: bin_value(p.memory, &MEMORY_EDGES),
        scedasticity: u8::from(p.is_heteroscedastic),
        anomaly: bin_value(p.anomaly_rate, &ANOMALY_EDGES),
    }
}
