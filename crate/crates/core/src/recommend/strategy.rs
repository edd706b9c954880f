//! Property-to-modeling-strategy relations, shipped as versioned data.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::store::Dimension;

const BUNDLED: &str = include_str!("../../data/strategy_map.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyEntry {
    pub property: Dimension,
    pub granularity: String,
    pub bins: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub adopt: Vec<String>,
    pub avoid: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyMap {
    pub version: u32,
    pub vocabulary: Vec<String>,
    pub entries: Vec<StrategyEntry>,
}

impl StrategyMap {
    pub fn bundled() -> StrategyMap {
        StrategyMap::from_json(BUNDLED).expect("bundled strategy map is valid")
    }

    pub fn from_json(s: &str) -> Result<StrategyMap> {
        let m: StrategyMap =
            serde_json::from_str(s).map_err(|e| Error::InvalidStrategyMap(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let vocab: BTreeSet<&str> = self.vocabulary.iter().map(String::as_str).collect();
        for e in &self.entries {
            for s in e.adopt.iter().chain(&e.avoid) {
                if !vocab.contains(s.as_str()) {
                    return Err(Error::InvalidStrategyMap(format!(
                        "'{s}' is not in the vocabulary"
                    )));
                }
            }
            if let Some(b) = e.bins.iter().find(|&&b| b >= e.property.cardinality()) {
                return Err(Error::InvalidStrategyMap(format!(
                    "bin {b} out of range for {}",
                    e.property
                )));
            }
        }
        Ok(())
    }

    /// Entries that apply to one bin of one property, in file order.
    pub fn matching(&self, dim: Dimension, bin: u8) -> impl Iterator<Item = &StrategyEntry> {
        self.entries
            .iter()
            .filter(move |e| e.property == dim && e.bins.contains(&bin))
    }
}
