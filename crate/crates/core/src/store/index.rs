//! Property-keyed performance store.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::props::PropertyProfile;
use crate::scalar::order_free_sum;
use crate::store::binning::{bin_profile, PropertyVector, BINNING_VERSION};
use crate::store::log::{LogEntry, PerfRecord};

pub const STORE_SCHEMA: &str = "tsprops.store";
pub const STORE_VERSION: u32 = 1;

/// All records of one stored series, sorted by model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bag {
    pub series_id: String,
    pub records: Vec<PerfRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub mean_mae: f64,
    pub mean_mse: f64,
    pub count: usize,
}

/// Per-model means over a set of records, summed order-independently.
pub fn summarize<'a>(
    records: impl IntoIterator<Item = &'a PerfRecord>,
) -> BTreeMap<String, ModelSummary> {
    let mut acc: BTreeMap<&str, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in records {
        let e = acc.entry(r.model.as_str()).or_default();
        e.0.push(r.mae);
        e.1.push(r.mse);
    }
    acc.into_iter()
        .map(|(m, (mae, mse))| {
            let n = mae.len();
            (
                m.to_string(),
                ModelSummary {
                    mean_mae: order_free_sum(&mae) / n as f64,
                    mean_mse: order_free_sum(&mse) / n as f64,
                    count: n,
                },
            )
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Store {
    pub config_hash: String,
    pub model_universe: BTreeSet<String>,
    pub index: BTreeMap<PropertyVector, Vec<Bag>>,
    /// Logged series left out of the index because they are stationary.
    pub excluded_stationary: usize,
    /// Per-model means over every logged series, stationary ones included.
    pub regular: BTreeMap<String, ModelSummary>,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    key: PropertyVector,
    bags: Vec<Bag>,
}

#[derive(Serialize, Deserialize)]
struct StoreFile {
    schema: String,
    version: u32,
    binning_version: u32,
    config_hash: String,
    model_universe: BTreeSet<String>,
    excluded_stationary: usize,
    regular: BTreeMap<String, ModelSummary>,
    entries: Vec<Entry>,
}

impl Store {
    /// Keys every logged series by its binned profile. Stationary series are
    /// only counted.
    pub fn build(
        profiles: &BTreeMap<String, PropertyProfile>,
        log: &[LogEntry],
        config_hash: impl Into<String>,
    ) -> Result<Store> {
        if log.is_empty() {
            return Err(Error::EmptyLog);
        }
        let mut by_series: BTreeMap<&str, Vec<PerfRecord>> = BTreeMap::new();
        for e in log {
            by_series
                .entry(e.series_id.as_str())
                .or_default()
                .push(e.record.clone());
        }
        let mut index: BTreeMap<PropertyVector, Vec<Bag>> = BTreeMap::new();
        let mut excluded = 0;
        for (&id, records) in &by_series {
            let p = profiles
                .get(id)
                .ok_or_else(|| Error::MissingProfile(id.to_string()))?;
            if p.is_stationary {
                excluded += 1;
                continue;
            }
            let mut records = records.clone();
            records.sort_by(|a, b| a.model.cmp(&b.model));
            index.entry(bin_profile(p)).or_default().push(Bag {
                series_id: id.to_string(),
                records,
            });
        }
        Ok(Store {
            config_hash: config_hash.into(),
            model_universe: log.iter().map(|e| e.record.model.clone()).collect(),
            index,
            excluded_stationary: excluded,
            regular: summarize(log.iter().map(|e| &e.record)),
        })
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn bag_count(&self) -> usize {
        self.index.values().map(Vec::len).sum()
    }

    pub fn to_writer<W: Write>(&self, writer: W) -> Result<()> {
        let file = StoreFile {
            schema: STORE_SCHEMA.into(),
            version: STORE_VERSION,
            binning_version: BINNING_VERSION,
            config_hash: self.config_hash.clone(),
            model_universe: self.model_universe.clone(),
            excluded_stationary: self.excluded_stationary,
            regular: self.regular.clone(),
            entries: self
                .index
                .iter()
                .map(|(k, v)| Entry {
                    key: *k,
                    bags: v.clone(),
                })
                .collect(),
        };
        serde_json::to_writer_pretty(writer, &file)?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.to_writer(&mut buf)?;
        Ok(String::from_utf8(buf).expect("json is utf-8"))
    }

    pub fn from_json(s: &str) -> Result<Store> {
        let v: serde_json::Value = serde_json::from_str(s)?;
        let schema = v.get("schema").and_then(|s| s.as_str()).unwrap_or_default();
        let version = v
            .get("version")
            .and_then(|s| s.as_u64())
            .unwrap_or_default();
        if schema != STORE_SCHEMA {
            return Err(Error::UnsupportedStore(format!("schema '{schema}'")));
        }
        if version != STORE_VERSION as u64 {
            return Err(Error::UnsupportedStore(format!("version {version}")));
        }
        let file: StoreFile = serde_json::from_value(v)?;
        if file.binning_version != BINNING_VERSION {
            return Err(Error::UnsupportedStore(format!(
                "binning version {}",
                file.binning_version
            )));
        }
        let mut index = BTreeMap::new();
        for e in file.entries {
            if e.bags.is_empty() {
                return Err(Error::UnsupportedStore(format!(
                    "key {} has no bags",
                    e.key
                )));
            }
            for b in &e.bags {
                if b.records.is_empty()
                    || b.records
                        .iter()
                        .any(|r| !file.model_universe.contains(&r.model))
                {
                    return Err(Error::UnsupportedStore(format!(
                        "bag '{}' is inconsistent",
                        b.series_id
                    )));
                }
            }
            index.insert(e.key, e.bags);
        }
        Ok(Store {
            config_hash: file.config_hash,
            model_universe: file.model_universe,
            index,
            excluded_stationary: file.excluded_stationary,
            regular: file.regular,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.to_writer(&mut f)?;
        f.write_all(b"\n")?;
        f.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Store> {
        Store::from_json(&std::fs::read_to_string(path)?)
    }
}
