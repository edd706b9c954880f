//! Per-bin, per-model mean and median error tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::props::PropertyProfile;
use crate::scalar::{median, order_free_sum};
use crate::store::binning::{bin_profile, Dimension, PropertyVector};
use crate::store::index::Store;
use crate::store::log::{LogEntry, PerfRecord};

/// MAE and MSE samples of one cell.
type Samples = (Vec<f64>, Vec<f64>);

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CellStats {
    pub n: usize,
    pub mae_mean: f64,
    pub mae_median: f64,
    pub mse_mean: f64,
    pub mse_median: f64,
}

impl CellStats {
    fn from_values(mae: &[f64], mse: &[f64]) -> Option<Self> {
        let n = mae.len();
        Some(CellStats {
            n,
            mae_mean: order_free_sum(mae) / n as f64,
            mae_median: median(mae)?,
            mse_mean: order_free_sum(mse) / n as f64,
            mse_median: median(mse)?,
        })
    }
}

/// Rows are models, columns are `Regular`, `Stationary` and the bins of
/// the property over non-stationary series. Empty cells are `None`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyTable {
    pub property: Dimension,
    pub columns: Vec<String>,
    pub models: Vec<String>,
    pub cells: Vec<Vec<Option<CellStats>>>,
}

fn columns(dim: Dimension) -> Vec<String> {
    let mut c = vec!["Regular".to_string(), "Stationary".to_string()];
    if dim == Dimension::Stationarity {
        c.push(dim.label(1).to_string());
    } else {
        c.extend((0..dim.cardinality()).map(|b| dim.label(b).to_string()));
    }
    c
}

fn column_of(dim: Dimension, v: &PropertyVector) -> usize {
    if dim == Dimension::Stationarity {
        2
    } else {
        2 + v.get(dim) as usize
    }
}

fn build<'a>(
    dim: Dimension,
    rows: impl IntoIterator<Item = (PropertyVector, &'a PerfRecord)>,
) -> Result<PropertyTable> {
    let cols = columns(dim);
    // (model, column) -> (maes, mses)
    let mut acc: BTreeMap<(&str, usize), Samples> = BTreeMap::new();
    let mut models = BTreeSet::new();
    for (v, r) in rows {
        models.insert(r.model.as_str());
        let target = if v.is_stationary() {
            1
        } else {
            column_of(dim, &v)
        };
        for c in [0, target] {
            let e = acc.entry((r.model.as_str(), c)).or_default();
            e.0.push(r.mae);
            e.1.push(r.mse);
        }
    }
    if models.is_empty() {
        return Err(Error::EmptyLog);
    }
    let cells = models
        .iter()
        .map(|m| {
            (0..cols.len())
                .map(|c| {
                    acc.get(&(*m, c))
                        .and_then(|(a, s)| CellStats::from_values(a, s))
                })
                .collect()
        })
        .collect();
    Ok(PropertyTable {
        property: dim,
        columns: cols,
        models: models.into_iter().map(String::from).collect(),
        cells,
    })
}

/// Table from raw profiles and a log; every logged series needs a profile.
pub fn aggregate_table(
    profiles: &BTreeMap<String, PropertyProfile>,
    log: &[LogEntry],
    dim: Dimension,
) -> Result<PropertyTable> {
    let mut keyed = Vec::with_capacity(log.len());
    for e in log {
        let p = profiles
            .get(&e.series_id)
            .ok_or_else(|| Error::MissingProfile(e.series_id.clone()))?;
        keyed.push((bin_profile(p), &e.record));
    }
    build(dim, keyed)
}

/// Table over the indexed (non-stationary) bags of a store.
pub fn aggregate_store_table(store: &Store, dim: Dimension) -> Result<PropertyTable> {
    build(
        dim,
        store.index.iter().flat_map(|(k, bags)| {
            bags.iter()
                .flat_map(move |b| b.records.iter().map(move |r| (*k, r)))
        }),
    )
}

impl PropertyTable {
    pub fn cell(&self, model: &str, column: &str) -> Option<CellStats> {
        let m = self.models.iter().position(|x| x == model)?;
        let c = self.columns.iter().position(|x| x == column)?;
        self.cells[m][c]
    }

    /// Long CSV, one row per (model, column); absent cells have n = 0 and
    /// empty statistics.
    pub fn to_csv(&self) -> String {
        let mut s =
            String::from("property,model,column,n,mae_mean,mae_median,mse_mean,mse_median\n");
        for (m, row) in self.models.iter().zip(&self.cells) {
            for (c, cell) in self.columns.iter().zip(row) {
                let col = if c.contains(',') {
                    format!("\"{c}\"")
                } else {
                    c.clone()
                };
                match cell {
                    Some(x) => writeln!(
                        s,
                        "{},{m},{col},{},{},{},{},{}",
                        self.property, x.n, x.mae_mean, x.mae_median, x.mse_mean, x.mse_median
                    ),
                    None => writeln!(s, "{},{m},{col},0,,,,", self.property),
                }
                .unwrap();
            }
        }
        s
    }

    /// Two markdown tables (MAE, MSE) with `mean / median` cells.
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        for (title, pick) in [("MAE", 0usize), ("MSE", 1)] {
            writeln!(s, "### {title} by {} (mean / median)\n", self.property).unwrap();
            writeln!(s, "| Model | {} |", self.columns.join(" | ")).unwrap();
            writeln!(s, "|---|{}", "---|".repeat(self.columns.len())).unwrap();
            for (m, row) in self.models.iter().zip(&self.cells) {
                let cells: Vec<String> = row
                    .iter()
                    .map(|c| match c {
                        Some(x) if pick == 0 => format!("{:.3} / {:.3}", x.mae_mean, x.mae_median),
                        Some(x) => format!("{:.3} / {:.3}", x.mse_mean, x.mse_median),
                        None => "n/a".to_string(),
                    })
                    .collect();
                writeln!(s, "| {m} | {} |", cells.join(" | ")).unwrap();
            }
            s.push('\n');
        }
        s
    }
}
