//! Performance logs: `series_id,model,mae,mse` CSV.

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LOG_HEADER: [&str; 4] = ["series_id", "model", "mae", "mse"];

/// One model's error on one series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerfRecord {
    pub model: String,
    pub mae: f64,
    pub mse: f64,
}

/// A log row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub series_id: String,
    #[serde(flatten)]
    pub record: PerfRecord,
}

pub fn ingest_log(path: impl AsRef<Path>) -> Result<Vec<LogEntry>> {
    parse_log(std::fs::File::open(path)?)
}

pub fn parse_log<R: Read>(reader: R) -> Result<Vec<LogEntry>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != LOG_HEADER {
        return Err(Error::Parse {
            row: 0,
            column: 1,
            message: format!("header must be exactly {}", LOG_HEADER.join(",")),
        });
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec?;
        if rec.len() != 4 {
            return Err(Error::Parse {
                row,
                column: rec.len().min(4) + 1,
                message: format!("expected 4 fields, got {}", rec.len()),
            });
        }
        let metric = |col: usize| -> Result<f64> {
            rec[col].parse::<f64>().map_err(|_| Error::Parse {
                row,
                column: col + 1,
                message: format!("'{}' is not a number", &rec[col]),
            })
        };
        let (series_id, model) = (rec[0].to_string(), rec[1].to_string());
        if series_id.is_empty() || model.is_empty() {
            return Err(Error::Parse {
                row,
                column: if series_id.is_empty() { 1 } else { 2 },
                message: "empty field".into(),
            });
        }
        let (mae, mse) = (metric(2)?, metric(3)?);
        if !(mae >= 0.0 && mse >= 0.0 && mae.is_finite() && mse.is_finite()) {
            return Err(Error::NegativeMetric { series_id, model });
        }
        if !seen.insert((series_id.clone(), model.clone())) {
            return Err(Error::DuplicateMeasurement { series_id, model });
        }
        out.push(LogEntry {
            series_id,
            record: PerfRecord { model, mae, mse },
        });
    }
    Ok(out)
}

pub fn write_log<W: Write>(entries: &[LogEntry], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(LOG_HEADER)?;
    for e in entries {
        w.write_record([
            e.series_id.as_str(),
            e.record.model.as_str(),
            &e.record.mae.to_string(),
            &e.record.mse.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
