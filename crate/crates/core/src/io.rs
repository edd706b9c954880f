//! CSV and JSONL readers/writers for series sets.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{SeriesSet, TimeSeries};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CsvLayout {
    /// One column per series, rows are timestamps.
    #[default]
    Wide,
    /// Rows of `id,value`, grouped by id in order of first appearance.
    Long,
}

fn parse_cell(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

fn records<R: Read>(reader: R) -> Result<Vec<csv::StringRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.iter().all(|c| c.is_empty()) {
            continue;
        }
        out.push(rec);
    }
    Ok(out)
}

/// A first row counts as a header when none of its cells is numeric.
fn is_header(rec: &csv::StringRecord) -> bool {
    rec.iter().all(|c| parse_cell(c).is_none())
}

pub fn read_csv(path: impl AsRef<Path>, layout: CsvLayout) -> Result<SeriesSet> {
    parse_csv(File::open(path)?, layout)
}

pub fn parse_csv<R: Read>(reader: R, layout: CsvLayout) -> Result<SeriesSet> {
    let rows = records(reader)?;
    let (header, body) = match rows.split_first() {
        Some((first, rest)) if is_header(first) => (Some(first.clone()), rest),
        _ => (None, &rows[..]),
    };
    if body.is_empty() {
        return Err(Error::EmptyInput);
    }
    match layout {
        CsvLayout::Wide => parse_wide(header, body),
        CsvLayout::Long => parse_long(body),
    }
}

fn parse_wide(header: Option<csv::StringRecord>, body: &[csv::StringRecord]) -> Result<SeriesSet> {
    let width = body
        .iter()
        .map(|r| r.len())
        .chain(header.as_ref().map(|h| h.len()))
        .max()
        .unwrap_or(0);
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); width];
    let mut ended = vec![false; width];
    for (i, rec) in body.iter().enumerate() {
        let row = i + 1;
        for col in 0..width {
            let cell = rec.get(col).unwrap_or("");
            if cell.is_empty() {
                // ragged tail: a column ends at its first empty cell
                ended[col] = true;
                continue;
            }
            let v = parse_cell(cell).ok_or_else(|| Error::Parse {
                row,
                column: col + 1,
                message: format!("non-numeric cell '{cell}'"),
            })?;
            if ended[col] {
                return Err(Error::Parse {
                    row,
                    column: col + 1,
                    message: "value after an empty cell".into(),
                });
            }
            columns[col].push(v);
        }
    }
    let mut set = SeriesSet::new();
    for (col, values) in columns.into_iter().enumerate() {
        let id = header
            .as_ref()
            .and_then(|h| h.get(col))
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .unwrap_or_else(|| format!("col{col}"));
        set.push(TimeSeries::new(id, values)?)?;
    }
    Ok(set)
}

fn parse_long(body: &[csv::StringRecord]) -> Result<SeriesSet> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: std::collections::HashMap<String, Vec<f64>> = Default::default();
    for (i, rec) in body.iter().enumerate() {
        let row = i + 1;
        if rec.len() < 2 {
            return Err(Error::Parse {
                row,
                column: rec.len() + 1,
                message: "expected id,value".into(),
            });
        }
        let id = rec.get(0).unwrap_or("").to_string();
        let cell = rec.get(rec.len() - 1).unwrap_or("");
        let v = parse_cell(cell).ok_or_else(|| Error::Parse {
            row,
            column: rec.len(),
            message: format!("non-numeric cell '{cell}'"),
        })?;
        groups
            .entry(id.clone())
            .or_insert_with(|| {
                order.push(id);
                Vec::new()
            })
            .push(v);
    }
    let mut set = SeriesSet::new();
    for id in order {
        let values = groups.remove(&id).unwrap_or_default();
        set.push(TimeSeries::new(id, values)?)?;
    }
    Ok(set)
}

/// Writes a wide CSV with a header row; shorter series leave trailing
/// cells empty.
pub fn write_csv_wide<W: Write>(set: &SeriesSet, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(set.iter().map(|s| s.id()))?;
    let rows = set.iter().map(|s| s.len()).max().unwrap_or(0);
    for i in 0..rows {
        w.write_record(
            set.iter()
                .map(|s| s.values().get(i).map(|v| v.to_string()).unwrap_or_default()),
        )?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct JsonSeries {
    id: String,
    values: Vec<f64>,
}

pub fn read_jsonl(path: impl AsRef<Path>) -> Result<SeriesSet> {
    parse_jsonl(BufReader::new(File::open(path)?))
}

pub fn parse_jsonl<R: BufRead>(reader: R) -> Result<SeriesSet> {
    let mut set = SeriesSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let js: JsonSeries = serde_json::from_str(&line).map_err(|e| Error::Parse {
            row: i + 1,
            column: e.column(),
            message: e.to_string(),
        })?;
        set.push(TimeSeries::new(js.id, js.values)?)?;
    }
    if set.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(set)
}

pub fn write_jsonl<W: Write>(set: &SeriesSet, writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    for s in set {
        let line = serde_json::to_string(&JsonSeries {
            id: s.id().to_string(),
            values: s.values().to_vec(),
        })?;
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

/// Picks JSONL for `.jsonl`/`.json` paths, CSV otherwise.
pub fn read_series(path: impl AsRef<Path>, layout: CsvLayout) -> Result<SeriesSet> {
    let path = path.as_ref();
    match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl") | Some("json") => read_jsonl(path),
        _ => read_csv(path, layout),
    }
}

pub fn write_series(path: impl AsRef<Path>, set: &SeriesSet) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl") | Some("json") => write_jsonl(set, file),
        _ => write_csv_wide(set, BufWriter::new(file)),
    }
}

/// Writes one JSON object per line.
pub fn write_json_lines<W: Write, S: Serialize>(items: &[S], writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    for item in items {
        writeln!(w, "{}", serde_json::to_string(item)?)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_json_lines<S: for<'de> Deserialize<'de>>(path: impl AsRef<Path>) -> Result<Vec<S>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            row: i + 1,
            column: e.column(),
            message: e.to_string(),
        })?);
    }
    Ok(out)
}
