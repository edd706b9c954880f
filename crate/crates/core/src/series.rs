//! Series containers, temporal splitting and windowing.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{min_max, Scalar};

/// A finite real-valued sequence with an identifier. Length is at least 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries<T = f64> {
    id: String,
    values: Vec<T>,
}

impl<T: Scalar> TimeSeries<T> {
    pub fn new(id: impl Into<String>, values: Vec<T>) -> Result<Self> {
        let id = id.into();
        if values.len() < 2 {
            return Err(Error::InvalidSeries {
                id,
                reason: format!("length {} < 2", values.len()),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries {
                id,
                reason: format!("non-finite value at index {pos}"),
            });
        }
        Ok(Self { id, values })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Converts the element type, e.g. `f64` to `f32`.
    pub fn cast<U: Scalar>(&self) -> TimeSeries<U> {
        TimeSeries {
            id: self.id.clone(),
            values: self.values.iter().map(|v| U::lit(v.as_f64())).collect(),
        }
    }
}

impl<T> AsRef<[T]> for TimeSeries<T> {
    fn as_ref(&self) -> &[T] {
        &self.values
    }
}

/// Ordered collection of series with unique ids.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesSet<T = f64> {
    series: Vec<TimeSeries<T>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl<T: Scalar> SeriesSet<T> {
    pub fn new() -> Self {
        Self {
            series: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn from_series(series: Vec<TimeSeries<T>>) -> Result<Self> {
        let mut set = Self::new();
        for s in series {
            set.push(s)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, series: TimeSeries<T>) -> Result<()> {
        if self.series.iter().any(|s| s.id == series.id) {
            return Err(Error::DuplicateId(series.id));
        }
        self.series.push(series);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&TimeSeries<T>> {
        self.series.iter().find(|s| s.id == id)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, TimeSeries<T>> {
        self.series.iter()
    }

    pub fn as_slice(&self) -> &[TimeSeries<T>] {
        &self.series
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }
}

impl<'a, T> IntoIterator for &'a SeriesSet<T> {
    type Item = &'a TimeSeries<T>;
    type IntoIter = std::slice::Iter<'a, TimeSeries<T>>;

    fn into_iter(self) -> Self::IntoIter {
        self.series.iter()
    }
}

/// Temporal split ratios plus the window geometry used downstream.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_ratio: f64,
    pub val_ratio: f64,
    pub test_ratio: f64,
    pub history_len: usize,
    pub horizon: usize,
    pub stride: usize,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_ratio: 0.7,
            val_ratio: 0.1,
            test_ratio: 0.2,
            history_len: 336,
            horizon: 336,
            stride: 1,
        }
    }
}

impl SplitSpec {
    pub fn new(
        ratios: (f64, f64, f64),
        history_len: usize,
        horizon: usize,
        stride: usize,
    ) -> Result<Self> {
        let spec = Self {
            train_ratio: ratios.0,
            val_ratio: ratios.1,
            test_ratio: ratios.2,
            history_len,
            horizon,
            stride,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let ratios = [self.train_ratio, self.val_ratio, self.test_ratio];
        if ratios.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::InvalidSplit(format!(
                "ratios {ratios:?} outside [0,1]"
            )));
        }
        let sum: f64 = ratios.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSplit(format!(
                "ratios sum to {sum}, expected 1"
            )));
        }
        if self.history_len == 0 || self.horizon == 0 || self.stride == 0 {
            return Err(Error::InvalidSplit(
                "history_len, horizon and stride must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Segment lengths (train, val, test) for a series of length `len`.
    /// Floor arithmetic; the remainder goes to test.
    pub fn segment_lengths(&self, len: usize) -> (usize, usize, usize) {
        let train = (len as f64 * self.train_ratio).floor() as usize;
        let val = (len as f64 * self.val_ratio).floor() as usize;
        let train = train.min(len);
        let val = val.min(len - train);
        (train, val, len - train - val)
    }

    /// Index of the first test point.
    pub fn test_start(&self, len: usize) -> usize {
        let (train, val, _) = self.segment_lengths(len);
        train + val
    }

    /// Forecast start offsets of every window whose horizon lies inside the
    /// test segment. History may extend back into train/val.
    pub fn test_window_starts(&self, len: usize) -> Vec<usize> {
        let first = self.test_start(len).max(self.history_len);
        if len < self.horizon || first + self.horizon > len {
            return Vec::new();
        }
        (first..=len - self.horizon).step_by(self.stride).collect()
    }
}

fn segment<T: Scalar>(
    series: &TimeSeries<T>,
    suffix: &str,
    range: std::ops::Range<usize>,
) -> Result<TimeSeries<T>> {
    let len = range.len();
    TimeSeries::new(
        format!("{}/{suffix}", series.id),
        series.values[range].to_vec(),
    )
    .map_err(|_| {
        Error::InvalidSplit(format!(
            "{suffix} segment of '{}' has {len} points",
            series.id
        ))
    })
}

/// Contiguous train/val/test segments in temporal order.
pub fn split<T: Scalar>(
    series: &TimeSeries<T>,
    spec: &SplitSpec,
) -> Result<(TimeSeries<T>, TimeSeries<T>, TimeSeries<T>)> {
    spec.validate()?;
    let l = series.len();
    let need = spec.history_len + spec.horizon;
    if l < need {
        return Err(Error::TooShort {
            required: need,
            actual: l,
        });
    }
    let (a, b, _) = spec.segment_lengths(l);
    Ok((
        segment(series, "train", 0..a)?,
        segment(series, "val", a..a + b)?,
        segment(series, "test", a + b..l)?,
    ))
}

/// Like [`split`], but also requires every segment to hold at least one
/// full window of `history_len + horizon` points.
pub fn split_for_windows<T: Scalar>(
    series: &TimeSeries<T>,
    spec: &SplitSpec,
) -> Result<(TimeSeries<T>, TimeSeries<T>, TimeSeries<T>)> {
    let parts = split(series, spec)?;
    let need = spec.history_len + spec.horizon;
    for part in [&parts.0, &parts.1, &parts.2] {
        if part.len() < need {
            return Err(Error::TooShort {
                required: need,
                actual: part.len(),
            });
        }
    }
    Ok(parts)
}

/// A (history, future) pair borrowed from a series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window<'a, T> {
    pub offset: usize,
    pub history: &'a [T],
    pub future: &'a [T],
}

pub fn window_count(len: usize, history_len: usize, horizon: usize, stride: usize) -> usize {
    if stride == 0 || history_len + horizon > len {
        return 0;
    }
    (len - history_len - horizon) / stride + 1
}

pub fn sliding_windows<T: Scalar>(
    series: &TimeSeries<T>,
    history_len: usize,
    horizon: usize,
    stride: usize,
) -> Result<Vec<Window<'_, T>>> {
    if history_len == 0 || horizon == 0 || stride == 0 {
        return Err(Error::param(
            "window",
            "history_len, horizon and stride must be positive",
        ));
    }
    let l = series.len();
    if history_len + horizon > l {
        return Err(Error::TooShort {
            required: history_len + horizon,
            actual: l,
        });
    }
    let x = series.values();
    Ok((0..window_count(l, history_len, horizon, stride))
        .map(|i| {
            let offset = i * stride;
            Window {
                offset,
                history: &x[offset..offset + history_len],
                future: &x[offset + history_len..offset + history_len + horizon],
            }
        })
        .collect())
}

/// Affine map onto [0,1]; a constant series maps to all 0.5.
pub fn minmax_normalize<T: Scalar>(series: &TimeSeries<T>) -> TimeSeries<T> {
    TimeSeries {
        id: series.id.clone(),
        values: minmax_values(series.values()),
    }
}

pub(crate) fn minmax_values<T: Scalar>(x: &[T]) -> Vec<T> {
    let (lo, hi) = min_max(x);
    let range = hi - lo;
    if !(range > T::zero()) {
        return vec![T::lit(0.5); x.len()];
    }
    x.iter()
        .map(|&v| ((v - lo) / range).max(T::zero()).min(T::one()))
        .collect()
}

/// The `history_len` points immediately before the test segment: the
/// segment a stored series is profiled on.
pub fn history_before_test<T: Scalar>(
    series: &TimeSeries<T>,
    spec: &SplitSpec,
) -> Result<TimeSeries<T>> {
    let start = spec.test_start(series.len());
    if start < spec.history_len {
        return Err(Error::TooShort {
            required: spec.history_len,
            actual: start,
        });
    }
    TimeSeries::new(
        series.id.clone(),
        series.values[start - spec.history_len..start].to_vec(),
    )
}

/// Histories of all test windows (with the split's stride), ids suffixed by
/// the forecast start offset.
pub fn test_window_histories<T: Scalar>(
    series: &TimeSeries<T>,
    spec: &SplitSpec,
) -> Vec<TimeSeries<T>> {
    spec.test_window_starts(series.len())
        .into_iter()
        .map(|start| TimeSeries {
            id: format!("{}@{start}", series.id),
            values: series.values[start - spec.history_len..start].to_vec(),
        })
        .collect()
}
