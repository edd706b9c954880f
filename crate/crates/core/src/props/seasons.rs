use crate::props::acf::acf;
use crate::scalar::Scalar;

pub const DEFAULT_MAX_CANDIDATES: usize = 10;
pub const MIN_ACF: f64 = 0.1;

/// Detected periods, both sorted and in the order they were accepted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SeasonDetection {
    pub periods: Vec<usize>,
    pub accepted_order: Vec<usize>,
}

impl SeasonDetection {
    /// The period accepted first, i.e. the one with the strongest ACF.
    pub fn primary(&self) -> Option<usize> {
        self.accepted_order.first().copied()
    }
}

/// Multi-season detection on the ACF of the first differences.
///
/// Candidate lags are visited by descending ACF (quantised to 1e-9, ties to
/// the smaller lag); at most `max_candidates` are examined. A period is
/// accepted when it is at least 2, below `L/2`, has ACF above 0.1 and is
/// not within one step of a multiple of an accepted period.
pub fn detect_seasons_full<T: Scalar>(x: &[T], max_candidates: usize, fs: f64) -> SeasonDetection {
    let n = x.len();
    let half = n / 2;
    if n < 4 || half < 2 || !(fs > 0.0) {
        return SeasonDetection::default();
    }
    let d: Vec<T> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let max_lag = half.min(d.len() - 1);
    let r = match acf(&d, max_lag) {
        Ok(r) if !r.constant => r,
        _ => return SeasonDetection::default(),
    };
    let rv: Vec<f64> = r.values.iter().map(|v| v.as_f64()).collect();
    let mut lags: Vec<(i64, usize)> = (1..=max_lag)
        .map(|k| ((rv[k] * 1e9).round() as i64, k))
        .collect();
    lags.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut accepted: Vec<usize> = Vec::new();
    for &(_, k) in lags.iter().take(max_candidates) {
        let p = (k as f64 / fs).floor() as usize;
        if p < 2 || p >= half || p > max_lag {
            continue;
        }
        if rv[p] <= MIN_ACF {
            continue;
        }
        if accepted.iter().any(|&q| p % q < 2) {
            continue;
        }
        accepted.push(p);
    }
    let mut periods = accepted.clone();
    periods.sort_unstable();
    SeasonDetection {
        periods,
        accepted_order: accepted,
    }
}

pub fn detect_seasons<T: Scalar>(x: &[T], max_candidates: usize, fs: f64) -> Vec<usize> {
    detect_seasons_full(x, max_candidates, fs).periods
}
