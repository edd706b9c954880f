use crate::scalar::{is_constant, mean, std_dev, Scalar};
use crate::series::minmax_values;

/// One-sided z threshold for the anomaly share.
pub const ANOMALY_Z: f64 = 1.645;

/// Coefficient of variation of the min-max normalised series.
pub fn volatility_cv<T: Scalar>(x: &[T]) -> f64 {
    if x.len() < 2 || is_constant(x) {
        return 0.0;
    }
    let z = minmax_values(x);
    let m = mean(&z).as_f64();
    if !(m > 0.0) {
        return 0.0;
    }
    std_dev(&z).as_f64() / m
}

/// Share of points whose z-score exceeds 1.645 (upper tail only).
pub fn anomaly_rate<T: Scalar>(x: &[T]) -> f64 {
    if x.is_empty() || is_constant(x) {
        return 0.0;
    }
    let m = mean(x);
    let s = std_dev(x);
    if !(s > T::zero()) {
        return 0.0;
    }
    let thr = T::lit(ANOMALY_Z);
    let count = x.iter().filter(|&&v| (v - m) / s > thr).count();
    count as f64 / x.len() as f64
}
