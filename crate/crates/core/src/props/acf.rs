use crate::error::{Error, Result};
use crate::scalar::{is_constant, mean, Scalar};

/// Sample autocorrelation for lags `0..=max_lag`.
#[derive(Clone, Debug, PartialEq)]
pub struct Acf<T> {
    pub values: Vec<T>,
    /// Set when the input had no variance; every lag beyond 0 is then zero.
    pub constant: bool,
}

impl<T: Scalar> Acf<T> {
    pub fn at(&self, lag: usize) -> T {
        self.values[lag]
    }
}

/// Biased (divide-by-L) autocorrelation of the mean-centred series.
pub fn acf<T: Scalar>(x: &[T], max_lag: usize) -> Result<Acf<T>> {
    let n = x.len();
    if max_lag >= n {
        return Err(Error::param(
            "max_lag",
            format!("{max_lag} must be below the length {n}"),
        ));
    }
    let mut values = vec![T::zero(); max_lag + 1];
    values[0] = T::one();
    if is_constant(x) {
        return Ok(Acf {
            values,
            constant: true,
        });
    }
    let m = mean(x);
    let c: Vec<T> = x.iter().map(|&v| v - m).collect();
    let c0: T = c.iter().map(|&v| v * v).sum();
    for (k, out) in values.iter_mut().enumerate().skip(1) {
        let mut s = T::zero();
        for (a, b) in c[..n - k].iter().zip(&c[k..]) {
            s += *a * *b;
        }
        *out = s / c0;
    }
    Ok(Acf {
        values,
        constant: false,
    })
}

/// True when at least 95% of lags in `[ceil(L/10), L/2]` fall inside the
/// white-noise band `1.96 / sqrt(L)`.
pub fn acf_convergent<T: Scalar>(x: &[T]) -> bool {
    let n = x.len();
    if n < 4 {
        return false;
    }
    let hi = n / 2;
    let lo = n.div_ceil(10).max(1);
    let r = match acf(x, hi) {
        Ok(r) => r,
        Err(_) => return false,
    };
    if lo > hi {
        return false;
    }
    let band = T::lit(1.96) / T::from_usize_lossy(n).sqrt();
    let inside = (lo..=hi).filter(|&k| r.values[k].abs() < band).count();
    let total = hi - lo + 1;
    inside as f64 >= 0.95 * total as f64
}
