//! Tricube LOESS on an integer grid, as used inside STL.

use crate::scalar::Scalar;

/// Local fit at abscissa `xs` (1-based) using points `nleft..=nright`.
/// `w` is scratch of at least `y.len()`. Returns `None` when every weight
/// vanishes.
pub(crate) fn fit_at<T: Scalar>(
    y: &[T],
    span: usize,
    degree: usize,
    xs: T,
    nleft: usize,
    nright: usize,
    w: &mut [T],
) -> Option<T> {
    let n = y.len();
    let range = T::from_usize_lossy(n) - T::one();
    let mut h = (xs - T::from_usize_lossy(nleft)).max(T::from_usize_lossy(nright) - xs);
    if span > n {
        h += T::from_usize_lossy((span - n) / 2);
    }
    let h9 = T::lit(0.999) * h;
    let h1 = T::lit(0.001) * h;
    let mut a = T::zero();
    for j in nleft - 1..nright {
        w[j] = T::zero();
        let r = (T::from_usize_lossy(j + 1) - xs).abs();
        if r <= h9 {
            w[j] = if r <= h1 {
                T::one()
            } else {
                let q = r / h;
                let c = T::one() - q * q * q;
                c * c * c
            };
            a += w[j];
        }
    }
    if a <= T::zero() {
        return None;
    }
    for wj in &mut w[nleft - 1..nright] {
        *wj /= a;
    }
    if h > T::zero() && degree > 0 {
        let mut center = T::zero();
        for j in nleft - 1..nright {
            center += w[j] * T::from_usize_lossy(j + 1);
        }
        let mut c = T::zero();
        for j in nleft - 1..nright {
            let d = T::from_usize_lossy(j + 1) - center;
            c += w[j] * d * d;
        }
        if c.sqrt() > T::lit(0.001) * range {
            let b = (xs - center) / c;
            for j in nleft - 1..nright {
                w[j] *= b * (T::from_usize_lossy(j + 1) - center) + T::one();
            }
        }
    }
    let mut out = T::zero();
    for j in nleft - 1..nright {
        out += w[j] * y[j];
    }
    Some(out)
}

/// Smooths `y` at every index with a window of `span` points.
pub(crate) fn smooth_into<T: Scalar>(
    y: &[T],
    span: usize,
    degree: usize,
    out: &mut [T],
    w: &mut [T],
) {
    let n = y.len();
    if n < 2 {
        if n == 1 {
            out[0] = y[0];
        }
        return;
    }
    if span >= n {
        for i in 0..n {
            out[i] = fit_at(y, span, degree, T::from_usize_lossy(i + 1), 1, n, w).unwrap_or(y[i]);
        }
        return;
    }
    let half = span.div_ceil(2);
    let mut nleft = 1;
    let mut nright = span;
    for i in 0..n {
        if i + 1 > half && nright != n {
            nleft += 1;
            nright += 1;
        }
        out[i] = fit_at(
            y,
            span,
            degree,
            T::from_usize_lossy(i + 1),
            nleft,
            nright,
            w,
        )
        .unwrap_or(y[i]);
    }
}

/// Degree-1 LOESS smooth with a window of `span` points.
pub fn loess<T: Scalar>(y: &[T], span: usize) -> Vec<T> {
    let mut out = vec![T::zero(); y.len()];
    let mut w = vec![T::zero(); y.len()];
    smooth_into(y, span.max(2), 1, &mut out, &mut w);
    out
}

/// Degree-1 LOESS where the window is a fraction of the series length.
pub fn loess_fraction<T: Scalar>(y: &[T], frac: f64) -> Vec<T> {
    let span = (frac * y.len() as f64).ceil() as usize;
    loess(y, span)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_is_fixed_point() {
        let y: Vec<f64> = (0..100).map(|i| 3.0 + 0.5 * i as f64).collect();
        for span in [3, 7, 50, 150] {
            let s = loess(&y, span);
            for (a, b) in s.iter().zip(&y) {
                assert!((a - b).abs() < 1e-9, "span {span}");
            }
        }
    }

    #[test]
    fn constant_is_fixed_point() {
        let s = loess(&[2.0_f32; 20], 5);
        assert!(s.iter().all(|v| (v - 2.0).abs() < 1e-5));
    }

    #[test]
    fn smooths_noise() {
        let y: Vec<f64> = (0..200)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let s = loess(&y, 21);
        assert!(s[20..180].iter().all(|v| v.abs() < 0.1));
    }
}
