use crate::scalar::{min_max, Scalar};

/// Relative tolerance under which two observations count as tied.
pub const TIE_TOLERANCE: f64 = 1e-10;

/// Mann-Kendall tau, `S / (n(n-1)/2)`.
///
/// Differences within `TIE_TOLERANCE * range` are ties, so equal values
/// stay tied after an affine transform of the series.
pub fn mann_kendall<T: Scalar>(x: &[T]) -> f64 {
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let (lo, hi) = min_max(x);
    let tol = T::lit(TIE_TOLERANCE) * (hi - lo);
    let mut s: i64 = 0;
    for i in 0..n - 1 {
        let xi = x[i];
        for &xj in &x[i + 1..] {
            let d = xj - xi;
            if d > tol {
                s += 1;
            } else if d < -tol {
                s -= 1;
            }
        }
    }
    let pairs = (n as f64) * (n as f64 - 1.0) / 2.0;
    s as f64 / pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn monotone_series() {
        let up: Vec<f64> = (0..50).map(|i| (i as f64).powi(2)).collect();
        assert_eq!(mann_kendall(&up), 1.0);
        let down: Vec<f64> = up.iter().rev().copied().collect();
        assert_eq!(mann_kendall(&down), -1.0);
        assert_eq!(mann_kendall(&[4.0_f32; 10]), 0.0);
    }

    #[test]
    fn sinusoid_anchor() {
        let x: Vec<f64> = (1..=336)
            .map(|t| (2.0 * std::f64::consts::PI * t as f64 / 24.0).sin())
            .collect();
        let tau = mann_kendall(&x);
        assert!((tau.abs() - 0.035).abs() < 0.02, "{tau}");
    }

    #[test]
    fn brute_force_small() {
        let x = [3.0, 1.0, 2.0, 2.0, 5.0];
        // pairs: (3,1)- (3,2)- (3,2)- (3,5)+ (1,2)+ (1,2)+ (1,5)+ (2,2)0 (2,5)+ (2,5)+
        assert!((mann_kendall(&x) - 3.0 / 10.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn bounded_and_affine_invariant(v in proptest::collection::vec(-100.0f64..100.0, 3..60), a in 0.01f64..100.0, b in -100.0f64..100.0) {
            let tau = mann_kendall(&v);
            prop_assert!((-1.0..=1.0).contains(&tau));
            let w: Vec<f64> = v.iter().map(|x| a * x + b).collect();
            prop_assert_eq!(mann_kendall(&w), tau);
        }
    }
}
