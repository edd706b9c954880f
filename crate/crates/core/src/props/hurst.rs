use crate::scalar::{mean, std_dev, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HurstEstimate {
    pub value: f64,
    /// Set when the estimate fell back to 0.5 (constant input or too few
    /// usable window sizes).
    pub degenerate: bool,
}

/// Window sizes `floor(10^(1 + k/4))` below `L - 1`, plus `L` itself.
pub fn window_sizes(n: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    if n < 3 {
        return vec![n];
    }
    let top = ((n - 1) as f64).log10();
    let mut k = 0;
    loop {
        let e = 1.0 + 0.25 * k as f64;
        if e >= top {
            break;
        }
        sizes.push(10f64.powf(e).floor() as usize);
        k += 1;
    }
    sizes.push(n);
    sizes
}

fn rescaled_range<T: Scalar>(chunk: &[T]) -> Option<f64> {
    let s = std_dev(chunk).as_f64();
    if !(s > 0.0) {
        return None;
    }
    let m = mean(chunk);
    let mut z = T::zero();
    let (mut lo, mut hi) = (T::zero(), T::zero());
    for &v in chunk {
        z += v - m;
        lo = lo.min(z);
        hi = hi.max(z);
    }
    Some((hi - lo).as_f64() / s)
}

/// Rescaled-range Hurst exponent: slope of `ln E[R/S]` on `ln size` over
/// non-overlapping windows, clamped to `[0, 1]`.
pub fn hurst_rs<T: Scalar>(x: &[T]) -> HurstEstimate {
    let fallback = HurstEstimate {
        value: 0.5,
        degenerate: true,
    };
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for size in window_sizes(x.len()) {
        if size < 2 {
            continue;
        }
        let rs: Vec<f64> = x.chunks_exact(size).filter_map(rescaled_range).collect();
        if rs.is_empty() {
            continue;
        }
        let m = rs.iter().sum::<f64>() / rs.len() as f64;
        if m > 0.0 {
            lx.push((size as f64).ln());
            ly.push(m.ln());
        }
    }
    if lx.len() < 2 {
        return fallback;
    }
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if !(sxx > 0.0) {
        return fallback;
    }
    HurstEstimate {
        value: (sxy / sxx).clamp(0.0, 1.0),
        degenerate: false,
    }
}

pub fn hurst<T: Scalar>(x: &[T]) -> f64 {
    hurst_rs(x).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn grid() {
        assert_eq!(window_sizes(336), vec![10, 17, 31, 56, 100, 177, 316, 336]);
    }

    #[test]
    fn sinusoid_anchor() {
        let x: Vec<f64> = (1..=336)
            .map(|t| (2.0 * std::f64::consts::PI * t as f64 / 24.0).sin())
            .collect();
        let h = hurst(&x);
        assert!((h - 0.289).abs() < 0.15, "{h}");
    }

    #[test]
    fn white_noise_near_half() {
        let hs: Vec<f64> = (0..20).map(|s| hurst(&noise(s, 4096))).collect();
        let m = hs.iter().sum::<f64>() / 20.0;
        assert!((m - 0.5).abs() < 0.1, "{m}");
    }

    #[test]
    fn random_walk_persistent() {
        for s in 0..20 {
            let walk: Vec<f64> = noise(s, 4096)
                .into_iter()
                .scan(0.0, |a, v| {
                    *a += v;
                    Some(*a)
                })
                .collect();
            assert!(hurst(&walk) > 0.85);
        }
    }

    #[test]
    fn constant_falls_back() {
        let h = hurst_rs(&[1.0; 100]);
        assert_eq!(h.value, 0.5);
        assert!(h.degenerate);
    }
}
