//! Gaussian-process prior sampling on the unit-interval grid.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{cholesky_in_place, lower_mul};
use crate::scalar::Scalar;
use crate::synth::kernel::CompositeKernel;

pub const MAX_JITTER: f64 = 1e-2;

/// Row-major covariance on `t_i = i / length`, without jitter.
pub fn build_covariance<T: Scalar>(k: &CompositeKernel, length: usize) -> Vec<T> {
    let n = length;
    let t: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
    let mut cov = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = T::lit(k.eval(t[i], t[j]));
            cov[i * n + j] = v;
            cov[j * n + i] = v;
        }
    }
    cov
}

/// Lower Cholesky factor of `cov + jitter I`, escalating the jitter by 10x
/// up to `MAX_JITTER`. Returns the factor and the jitter that succeeded.
pub fn factor_with_jitter<T: Scalar>(cov: &[T], n: usize, jitter: f64) -> Result<(Vec<T>, f64)> {
    let diagonal = (0..n).all(|i| (0..i).all(|j| cov[i * n + j] == T::zero()));
    let mut jit = jitter;
    loop {
        if diagonal {
            // the factor of a diagonal matrix is its elementwise square root
            let mut l = vec![T::zero(); n * n];
            let ok = (0..n).all(|i| {
                let d = cov[i * n + i] + T::lit(jit);
                l[i * n + i] = d.sqrt();
                d > T::zero() && d.is_finite()
            });
            if ok {
                return Ok((l, jit));
            }
            return Err(Error::NotPositiveDefinite { jitter: jit });
        }
        let mut a = cov.to_vec();
        for i in 0..n {
            a[i * n + i] += T::lit(jit);
        }
        if cholesky_in_place(&mut a, n) {
            return Ok((a, jit));
        }
        let next = jit * 10.0;
        if next > MAX_JITTER * (1.0 + 1e-9) {
            return Err(Error::NotPositiveDefinite { jitter: jit });
        }
        jit = next;
    }
}

/// One GP sample path plus the jitter used to factor its covariance.
#[derive(Clone, Debug)]
pub struct GpSample<T> {
    pub values: Vec<T>,
    pub jitter: f64,
}

/// `x = chol(K + jitter I) z` with `z` drawn from `rng`.
pub fn sample_gp<T: Scalar, R: Rng + ?Sized>(
    k: &CompositeKernel,
    length: usize,
    jitter: f64,
    rng: &mut R,
) -> Result<GpSample<T>> {
    if length < 2 {
        return Err(Error::param("length", "must be at least 2"));
    }
    let cov = build_covariance::<T>(k, length);
    let (l, used) = factor_with_jitter(&cov, length, jitter)?;
    let z: Vec<T> = (0..length)
        .map(|_| {
            let v: f64 = StandardNormal.sample(rng);
            T::lit(v)
        })
        .collect();
    Ok(GpSample {
        values: lower_mul(&l, length, &z),
        jitter: used,
    })
}
