//! Dense least squares and Cholesky kernels.

use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// Ordinary least squares solution.
#[derive(Clone, Debug)]
pub struct LstsqFit<T> {
    pub coef: Vec<T>,
    pub rss: T,
    /// Diagonal of (X'X)^-1, used for standard errors.
    pub xtx_inv_diag: Vec<T>,
}

/// Dot product with eight independent accumulators so the loop vectorises.
#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [T::zero(); 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut s = ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7]));
    for (&x, &y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

/// Householder QR least squares of `y` on the columns of `x`.
///
/// Columns are scaled to unit norm first so rank detection does not depend
/// on the units of the regressors. Returns `None` when the design is rank
/// deficient or underdetermined.
pub fn lstsq<T: Scalar>(x: &Mat<T>, y: &[T]) -> Option<LstsqFit<T>> {
    let (n, p) = (x.rows, x.cols);
    if n < p || p == 0 || y.len() != n {
        return None;
    }
    // column-major working copy
    let mut a: Vec<Vec<T>> = (0..p)
        .map(|j| (0..n).map(|i| x.get(i, j)).collect())
        .collect();
    let mut scale = vec![T::one(); p];
    for (j, col) in a.iter_mut().enumerate() {
        let norm = dot(col, col).sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return None;
        }
        scale[j] = norm;
        for v in col.iter_mut() {
            *v /= norm;
        }
    }
    let mut b = y.to_vec();
    let mut rdiag = vec![T::zero(); p];
    let tol = T::epsilon().sqrt();
    for k in 0..p {
        let norm = dot(&a[k][k..], &a[k][k..]).sqrt();
        // columns have unit norm, so this is a relative threshold
        if norm <= tol {
            return None;
        }
        let alpha = if a[k][k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2 = dot(&v, &v);
        rdiag[k] = alpha;
        if vnorm2 > T::zero() {
            let two = T::lit(2.0);
            for col in a.iter_mut().skip(k + 1) {
                let f = two * dot(&v, &col[k..]) / vnorm2;
                for (c, &vi) in col[k..].iter_mut().zip(&v) {
                    *c -= f * vi;
                }
            }
            let f = two * dot(&v, &b[k..]) / vnorm2;
            for (c, &vi) in b[k..].iter_mut().zip(&v) {
                *c -= f * vi;
            }
        }
        a[k][k] = alpha;
        for c in a[k][k + 1..].iter_mut() {
            *c = T::zero();
        }
    }
    // R is upper triangular with R[i][j] = a[j][i] for i < j, R[k][k] = rdiag[k]
    let r = |i: usize, j: usize| if i == j { rdiag[i] } else { a[j][i] };
    let mut coef = vec![T::zero(); p];
    for i in (0..p).rev() {
        let mut s = b[i];
        for j in i + 1..p {
            s -= r(i, j) * coef[j];
        }
        coef[i] = s / r(i, i);
    }
    let rss = dot(&b[p..], &b[p..]);
    // rows of R^-1 give diag((R'R)^-1)
    let mut rinv = vec![vec![T::zero(); p]; p];
    for j in 0..p {
        rinv[j][j] = T::one() / r(j, j);
        for i in (0..j).rev() {
            let mut s = T::zero();
            for k in i + 1..=j {
                s += r(i, k) * rinv[k][j];
            }
            rinv[i][j] = -s / r(i, i);
        }
    }
    let xtx_inv_diag = (0..p)
        .map(|i| dot(&rinv[i], &rinv[i]) / (scale[i] * scale[i]))
        .collect();
    for (c, s) in coef.iter_mut().zip(&scale) {
        *c /= *s;
    }
    if coef.iter().any(|c| !c.is_finite()) {
        return None;
    }
    Some(LstsqFit {
        coef,
        rss,
        xtx_inv_diag,
    })
}

/// Multi-output ridge regression `min |Y - X B|^2 + lambda |B|^2` by
/// Householder QR of the augmented system `[X; sqrt(lambda) I]`, which
/// stays well posed for rank-deficient `X`. `y` is `n x m`; returns the
/// `p x m` coefficients, or `None` when `lambda <= 0` and `X` is singular.
pub fn ridge<T: Scalar>(x: &Mat<T>, y: &Mat<T>, lambda: T) -> Option<Mat<T>> {
    let (n, p, m) = (x.rows, x.cols, y.cols);
    if y.rows != n || p == 0 {
        return None;
    }
    let rows = n + p;
    let sl = lambda.max(T::zero()).sqrt();
    let mut a: Vec<Vec<T>> = (0..p)
        .map(|j| {
            let mut col: Vec<T> = (0..n).map(|i| x.get(i, j)).collect();
            col.extend((0..p).map(|i| if i == j { sl } else { T::zero() }));
            col
        })
        .collect();
    let mut b: Vec<Vec<T>> = (0..m)
        .map(|c| {
            let mut col: Vec<T> = (0..n).map(|i| y.get(i, c)).collect();
            col.resize(rows, T::zero());
            col
        })
        .collect();
    let two = T::lit(2.0);
    let mut rdiag = vec![T::zero(); p];
    for k in 0..p {
        let norm = dot(&a[k][k..], &a[k][k..]).sqrt();
        if !(norm > T::zero()) {
            return None;
        }
        let alpha = if a[k][k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2 = dot(&v, &v);
        rdiag[k] = alpha;
        if vnorm2 > T::zero() {
            for col in a.iter_mut().skip(k + 1).chain(b.iter_mut()) {
                let f = two * dot(&v, &col[k..]) / vnorm2;
                for (c, &vi) in col[k..].iter_mut().zip(&v) {
                    *c -= f * vi;
                }
            }
        }
    }
    let mut coef = Mat::zeros(p, m);
    for (c, rhs) in b.iter().enumerate() {
        for i in (0..p).rev() {
            let mut s = rhs[i];
            for j in i + 1..p {
                s -= a[j][i] * coef.get(j, c);
            }
            coef.set(i, c, s / rdiag[i]);
        }
    }
    coef.data.iter().all(|v| v.is_finite()).then_some(coef)
}

const CHOL_BLOCK: usize = 64;

/// In-place lower Cholesky factor of a row-major `n x n` SPD matrix.
/// The strict upper triangle is zeroed. Returns `false` on a non-positive
/// pivot.
///
/// Right-looking blocked variant: each panel is copied into a contiguous
/// buffer so the trailing update streams short, cache-resident rows.
pub fn cholesky_in_place<T: Scalar>(a: &mut [T], n: usize) -> bool {
    debug_assert_eq!(a.len(), n * n);
    let mut panel: Vec<T> = Vec::new();
    let mut k0 = 0;
    while k0 < n {
        let k1 = (k0 + CHOL_BLOCK).min(n);
        let bw = k1 - k0;
        // factor the panel rows k0..n over columns k0..k1
        panel.clear();
        panel.resize((n - k0) * bw, T::zero());
        for i in k0..n {
            let pi = (i - k0) * bw;
            panel[pi..pi + bw].copy_from_slice(&a[i * n + k0..i * n + k1]);
        }
        for j in 0..bw {
            let pj = j * bw;
            let d = panel[pj + j] - dot(&panel[pj..pj + j], &panel[pj..pj + j]);
            if !(d > T::zero()) || !d.is_finite() {
                return false;
            }
            let d = d.sqrt();
            panel[pj + j] = d;
            for i in j + 1..n - k0 {
                let pi = i * bw;
                let s = dot(&panel[pi..pi + j], &panel[pj..pj + j]);
                panel[pi + j] = (panel[pi + j] - s) / d;
            }
        }
        for i in k0..n {
            let pi = (i - k0) * bw;
            a[i * n + k0..i * n + k1].copy_from_slice(&panel[pi..pi + bw]);
        }
        // trailing update of the lower triangle
        for i in k1..n {
            let pi = (i - k0) * bw;
            let li = &panel[pi..pi + bw];
            let row = &mut a[i * n..i * n + i + 1];
            for j in k1..=i {
                let pj = (j - k0) * bw;
                row[j] -= dot(li, &panel[pj..pj + bw]);
            }
        }
        k0 = k1;
    }
    for i in 0..n {
        for c in a[i * n + i + 1..(i + 1) * n].iter_mut() {
            *c = T::zero();
        }
    }
    true
}

/// Solves `A x = b` for SPD `A` (row-major, consumed).
pub fn solve_spd<T: Scalar>(mut a: Vec<T>, n: usize, b: &[T]) -> Option<Vec<T>> {
    if !cholesky_in_place(&mut a, n) {
        return None;
    }
    let mut z = b.to_vec();
    for i in 0..n {
        let s = dot(&a[i * n..i * n + i], &z[..i]);
        z[i] = (z[i] - s) / a[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = z[i];
        for k in i + 1..n {
            s -= a[k * n + i] * z[k];
        }
        z[i] = s / a[i * n + i];
    }
    Some(z)
}

/// `y = L z` for a lower-triangular row-major factor.
pub fn lower_mul<T: Scalar>(l: &[T], n: usize, z: &[T]) -> Vec<T> {
    (0..n)
        .map(|i| dot(&l[i * n..i * n + i + 1], &z[..i + 1]))
        .collect()
}
