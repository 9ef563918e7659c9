//! Dense linear algebra for the decomposition and regression kernels.
//!
//! Deliberately small: a row-major matrix, a one-sided Jacobi SVD (full
//! spectrum, optional singular vectors), and Householder QR least squares
//! with column pivoting. All routines are generic over [`Scalar`] and are
//! tuned for the desk-scale matrices this crate sees (hundreds of rows or
//! columns), not for BLAS-class throughput.

use crate::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        assert_eq!(data.len(), rows * cols, "data length must equal rows * cols");
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        assert!(!rows.is_empty(), "matrix needs at least one row");
        let nrows = rows.len();
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let data = rows.into_iter().flatten().collect();
        Mat::from_vec(nrows, cols, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Mat::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Mat<T> {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + aik * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "vector length must equal column count");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// The iterative singular value solver failed to converge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NonConvergence;

impl std::fmt::Display for NonConvergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "singular value iteration did not converge")
    }
}

impl std::error::Error for NonConvergence {}

/// Thin singular value decomposition `A = U diag(sigma) V^T`.
///
/// `u` is m x p and `v` is n x p with p = min(m, n); `sigma` is nonnegative
/// and nonincreasing. Columns of `u` paired with zero singular values are
/// zero vectors rather than arbitrary orthonormal completions.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    pub u: Mat<T>,
    pub sigma: Vec<T>,
    pub v: Mat<T>,
}

const MAX_JACOBI_SWEEPS: usize = 64;

/// Full singular spectrum of `a`, nonincreasing. Values-only fast path.
pub fn singular_values<T: Scalar>(a: &Mat<T>) -> Result<Vec<T>, NonConvergence> {
    let (m, n, mut w) = columns_as_rows(a);
    jacobi_orthogonalize(&mut w, None, m, n)?;
    let mut sigma: Vec<T> = (0..n).map(|j| row_norm(&w, m, j)).collect();
    sigma.sort_by(|x, y| y.partial_cmp(x).expect("finite singular values"));
    Ok(sigma)
}

/// Thin SVD of `a` with singular vectors.
pub fn svd<T: Scalar>(a: &Mat<T>) -> Result<Svd<T>, NonConvergence> {
    let transposed = a.rows() < a.cols();
    let (m, n, mut w) = columns_as_rows(a);
    let mut vt = Mat::identity(n);
    jacobi_orthogonalize(&mut w, Some(&mut vt), m, n)?;

    let norms: Vec<T> = (0..n).map(|j| row_norm(&w, m, j)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        norms[j].partial_cmp(&norms[i]).expect("finite singular values").then(i.cmp(&j))
    });

    let mut u = Mat::zeros(m, n);
    let mut v = Mat::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (slot, &j) in order.iter().enumerate() {
        let s = norms[j];
        sigma.push(s);
        if s > T::zero() {
            for i in 0..m {
                u[(i, slot)] = w[j * m + i] / s;
            }
        }
        for i in 0..n {
            v[(i, slot)] = vt[(j, i)];
        }
    }

    if transposed {
        Ok(Svd { u: v, sigma, v: u })
    } else {
        Ok(Svd { u, sigma, v })
    }
}

/// Lays the columns of `a` (or of `a^T` when `a` is wide, so that the worked
/// matrix is always tall) out as contiguous rows of length `m`.
fn columns_as_rows<T: Scalar>(a: &Mat<T>) -> (usize, usize, Vec<T>) {
    assert!(a.is_finite(), "SVD input must be finite");
    if a.rows() >= a.cols() {
        let (m, n) = (a.rows(), a.cols());
        let mut w = vec![T::zero(); m * n];
        for i in 0..m {
            for j in 0..n {
                w[j * m + i] = a[(i, j)];
            }
        }
        (m, n, w)
    } else {
        let (m, n) = (a.cols(), a.rows());
        (m, n, a.data.clone())
    }
}

fn row_norm<T: Scalar>(w: &[T], m: usize, j: usize) -> T {
    w[j * m..(j + 1) * m].iter().map(|&x| x * x).sum::<T>().sqrt()
}

/// One-sided Jacobi: plane-rotates pairs of rows of `w` (columns of the
/// original matrix) until all pairs are numerically orthogonal. `vt`, when
/// present, accumulates the right singular vectors as its rows.
fn jacobi_orthogonalize<T: Scalar>(
    w: &mut [T],
    mut vt: Option<&mut Mat<T>>,
    m: usize,
    n: usize,
) -> Result<(), NonConvergence> {
    if n < 2 {
        return Ok(());
    }
    let eps = T::epsilon();
    let dim = T::real(m.max(n) as f64);
    // Fully relative pair test with a dimensional factor: the rounding
    // noise of a length-m dot product between near-orthogonal columns can
    // reach sqrt(m)*eps relative, and without the factor such noise angles
    // keep the sweep rotating forever.
    let tol = dim.sqrt() * eps;
    // The total squared norm is invariant under the rotations. A column
    // whose norm falls to rounding level relative to it carries a singular
    // value below the decomposition's backward error; pairing such a column
    // would only chase noise, so it counts as converged.
    let frob2: T = w.iter().map(|&x| x * x).sum();
    let floor = dim * eps * eps * frob2;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (head, tail) = w.split_at_mut(q * m);
                let wp = &mut head[p * m..p * m + m];
                let wq = &mut tail[..m];

                let mut alpha = T::zero();
                let mut beta = T::zero();
                let mut gamma = T::zero();
                for i in 0..m {
                    alpha = alpha + wp[i] * wp[i];
                    beta = beta + wq[i] * wq[i];
                    gamma = gamma + wp[i] * wq[i];
                }
                if alpha <= floor || beta <= floor {
                    continue;
                }
                if gamma == T::zero() || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }

                let zeta = (beta - alpha) / (T::real(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let a = wp[i];
                    let b = wq[i];
                    wp[i] = c * a - s * b;
                    wq[i] = s * a + c * b;
                }
                if let Some(vt) = vt.as_deref_mut() {
                    for i in 0..n {
                        let a = vt[(p, i)];
                        let b = vt[(q, i)];
                        vt[(p, i)] = c * a - s * b;
                        vt[(q, i)] = s * a + c * b;
                    }
                }
                rotated = true;
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    Err(NonConvergence)
}

/// Result of a column-pivoted least squares solve.
///
/// Columns judged collinear at the pivot threshold are dropped; `retained`
/// and `dropped` list original column indices (ascending), and `coef` and
/// `gram_inv_diag` are aligned with `retained`. `gram_inv_diag` holds the
/// diagonal of `(X_kept^T X_kept)^{-1}`, the ingredient classical standard
/// errors need.
#[derive(Clone, Debug)]
pub struct LeastSquares<T> {
    pub coef: Vec<T>,
    pub retained: Vec<usize>,
    pub dropped: Vec<usize>,
    pub gram_inv_diag: Vec<T>,
}

/// Householder QR least squares with column pivoting (Businger-Golub).
///
/// A column is dropped when its pivot |R[k,k]| falls to or below `rel_tol`
/// times |R[0,0]|. Ties in the pivot choice resolve to the lowest column
/// index, so duplicated columns keep their first copy deterministically.
pub fn lstsq_colpiv<T: Scalar>(x: &Mat<T>, y: &[T], rel_tol: T) -> LeastSquares<T> {
    let m = x.rows();
    let n = x.cols();
    assert_eq!(y.len(), m, "response length must equal row count");

    let mut r = x.clone();
    let mut qty = y.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();

    // Squared remaining norms drive the pivot choice; downdated per step and
    // recomputed when cancellation eats their accuracy.
    let mut norm2: Vec<T> = (0..n)
        .map(|j| (0..m).map(|i| r[(i, j)] * r[(i, j)]).sum())
        .collect();
    let orig_norm2 = norm2.clone();

    let kmax = m.min(n);
    let mut rank = kmax;
    let mut r00 = T::zero();

    for k in 0..kmax {
        let mut best = k;
        for j in k + 1..n {
            if norm2[j] > norm2[best] {
                best = j;
            }
        }
        if best != k {
            for i in 0..m {
                let tmp = r[(i, k)];
                r[(i, k)] = r[(i, best)];
                r[(i, best)] = tmp;
            }
            norm2.swap(k, best);
            perm.swap(k, best);
        }

        let norm = (k..m).map(|i| r[(i, k)] * r[(i, k)]).sum::<T>().sqrt();
        if k == 0 {
            r00 = norm;
        }
        if norm <= rel_tol * r00 {
            rank = k;
            break;
        }

        // Householder vector v annihilates column k below the diagonal.
        let sign = if r[(k, k)] >= T::zero() { T::one() } else { -T::one() };
        let mut v = vec![T::zero(); m - k];
        for i in k..m {
            v[i - k] = r[(i, k)];
        }
        v[0] = v[0] + sign * norm;
        let vtv: T = v.iter().map(|&a| a * a).sum();
        let two_over = T::real(2.0) / vtv;

        r[(k, k)] = -sign * norm;
        for i in k + 1..m {
            r[(i, k)] = T::zero();
        }
        for j in k + 1..n {
            let dot: T = (k..m).map(|i| v[i - k] * r[(i, j)]).sum();
            let f = two_over * dot;
            for i in k..m {
                r[(i, j)] = r[(i, j)] - f * v[i - k];
            }
        }
        let dot: T = (k..m).map(|i| v[i - k] * qty[i]).sum();
        let f = two_over * dot;
        for (i, qi) in qty.iter_mut().enumerate().skip(k) {
            *qi = *qi - f * v[i - k];
        }

        for j in k + 1..n {
            let d = norm2[j] - r[(k, j)] * r[(k, j)];
            norm2[j] = if d > T::epsilon() * orig_norm2[j] {
                d
            } else {
                (k + 1..m).map(|i| r[(i, j)] * r[(i, j)]).sum()
            };
        }
    }

    // Back-substitute R z = Q^T y on the retained block.
    let mut z = vec![T::zero(); rank];
    for i in (0..rank).rev() {
        let mut acc = qty[i];
        for j in i + 1..rank {
            acc = acc - r[(i, j)] * z[j];
        }
        z[i] = acc / r[(i, i)];
    }

    // diag of (X_kept^T X_kept)^{-1} = squared row norms of R^{-1}.
    let mut rinv = Mat::zeros(rank.max(1), rank.max(1));
    for c in 0..rank {
        for i in (0..=c).rev() {
            let mut acc = if i == c { T::one() } else { T::zero() };
            for j in i + 1..=c {
                acc = acc - r[(i, j)] * rinv[(j, c)];
            }
            rinv[(i, c)] = acc / r[(i, i)];
        }
    }
    let diag: Vec<T> = (0..rank)
        .map(|i| (i..rank).map(|j| rinv[(i, j)] * rinv[(i, j)]).sum())
        .collect();

    let mut kept: Vec<(usize, T, T)> =
        (0..rank).map(|j| (perm[j], z[j], diag[j])).collect();
    kept.sort_by_key(|&(idx, _, _)| idx);
    let mut dropped: Vec<usize> = perm[rank..].to_vec();
    dropped.sort_unstable();

    LeastSquares {
        coef: kept.iter().map(|&(_, c, _)| c).collect(),
        retained: kept.iter().map(|&(i, _, _)| i).collect(),
        dropped,
        gram_inv_diag: kept.iter().map(|&(_, _, d)| d).collect(),
    }
}
