//! Small dense linear algebra: just enough for scatter matrices and the
//! discriminant eigenproblem. Row-major storage, no external solver.


use crate::error::{Error, Result};
use crate::num::Real;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged rows");
        Self {
            rows: n_rows,
            cols: n_cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Rank-one update `self += scale * v v^T`.
    pub fn add_outer(&mut self, v: &[T], scale: T) {
        debug_assert_eq!(v.len(), self.rows);
        debug_assert_eq!(v.len(), self.cols);
        for i in 0..v.len() {
            let vi = v[i] * scale;
            for j in 0..v.len() {
                self[(i, j)] += vi * v[j];
            }
        }
    }

    pub fn mat_vec(&self, v: &[T]) -> Vec<T> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a * b)
                    .sum::<T>()
            })
            .collect()
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .map(|&x| x * x)
            .sum::<T>()
            .sqrt()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Largest absolute difference from the transpose, relative to the
    /// Frobenius norm. Zero matrices are perfectly symmetric.
    pub fn asymmetry(&self) -> T {
        let norm = self.frobenius_norm();
        if norm == T::zero() {
            return T::zero();
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst / norm
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
///
/// `pivot_floor` is the smallest squared pivot accepted; at or below it the
/// factorization aborts with `SingularWithin`.
pub fn cholesky<T: Real>(a: &Mat<T>, pivot_floor: T) -> Result<Mat<T>> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "cholesky needs a square matrix");
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= pivot_floor {
            return Err(Error::SingularWithin {
                pivot: d.to_f64().unwrap_or(f64::NAN),
                threshold: pivot_floor.to_f64().unwrap_or(f64::NAN),
            });
        }
        let ljj = d.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Solve `L y = b` with `L` lower triangular.
pub fn forward_substitute<T: Real>(l: &Mat<T>, b: &[T]) -> Vec<T> {
    let n = l.rows();
    let mut y = vec![T::zero(); n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    y
}

/// Solve `L^T x = y` with `L` lower triangular.
pub fn back_substitute_transposed<T: Real>(l: &Mat<T>, y: &[T]) -> Vec<T> {
    let n = l.rows();
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Solve `A x = b` given the Cholesky factor `L` of `A`.
pub fn cholesky_solve<T: Real>(l: &Mat<T>, b: &[T]) -> Vec<T> {
    back_substitute_transposed(l, &forward_substitute(l, b))
}

/// Whiten a symmetric matrix: `L^-1 B L^-T` for a lower-triangular `L`.
pub fn whiten_symmetric<T: Real>(l: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    let n = l.rows();
    // Y = L^-1 B, column by column.
    let mut y = Mat::zeros(n, n);
    for j in 0..n {
        let col: Vec<T> = (0..n).map(|i| b[(i, j)]).collect();
        let solved = forward_substitute(l, &col);
        for i in 0..n {
            y[(i, j)] = solved[i];
        }
    }
    // Z = L^-1 Y^T, so Z^T = Y L^-T = L^-1 B L^-T.
    let yt = y.transpose();
    let mut z = Mat::zeros(n, n);
    for j in 0..n {
        let col: Vec<T> = (0..n).map(|i| yt[(i, j)]).collect();
        let solved = forward_substitute(l, &col);
        for i in 0..n {
            z[(i, j)] = solved[i];
        }
    }
    let zt = z.transpose();
    // Symmetrize away the round-off skew.
    let mut out = Mat::zeros(n, n);
    let half = T::from_f64(0.5).unwrap();
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = (zt[(i, j)] + zt[(j, i)]) * half;
        }
    }
    out
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps until the off-diagonal norm drops below `1e-12` of the Frobenius
/// norm, capped at 100 sweeps. Returns eigenvalues in descending order and
/// the matching unit eigenvectors as matrix columns.
pub fn jacobi_eigh<T: Real>(a: &Mat<T>) -> (Vec<T>, Mat<T>) {
    let n = a.rows();
    assert_eq!(n, a.cols(), "jacobi_eigh needs a square matrix");
    let mut a = a.clone();
    let mut v = Mat::identity(n);
    let frob = a.frobenius_norm();
    let tol = T::from_f64(1e-12).unwrap() * frob;

    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)] * a[(i, j)] + a[(j, i)] * a[(j, i)];
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // Rotation angle that annihilates a_pq (Golub & Van Loan).
                let theta = (aqq - app) / (apq + apq);
                let t = {
                    let sign = if theta >= T::zero() { T::one() } else { -T::one() };
                    sign / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .partial_cmp(&a[(i, i)])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues: Vec<T> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, dst)] = v[(k, src)];
        }
    }
    (eigenvalues, vectors)
}

/// In-place modified Gram-Schmidt; drops vectors whose orthogonal residual
/// collapses to numerical noise (below `sqrt(eps)` of their original norm).
pub fn orthonormalize<T: Real>(vectors: &mut Vec<Vec<T>>) {
    let mut kept: Vec<Vec<T>> = Vec::with_capacity(vectors.len());
    for mut v in vectors.drain(..) {
        let norm_before = norm(&v);
        for u in &kept {
            let proj: T = v.iter().zip(u).map(|(&a, &b)| a * b).sum();
            for (vi, &ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm_after = norm(&v);
        if norm_after > norm_before * T::epsilon().sqrt() {
            for vi in &mut v {
                *vi /= norm_after;
            }
            kept.push(v);
        }
    }
    *vectors = kept;
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm<T: Real>(v: &[T]) -> T {
    dot(v, v).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = Mat::from_rows(vec![
            vec![4.0, 2.0, 0.4],
            vec![2.0, 5.0, 1.0],
            vec![0.4, 1.0, 3.0],
        ]);
        let l = cholesky(&a, 0.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += l[(i, k)] * l[(j, k)];
                }
                assert!(approx(s, a[(i, j)], 1e-12), "({i},{j}): {s}");
            }
        }
    }

    #[test]
    fn cholesky_rejects_singular() {
        let a = Mat::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(matches!(
            cholesky(&a, 1e-12),
            Err(Error::SingularWithin { .. })
        ));
    }

    #[test]
    fn cholesky_solve_inverts() {
        let a = Mat::from_rows(vec![vec![4.0, 1.0], vec![1.0, 3.0]]);
        let l = cholesky(&a, 0.0).unwrap();
        let x = cholesky_solve(&l, &[1.0, 2.0]);
        let back = a.mat_vec(&x);
        assert!(approx(back[0], 1.0, 1e-12) && approx(back[1], 2.0, 1e-12));
    }

    #[test]
    fn jacobi_2x2_analytic() {
        // Eigenvalues of [[2,1],[1,2]] are 3 and 1.
        let a = Mat::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        let (vals, vecs) = jacobi_eigh(&a);
        assert!(approx(vals[0], 3.0, 1e-12));
        assert!(approx(vals[1], 1.0, 1e-12));
        // Leading eigenvector is (1,1)/sqrt(2) up to sign.
        let ratio = vecs[(0, 0)] / vecs[(1, 0)];
        assert!(approx(ratio, 1.0, 1e-10));
    }

    #[test]
    fn jacobi_residuals_small() {
        let mut rng = crate::rng::SplitMix64::new(99);
        for _ in 0..20 {
            let n = 2 + (rng.next_below(5) as usize);
            let mut a = Mat::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let x = rng.next_gaussian();
                    a[(i, j)] = x;
                    a[(j, i)] = x;
                }
            }
            let frob = a.frobenius_norm();
            let (vals, vecs) = jacobi_eigh(&a);
            for e in 0..n {
                let v: Vec<f64> = (0..n).map(|k| vecs[(k, e)]).collect();
                let av = a.mat_vec(&v);
                for k in 0..n {
                    assert!(
                        (av[k] - vals[e] * v[k]).abs() <= 1e-10 * frob.max(1.0),
                        "residual too large"
                    );
                }
            }
            // Descending order.
            for e in 1..n {
                assert!(vals[e - 1] >= vals[e]);
            }
        }
    }

    #[test]
    fn whitening_produces_identity_on_self() {
        let a = Mat::from_rows(vec![vec![4.0, 1.0], vec![1.0, 3.0]]);
        let l = cholesky(&a, 0.0).unwrap();
        let w = whiten_symmetric(&l, &a);
        assert!(approx(w[(0, 0)], 1.0, 1e-12));
        assert!(approx(w[(1, 1)], 1.0, 1e-12));
        assert!(approx(w[(0, 1)], 0.0, 1e-12));
    }

    #[test]
    fn gram_schmidt_orthonormalizes() {
        let mut vs = vec![vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![2.0, 2.0, 0.0]];
        orthonormalize(&mut vs);
        assert_eq!(vs.len(), 2, "dependent vector dropped");
        assert!(approx(norm(&vs[0]), 1.0, 1e-12));
        assert!(approx(norm(&vs[1]), 1.0, 1e-12));
        assert!(approx(dot(&vs[0], &vs[1]), 0.0, 1e-12));
    }

    #[test]
    fn works_in_f32_too() {
        let a = Mat::<f32>::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        let (vals, _) = jacobi_eigh(&a);
        assert!((vals[0] - 3.0).abs() < 1e-5);
    }
}
