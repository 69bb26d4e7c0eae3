//! Small dense symmetric solves shared by the estimators.
//!
//! Design matrices stay in `ndarray`; the p x p normal-equation systems are
//! factored through `nalgebra`'s Cholesky (p is at most a few dozen here).

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use ndarray::{Array1, Array2};

pub(crate) struct SpdFactor {
    chol: Cholesky<f64, Dyn>,
}

impl SpdFactor {
    /// Cholesky-factor a symmetric positive definite matrix.
    /// Returns `None` when the matrix is not positive definite.
    pub fn new(a: &Array2<f64>) -> Option<Self> {
        let p = a.nrows();
        let m = DMatrix::from_fn(p, p, |i, j| a[[i, j]]);
        Cholesky::new(m).map(|chol| Self { chol })
    }

    pub fn solve(&self, b: &Array1<f64>) -> Array1<f64> {
        let v = DVector::from_iterator(b.len(), b.iter().copied());
        let x = self.chol.solve(&v);
        Array1::from_iter(x.iter().copied())
    }

    /// Diagonal of the inverse.
    pub fn inverse_diag(&self) -> Array1<f64> {
        let inv = self.chol.inverse();
        Array1::from_iter((0..inv.nrows()).map(|i| inv[(i, i)]))
    }

    /// Given `A = L L^T`, map a standard-normal vector `eps` to
    /// `L^-T eps`, which has covariance `A^-1`.
    pub fn whiten_into_cov(&self, eps: &Array1<f64>) -> Array1<f64> {
        let l = self.chol.l();
        let v = DVector::from_iterator(eps.len(), eps.iter().copied());
        let u = l
            .transpose()
            .solve_upper_triangular(&v)
            .expect("Cholesky factor has positive diagonal");
        Array1::from_iter(u.iter().copied())
    }
}

/// `X^T diag(w) X` restricted to the given rows.
pub(crate) fn weighted_gram(
    design: &Array2<f64>,
    rows: &[usize],
    weights: &Array1<f64>,
) -> Array2<f64> {
    let p = design.ncols();
    let mut out = Array2::<f64>::zeros((p, p));
    for (r, &i) in rows.iter().enumerate() {
        let w = weights[r];
        for a in 0..p {
            let xa = design[[i, a]] * w;
            for b in a..p {
                out[[a, b]] += xa * design[[i, b]];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            out[[a, b]] = out[[b, a]];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr1;

    #[test]
    fn solve_matches_hand_inverse() {
        let a = ndarray::arr2(&[[4.0, 1.0], [1.0, 3.0]]);
        let f = SpdFactor::new(&a).unwrap();
        let x = f.solve(&arr1(&[1.0, 2.0]));
        // Inverse of [[4,1],[1,3]] is [[3,-1],[-1,4]]/11.
        assert!((x[0] - 1.0 / 11.0).abs() < 1e-12);
        assert!((x[1] - 7.0 / 11.0).abs() < 1e-12);
        let d = f.inverse_diag();
        assert!((d[0] - 3.0 / 11.0).abs() < 1e-12);
        assert!((d[1] - 4.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn whitened_vectors_have_inverse_covariance() {
        // For A = I, L^-T eps = eps.
        let a = ndarray::Array2::eye(3);
        let f = SpdFactor::new(&a).unwrap();
        let eps = arr1(&[1.0, -2.0, 0.5]);
        let u = f.whiten_into_cov(&eps);
        for i in 0..3 {
            assert!((u[i] - eps[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_indefinite_matrices() {
        let a = ndarray::arr2(&[[1.0, 2.0], [2.0, 1.0]]);
        assert!(SpdFactor::new(&a).is_none());
    }
}
