//! Dense eigensolves (LAPACK through ndarray-linalg), always in `f64`.

use ndarray::Array2;
use ndarray_linalg::{EigVals, Eigh, EigValsh, UPLO};

use crate::scalar::Real;
use crate::sparse::Csr;

pub use ndarray_linalg::c64;

pub fn to_array<T: Real>(m: &Csr<T>) -> Array2<f64> {
    let mut a = Array2::zeros((m.nrows, m.ncols));
    for (i, j, v) in m.triplets() {
        a[[i, j]] = v.f64();
    }
    a
}

pub fn from_rows(rows: &[Vec<f64>]) -> Array2<f64> {
    let n = rows.len();
    let c = if n == 0 { 0 } else { rows[0].len() };
    Array2::from_shape_fn((n, c), |(i, j)| rows[i][j])
}

/// Eigenvalues of the symmetric part `(A + Aᵀ)/2`, ascending.
pub fn sym_eigenvalues(a: &Array2<f64>) -> Vec<f64> {
    let s = (a + &a.t()) * 0.5;
    let mut v = s.eigvalsh(UPLO::Lower).expect("symmetric eigensolve").to_vec();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    v
}

pub fn min_sym_eigenvalue(a: &Array2<f64>) -> f64 {
    sym_eigenvalues(a).first().copied().unwrap_or(0.0)
}

/// Symmetric eigendecomposition of `(A + Aᵀ)/2`: (values, column eigenvectors).
pub fn sym_eigh(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let s = (a + &a.t()) * 0.5;
    let (w, v) = s.eigh(UPLO::Lower).expect("symmetric eigensolve");
    (w.to_vec(), v)
}

/// All eigenvalues of a general square matrix.
pub fn eigenvalues(a: &Array2<f64>) -> Vec<c64> {
    a.eigvals().expect("general eigensolve").to_vec()
}

pub fn max_abs(a: &Array2<f64>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}
