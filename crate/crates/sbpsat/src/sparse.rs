//! Compressed sparse row matrices.

use rayon::prelude::*;

use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Csr<T> {
    pub nrows: usize,
    pub ncols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<T>,
}

impl<T: Real> Csr<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Csr { nrows, ncols, indptr: vec![0; nrows + 1], indices: vec![], values: vec![] }
    }

    /// Builds from (row, col, value) triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets<I>(nrows: usize, ncols: usize, trips: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, T)>,
    {
        let mut t: Vec<(usize, usize, T)> = trips.into_iter().collect();
        for &(i, j, _) in &t {
            assert!(i < nrows && j < ncols, "triplet ({i},{j}) out of {nrows}x{ncols}");
        }
        // stable sort keeps the summation order of duplicates deterministic
        t.sort_by_key(|&(i, j, _)| (i, j));
        let mut m = Csr::zeros(nrows, ncols);
        let mut k = 0;
        let mut row = 0;
        while k < t.len() {
            let (i, j, mut v) = t[k];
            k += 1;
            while k < t.len() && t[k].0 == i && t[k].1 == j {
                v += t[k].2;
                k += 1;
            }
            while row < i {
                row += 1;
                m.indptr[row] = m.indices.len();
            }
            if v != T::zero() {
                m.indices.push(j);
                m.values.push(v);
            }
        }
        while row < nrows {
            row += 1;
            m.indptr[row] = m.indices.len();
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![T::one(); n])
    }

    pub fn diag(d: &[T]) -> Self {
        Self::from_triplets(d.len(), d.len(), d.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[a..b].iter().copied().zip(self.values[a..b].iter().copied())
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.indptr[i + 1] - self.indptr[i]
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        match self.indices[a..b].binary_search(&j) {
            Ok(k) => self.values[a + k],
            Err(_) => T::zero(),
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.ncols, "matvec dimension");
        assert_eq!(y.len(), self.nrows, "matvec dimension");
        let row = |(i, yi): (usize, &mut T)| {
            let mut s = T::zero();
            for k in self.indptr[i]..self.indptr[i + 1] {
                s += self.values[k] * x[self.indices[k]];
            }
            *yi = s;
        };
        // rows are independent, so the parallel result is bit-identical
        if self.nrows >= 4096 {
            y.par_iter_mut().enumerate().for_each(row);
        } else {
            y.iter_mut().enumerate().for_each(row);
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.triplets().map(|(i, j, v)| (j, i, v)))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "matmul dimension");
        let mut m = Csr::zeros(self.nrows, other.ncols);
        let mut acc = vec![T::zero(); other.ncols];
        let mut used = vec![false; other.ncols];
        let mut cols = Vec::new();
        for i in 0..self.nrows {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if !used[j] {
                        used[j] = true;
                        cols.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            cols.sort_unstable();
            for &j in &cols {
                if acc[j] != T::zero() {
                    m.indices.push(j);
                    m.values.push(acc[j]);
                }
                acc[j] = T::zero();
                used[j] = false;
            }
            cols.clear();
            m.indptr[i + 1] = m.indices.len();
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(T::one(), other)
    }

    /// `self + alpha·other`
    pub fn axpy(&self, alpha: T, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols), "add dimension");
        Self::from_triplets(
            self.nrows,
            self.ncols,
            self.triplets().chain(other.triplets().map(|(i, j, v)| (i, j, alpha * v))),
        )
    }

    pub fn scale(&self, s: T) -> Self {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= s);
        m
    }

    /// `diag(d)·self`
    pub fn scale_rows(&self, d: &[T]) -> Self {
        assert_eq!(d.len(), self.nrows);
        let mut m = self.clone();
        for i in 0..m.nrows {
            for k in m.indptr[i]..m.indptr[i + 1] {
                m.values[k] *= d[i];
            }
        }
        m
    }

    /// `self·diag(d)`
    pub fn scale_cols(&self, d: &[T]) -> Self {
        assert_eq!(d.len(), self.ncols);
        let mut m = self.clone();
        for k in 0..m.values.len() {
            m.values[k] *= d[m.indices[k]];
        }
        m
    }

    /// Kronecker product; `kron(A,B)[i·nb+k, j·mb+l] = A_ij·B_kl`.
    pub fn kron(&self, other: &Self) -> Self {
        let (nb, mb) = (other.nrows, other.ncols);
        Self::from_triplets(
            self.nrows * nb,
            self.ncols * mb,
            self.triplets().flat_map(|(i, j, a)| {
                other.triplets().map(move |(k, l, b)| (i * nb + k, j * mb + l, a * b))
            }),
        )
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> T {
        (0..self.nrows)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    /// Largest entry of `|self − selfᵀ|`.
    pub fn asymmetry(&self) -> T {
        self.axpy(-T::one(), &self.transpose()).max_abs()
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.ncols]; self.nrows];
        for (i, j, v) in self.triplets() {
            d[i][j] = v;
        }
        d
    }

    pub fn cast<U: Real>(&self) -> Csr<U> {
        Csr {
            nrows: self.nrows,
            ncols: self.ncols,
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            values: self.values.iter().map(|v| U::lit(v.f64())).collect(),
        }
    }

    /// Rows `rows` of `self`, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_triplets(
            rows.len(),
            self.ncols,
            rows.iter().enumerate().flat_map(|(r, &i)| self.row(i).map(move |(j, v)| (r, j, v))),
        )
    }

    /// Embeds `self` into a `nrows × ncols` matrix at offset (`r0`, `c0`).
    pub fn embed(&self, nrows: usize, ncols: usize, r0: usize, c0: usize) -> Self {
        Self::from_triplets(nrows, ncols, self.triplets().map(|(i, j, v)| (i + r0, j + c0, v)))
    }
}
