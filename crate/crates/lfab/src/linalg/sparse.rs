//! Compressed sparse row matrix.

use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::scalar::Scalar;

/// Sparse matrix in CSR form. Within each row the column indices are strictly
/// increasing; duplicate triplets are summed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<S> {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<S>,
}

impl<S: Scalar> SparseMatrix<S> {
    /// Build from (row, col, value) triplets. Out-of-range indices are an
    /// error; duplicates are summed.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, S)],
    ) -> Result<Self> {
        for &(i, j, _) in triplets {
            if i >= n_rows || j >= n_cols {
                return Err(Error::invalid(format!(
                    "triplet ({i}, {j}) out of range for a {n_rows}x{n_cols} matrix"
                )));
            }
        }
        let mut sorted: Vec<(usize, usize, S)> = triplets.to_vec();
        sorted.sort_by_key(|&(i, j, _)| (i, j));

        let mut rows: Vec<usize> = Vec::with_capacity(sorted.len());
        let mut col_idx: Vec<usize> = Vec::with_capacity(sorted.len());
        let mut values: Vec<S> = Vec::with_capacity(sorted.len());
        for &(i, j, v) in &sorted {
            if rows.last() == Some(&i) && col_idx.last() == Some(&j) {
                *values.last_mut().expect("non-empty") += v;
            } else {
                rows.push(i);
                col_idx.push(j);
                values.push(v);
            }
        }
        let mut row_ptr = vec![0usize; n_rows + 1];
        for &i in &rows {
            row_ptr[i + 1] += 1;
        }
        for i in 1..=n_rows {
            row_ptr[i] += row_ptr[i - 1];
        }
        Ok(SparseMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![S::one(); n],
        }
    }

    pub fn from_diag(d: &[S]) -> Self {
        SparseMatrix {
            n_rows: d.len(),
            n_cols: d.len(),
            row_ptr: (0..=d.len()).collect(),
            col_idx: (0..d.len()).collect(),
            values: d.to_vec(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Stored entries of one row as parallel (column, value) slices.
    pub fn row(&self, i: usize) -> (&[usize], &[S]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// Entry lookup by binary search within the row. Zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> S {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => S::zero(),
        }
    }

    /// `y = self * x`.
    pub fn spmv(&self, x: &[S]) -> Result<Vec<S>> {
        let mut y = vec![S::zero(); self.n_rows];
        self.spmv_into(x, &mut y)?;
        Ok(y)
    }

    /// `y = self * x` into a caller-provided buffer.
    pub fn spmv_into(&self, x: &[S], y: &mut [S]) -> Result<()> {
        if x.len() != self.n_cols || y.len() != self.n_rows {
            return Err(Error::dimension(format!(
                "spmv: matrix is {}x{}, x has length {}, y has length {}",
                self.n_rows,
                self.n_cols,
                x.len(),
                y.len()
            )));
        }
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            let mut acc = S::zero();
            for (&j, &v) in cols.iter().zip(vals) {
                acc += v * x[j];
            }
            y[i] = acc;
        }
        Ok(())
    }

    /// Transpose via counting sort over columns, O(nnz).
    pub fn transpose(&self) -> SparseMatrix<S> {
        self.transpose_impl(false)
    }

    /// Conjugate transpose.
    pub fn conj_transpose(&self) -> SparseMatrix<S> {
        self.transpose_impl(true)
    }

    fn transpose_impl(&self, conjugate: bool) -> SparseMatrix<S> {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &j in &self.col_idx {
            counts[j + 1] += 1;
        }
        for j in 1..=self.n_cols {
            counts[j] += counts[j - 1];
        }
        let row_ptr = counts.clone();
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![S::zero(); self.nnz()];
        let mut next = counts;
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let p = next[j];
                col_idx[p] = i;
                values[p] = if conjugate { v.conj() } else { v };
                next[j] += 1;
            }
        }
        SparseMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|&v| v.abs_sq()).sum::<f64>().sqrt()
    }

    /// Matrix with the same sparsity pattern and all stored values set to 1.
    pub fn pattern_ones(&self) -> SparseMatrix<S> {
        SparseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: vec![S::one(); self.nnz()],
        }
    }

    /// Entry-wise map over stored values.
    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> SparseMatrix<T> {
        SparseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix<S> {
        let mut d = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d.set(i, j, v);
            }
        }
        d
    }

    /// Sparse view of a dense matrix; exact zeros are not stored.
    pub fn from_dense(d: &DenseMatrix<S>) -> SparseMatrix<S> {
        let mut triplets = Vec::new();
        for j in 0..d.n_cols() {
            for i in 0..d.n_rows() {
                let v = d.get(i, j);
                if v != S::zero() {
                    triplets.push((i, j, v));
                }
            }
        }
        SparseMatrix::from_triplets(d.n_rows(), d.n_cols(), &triplets)
            .expect("dense shape is a valid sparse shape")
    }

    /// Iterate stored triplets in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, S)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_triplets_sorts_and_sums_duplicates() {
        let a = SparseMatrix::from_triplets(
            3,
            3,
            &[(2, 1, 4.0), (0, 0, 1.0), (2, 1, -1.0), (0, 2, 2.0)],
        )
        .unwrap();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(0, 0), 1.0);
        assert_eq!(a.get(0, 2), 2.0);
        assert_eq!(a.get(2, 1), 3.0);
        assert_eq!(a.get(1, 1), 0.0);
    }

    #[test]
    fn out_of_range_triplet_is_rejected() {
        assert!(SparseMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn spmv_matches_dense() {
        let a =
            SparseMatrix::from_triplets(2, 3, &[(0, 0, 1.0), (0, 2, -2.0), (1, 1, 5.0)]).unwrap();
        let x = vec![1.0, 2.0, 3.0];
        let y = a.spmv(&x).unwrap();
        let yd = a.to_dense().matvec(&x).unwrap();
        assert_eq!(y, yd);
        assert_eq!(y, vec![-5.0, 10.0]);
    }

    #[test]
    fn spmv_rejects_wrong_length() {
        let a = SparseMatrix::<f64>::identity(3);
        assert!(a.spmv(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn transpose_round_trips() {
        let a = SparseMatrix::from_triplets(
            3,
            2,
            &[(0, 1, 1.0), (1, 0, 2.0), (2, 1, -3.0), (2, 0, 4.0)],
        )
        .unwrap();
        let att = a.transpose().transpose();
        assert_eq!(a, att);
        assert_eq!(a.transpose().get(1, 2), -3.0);
    }

    #[test]
    fn empty_rows_are_handled() {
        let a = SparseMatrix::from_triplets(4, 4, &[(3, 0, 1.0)]).unwrap();
        let y = a.spmv(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(y, vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(a.row(1).0.len(), 0);
    }

    #[test]
    fn pattern_and_norm() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 1, -3.0), (1, 0, 4.0)]).unwrap();
        assert_eq!(a.frobenius_norm(), 5.0);
        let p = a.pattern_ones();
        assert_eq!(p.get(0, 1), 1.0);
        assert_eq!(p.get(1, 0), 1.0);
    }
}
