//! Column-major dense matrix.

use crate::error::{Error, Result};
use crate::linalg::vector;
use crate::scalar::Scalar;

/// Dense matrix stored column-major. Columns are contiguous, which matches
/// the access pattern of Krylov bases (whole columns appended, read, and
/// combined) and keeps the hot loops of the small-matrix kernels cache
/// friendly.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<S> {
    n_rows: usize,
    n_cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    /// Zero matrix of the given shape.
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        DenseMatrix {
            n_rows,
            n_cols,
            data: vec![S::zero(); n_rows * n_cols],
        }
    }

    /// Empty matrix with `n_rows` rows and no columns, ready for
    /// [`DenseMatrix::push_col`].
    pub fn with_rows(n_rows: usize) -> Self {
        DenseMatrix {
            n_rows,
            n_cols: 0,
            data: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_diag(d: &[S]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &di) in d.iter().enumerate() {
            m.set(i, i, di);
        }
        m
    }

    /// Build from a closure over (row, col).
    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Self::zeros(n_rows, n_cols);
        for j in 0..n_cols {
            for i in 0..n_rows {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Build from row slices (convenient for literals in tests).
    pub fn from_rows(rows: &[&[S]]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::dimension("ragged rows in dense literal".to_string()));
        }
        Ok(Self::from_fn(n_rows, n_cols, |i, j| rows[i][j]))
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        debug_assert!(i < self.n_rows && j < self.n_cols);
        self.data[j * self.n_rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        debug_assert!(i < self.n_rows && j < self.n_cols);
        self.data[j * self.n_rows + i] = v;
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[S] {
        debug_assert!(j < self.n_cols);
        &self.data[j * self.n_rows..(j + 1) * self.n_rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [S] {
        debug_assert!(j < self.n_cols);
        &mut self.data[j * self.n_rows..(j + 1) * self.n_rows]
    }

    /// Append a column.
    pub fn push_col(&mut self, col: &[S]) {
        assert_eq!(col.len(), self.n_rows, "push_col length mismatch");
        self.data.extend_from_slice(col);
        self.n_cols += 1;
    }

    /// View of the first `k` columns.
    pub fn leading_cols(&self, k: usize) -> DenseMatrix<S> {
        assert!(k <= self.n_cols);
        DenseMatrix {
            n_rows: self.n_rows,
            n_cols: k,
            data: self.data[..k * self.n_rows].to_vec(),
        }
    }

    /// Copy of the sub-block starting at (`r0`, `c0`) of shape `nr` × `nc`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> DenseMatrix<S> {
        assert!(r0 + nr <= self.n_rows && c0 + nc <= self.n_cols);
        DenseMatrix::from_fn(nr, nc, |i, j| self.get(r0 + i, c0 + j))
    }

    /// Write `other` into this matrix with its (0,0) entry at (`r0`, `c0`).
    pub fn set_block(&mut self, r0: usize, c0: usize, other: &DenseMatrix<S>) {
        assert!(r0 + other.n_rows <= self.n_rows && c0 + other.n_cols <= self.n_cols);
        for j in 0..other.n_cols {
            for i in 0..other.n_rows {
                self.set(r0 + i, c0 + j, other.get(i, j));
            }
        }
    }

    /// `y = self * x`.
    pub fn matvec(&self, x: &[S]) -> Result<Vec<S>> {
        if x.len() != self.n_cols {
            return Err(Error::dimension(format!(
                "matvec: matrix is {}x{}, vector has length {}",
                self.n_rows,
                self.n_cols,
                x.len()
            )));
        }
        let mut y = vec![S::zero(); self.n_rows];
        for j in 0..self.n_cols {
            let xj = x[j];
            if xj != S::zero() {
                vector::axpy(xj, self.col(j), &mut y);
            }
        }
        Ok(y)
    }

    /// `y = self^* x` (conjugate transpose times vector) without forming the
    /// transpose.
    pub fn adjoint_matvec(&self, x: &[S]) -> Result<Vec<S>> {
        if x.len() != self.n_rows {
            return Err(Error::dimension(format!(
                "adjoint_matvec: matrix is {}x{}, vector has length {}",
                self.n_rows,
                self.n_cols,
                x.len()
            )));
        }
        Ok((0..self.n_cols).map(|j| vector::dot(self.col(j), x)).collect())
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &DenseMatrix<S>) -> Result<DenseMatrix<S>> {
        if self.n_cols != other.n_rows {
            return Err(Error::dimension(format!(
                "matmul: {}x{} times {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        let mut c = DenseMatrix::zeros(self.n_rows, other.n_cols);
        for j in 0..other.n_cols {
            let cj = c.col_mut(j);
            for k in 0..self.n_cols {
                let bkj = other.get(k, j);
                if bkj != S::zero() {
                    let ak = self.col(k);
                    for i in 0..self.n_rows {
                        cj[i] += bkj * ak[i];
                    }
                }
            }
        }
        Ok(c)
    }

    /// `self^* * other`, the adjoint product used for basis compressions.
    pub fn adjoint_matmul(&self, other: &DenseMatrix<S>) -> Result<DenseMatrix<S>> {
        if self.n_rows != other.n_rows {
            return Err(Error::dimension(format!(
                "adjoint_matmul: {}x{} adjoint times {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        let mut c = DenseMatrix::zeros(self.n_cols, other.n_cols);
        for j in 0..other.n_cols {
            let oj = other.col(j);
            for i in 0..self.n_cols {
                c.set(i, j, vector::dot(self.col(i), oj));
            }
        }
        Ok(c)
    }

    pub fn transpose(&self) -> DenseMatrix<S> {
        DenseMatrix::from_fn(self.n_cols, self.n_rows, |i, j| self.get(j, i))
    }

    pub fn conj_transpose(&self) -> DenseMatrix<S> {
        DenseMatrix::from_fn(self.n_cols, self.n_rows, |i, j| self.get(j, i).conj())
    }

    /// Entry-wise map, possibly changing the scalar type.
    pub fn map<T: Scalar>(&self, mut f: impl FnMut(S) -> T) -> DenseMatrix<T> {
        DenseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn add(&self, other: &DenseMatrix<S>) -> Result<DenseMatrix<S>> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DenseMatrix<S>) -> Result<DenseMatrix<S>> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &DenseMatrix<S>, f: impl Fn(S, S) -> S) -> Result<DenseMatrix<S>> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Error::dimension(format!(
                "elementwise op on {}x{} and {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        Ok(DenseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: S) -> DenseMatrix<S> {
        self.map(|v| v * c)
    }

    /// `self += c * other` in place.
    pub fn add_scaled(&mut self, c: S, other: &DenseMatrix<S>) {
        assert_eq!(self.n_rows, other.n_rows);
        assert_eq!(self.n_cols, other.n_cols);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|&v| v.abs_sq()).sum::<f64>().sqrt()
    }

    /// 1-norm (maximum absolute column sum), the cheap norm used to pick the
    /// scaling exponent in the matrix exponential.
    pub fn norm_1(&self) -> f64 {
        (0..self.n_cols)
            .map(|j| self.col(j).iter().map(|&v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|&v| v.abs()).fold(0.0, f64::max)
    }

    /// Largest entry-wise difference, for test assertions.
    pub fn max_diff(&self, other: &DenseMatrix<S>) -> f64 {
        assert_eq!(self.n_rows, other.n_rows);
        assert_eq!(self.n_cols, other.n_cols);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|&v| v.is_finite())
    }

    /// Deviation from the identity of `self^* self`, i.e. how far the columns
    /// are from orthonormal.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.adjoint_matmul(self).expect("square gram");
        g.sub(&DenseMatrix::identity(self.n_cols))
            .expect("same shape")
            .max_abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn matvec_and_matmul_agree_with_hand_computation() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let y = a.matvec(&[1.0, 1.0]).unwrap();
        assert_eq!(y, vec![3.0, 7.0]);
        let b = DenseMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(c, DenseMatrix::from_rows(&[&[2.0, 1.0], &[4.0, 3.0]]).unwrap());
    }

    #[test]
    fn adjoint_product_conjugates() {
        let a = DenseMatrix::from_rows(&[&[Complex64::new(0.0, 1.0)]]).unwrap();
        let g = a.adjoint_matmul(&a).unwrap();
        assert_eq!(g.get(0, 0), Complex64::new(1.0, 0.0));
        let ct = a.conj_transpose();
        assert_eq!(ct.get(0, 0), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn push_col_grows_matrix() {
        let mut m = DenseMatrix::with_rows(3);
        m.push_col(&[1.0, 0.0, 0.0]);
        m.push_col(&[0.0, 1.0, 0.0]);
        assert_eq!(m.n_cols(), 2);
        assert_eq!(m.col(1), &[0.0, 1.0, 0.0]);
        assert!(m.orthonormality_defect() < 1e-15);
    }

    #[test]
    fn blocks_round_trip() {
        let mut m = DenseMatrix::zeros(4, 4);
        let b = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        m.set_block(1, 2, &b);
        assert_eq!(m.block(1, 2, 2, 2), b);
        assert_eq!(m.get(0, 0), 0.0);
    }

    #[test]
    fn norms() {
        let a = DenseMatrix::from_rows(&[&[1.0, -2.0], &[0.0, 2.0]]).unwrap();
        assert_eq!(a.norm_1(), 4.0);
        assert_eq!(a.frobenius_norm(), 3.0);
        assert_eq!(a.max_abs(), 2.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = DenseMatrix::<f64>::zeros(2, 3);
        assert!(a.matvec(&[1.0, 2.0]).is_err());
        let b = DenseMatrix::<f64>::zeros(2, 2);
        assert!(a.matmul(&b).is_err());
    }
}
