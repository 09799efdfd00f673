//! LU factorization with partial pivoting.

use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::scalar::Scalar;

/// Packed LU factors of a square matrix: `P A = L U` with unit-diagonal `L`
/// stored below the diagonal of `lu` and `U` on and above it.
pub struct LuFactors<S> {
    lu: DenseMatrix<S>,
    /// `piv[k]` is the row swapped into position `k` at elimination step `k`.
    piv: Vec<usize>,
}

impl<S: Scalar> LuFactors<S> {
    pub fn factor(a: &DenseMatrix<S>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::dimension(format!(
                "lu: matrix is {}x{}",
                a.n_rows(),
                a.n_cols()
            )));
        }
        let n = a.n_rows();
        let mut lu = a.clone();
        let mut piv = Vec::with_capacity(n);
        for k in 0..n {
            // pivot search in column k
            let mut p = k;
            let mut best = lu.get(k, k).abs();
            for i in (k + 1)..n {
                let v = lu.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::convergence(format!(
                    "lu: matrix is singular (zero pivot at step {k})"
                )));
            }
            piv.push(p);
            if p != k {
                for j in 0..n {
                    let t = lu.get(k, j);
                    lu.set(k, j, lu.get(p, j));
                    lu.set(p, j, t);
                }
            }
            let inv_pivot = S::one() / lu.get(k, k);
            for i in (k + 1)..n {
                let m = lu.get(i, k) * inv_pivot;
                lu.set(i, k, m);
                if m != S::zero() {
                    for j in (k + 1)..n {
                        let v = lu.get(i, j) - m * lu.get(k, j);
                        lu.set(i, j, v);
                    }
                }
            }
        }
        Ok(LuFactors { lu, piv })
    }

    pub fn n(&self) -> usize {
        self.lu.n_rows()
    }

    /// Solve `A x = b`.
    pub fn solve_vec(&self, b: &[S]) -> Result<Vec<S>> {
        let n = self.n();
        if b.len() != n {
            return Err(Error::dimension(format!(
                "lu solve: system is {}x{}, rhs has length {}",
                n,
                n,
                b.len()
            )));
        }
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
        }
        // forward substitution with unit L
        for k in 0..n {
            let xk = x[k];
            if xk != S::zero() {
                for i in (k + 1)..n {
                    let m = self.lu.get(i, k);
                    x[i] -= m * xk;
                }
            }
        }
        // back substitution with U
        for k in (0..n).rev() {
            x[k] /= self.lu.get(k, k);
            let xk = x[k];
            if xk != S::zero() {
                for i in 0..k {
                    let u = self.lu.get(i, k);
                    x[i] -= u * xk;
                }
            }
        }
        Ok(x)
    }

    /// Solve `A X = B` column by column.
    pub fn solve_mat(&self, b: &DenseMatrix<S>) -> Result<DenseMatrix<S>> {
        let mut x = DenseMatrix::with_rows(b.n_rows());
        for j in 0..b.n_cols() {
            x.push_col(&self.solve_vec(b.col(j))?);
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<DenseMatrix<S>> {
        self.solve_mat(&DenseMatrix::identity(self.n()))
    }

    /// `ln |det A|`, computed from the pivot magnitudes. Safe against
    /// overflow for large, well-scaled matrices, which is what the
    /// determinant-scaled square-root iteration needs.
    pub fn log_abs_det(&self) -> f64 {
        (0..self.n())
            .map(|k| self.lu.get(k, k).abs().ln())
            .sum()
    }
}

/// One-shot dense solve.
pub fn solve<S: Scalar>(a: &DenseMatrix<S>, b: &[S]) -> Result<Vec<S>> {
    LuFactors::factor(a)?.solve_vec(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn solves_a_known_system() {
        let a = DenseMatrix::from_rows(&[
            &[2.0, 1.0, 0.0],
            &[1.0, 3.0, 1.0],
            &[0.0, 1.0, 4.0],
        ])
        .unwrap();
        let x_true = vec![1.0, -2.0, 3.0];
        let b = a.matvec(&x_true).unwrap();
        let x = solve(&a, &b).unwrap();
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).abs() < 1e-13);
        }
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = DenseMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let x = solve(&a, &[3.0, 7.0]).unwrap();
        assert_eq!(x, vec![7.0, 3.0]);
    }

    #[test]
    fn singular_matrix_is_an_error() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(LuFactors::factor(&a).is_err());
    }

    #[test]
    fn inverse_and_log_det() {
        let a = DenseMatrix::from_rows(&[&[4.0, 0.0], &[0.0, 0.25]]).unwrap();
        let f = LuFactors::factor(&a).unwrap();
        let inv = f.inverse().unwrap();
        assert!(inv.max_diff(&DenseMatrix::from_rows(&[&[0.25, 0.0], &[0.0, 4.0]]).unwrap()) < 1e-15);
        assert!(f.log_abs_det().abs() < 1e-15); // det = 1
    }

    #[test]
    fn complex_system() {
        // det = i*i - 1 = -2, comfortably nonsingular
        let a = DenseMatrix::from_rows(&[
            &[Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)],
            &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
        ])
        .unwrap();
        let x_true = vec![Complex64::new(1.0, 2.0), Complex64::new(-3.0, 0.5)];
        let b = a.matvec(&x_true).unwrap();
        let x = solve(&a, &b).unwrap();
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).abs() < 1e-13);
        }
    }
}
