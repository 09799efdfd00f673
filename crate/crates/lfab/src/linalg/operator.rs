//! Abstract matrix-vector products.
//!
//! The Krylov routines only ever need `x ↦ Mx`, so they take a
//! [`LinearOperator`] instead of a concrete matrix. The adapters here cover
//! every operator the library composes: scaled matrices, lazy sums
//! `A + εE` (finite differences), the lazy complex perturbation `A + iεE`
//! (complex step), the 2n×2n block embedding `[[A, E], [0, A]]`, rank-one
//! outer products, and the identity.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::sparse::SparseMatrix;
use crate::linalg::vector;
use crate::scalar::Scalar;

pub trait LinearOperator<S: Scalar> {
    fn dim_out(&self) -> usize;
    fn dim_in(&self) -> usize;
    fn apply_into(&self, x: &[S], y: &mut [S]) -> Result<()>;

    fn apply(&self, x: &[S]) -> Result<Vec<S>> {
        let mut y = vec![S::zero(); self.dim_out()];
        self.apply_into(x, &mut y)?;
        Ok(y)
    }
}

fn check_dims<S: Scalar>(op: &dyn LinearOperator<S>, x: &[S], y: &[S]) -> Result<()> {
    if x.len() != op.dim_in() || y.len() != op.dim_out() {
        return Err(Error::dimension(format!(
            "operator is {}x{}, x has length {}, y has length {}",
            op.dim_out(),
            op.dim_in(),
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

impl<S: Scalar> LinearOperator<S> for SparseMatrix<S> {
    fn dim_out(&self) -> usize {
        self.n_rows()
    }
    fn dim_in(&self) -> usize {
        self.n_cols()
    }
    fn apply_into(&self, x: &[S], y: &mut [S]) -> Result<()> {
        self.spmv_into(x, y)
    }
}

impl<S: Scalar> LinearOperator<S> for DenseMatrix<S> {
    fn dim_out(&self) -> usize {
        self.n_rows()
    }
    fn dim_in(&self) -> usize {
        self.n_cols()
    }
    fn apply_into(&self, x: &[S], y: &mut [S]) -> Result<()> {
        let r = self.matvec(x)?;
        if y.len() != r.len() {
            return Err(Error::dimension("dense apply_into output length"));
        }
        y.copy_from_slice(&r);
        Ok(())
    }
}

/// `x ↦ c * (M x)`.
pub struct Scaled<'a, S: Scalar> {
    pub op: &'a dyn LinearOperator<S>,
    pub factor: S,
}

impl<'a, S: Scalar> LinearOperator<S> for Scaled<'a, S> {
    fn dim_out(&self) -> usize {
        self.op.dim_out()
    }
    fn dim_in(&self) -> usize {
        self.op.dim_in()
    }
    fn apply_into(&self, x: &[S], y: &mut [S]) -> Result<()> {
        self.op.apply_into(x, y)?;
        vector::scale_in_place(y, self.factor);
        Ok(())
    }
}

/// Lazy sum `x ↦ A x + ε (E x)`, used by the finite-difference baseline. The
/// two matrices are never merged, so their patterns may differ freely.
pub struct SumScaled<'a, S: Scalar> {
    pub a: &'a dyn LinearOperator<S>,
    pub e: &'a dyn LinearOperator<S>,
    pub eps: S,
}

impl<'a, S: Scalar> LinearOperator<S> for SumScaled<'a, S> {
    fn dim_out(&self) -> usize {
        self.a.dim_out()
    }
    fn dim_in(&self) -> usize {
        self.a.dim_in()
    }
    fn apply_into(&self, x: &[S], y: &mut [S]) -> Result<()> {
        check_dims(self, x, y)?;
        self.a.apply_into(x, y)?;
        let ex = self.e.apply(x)?;
        vector::axpy(self.eps, &ex, y);
        Ok(())
    }
}

/// Lazy complex perturbation `x ↦ A x + iε (E x)` of two *real* matrices,
/// acting on complex vectors. This is the operator behind the complex-step
/// derivative; keeping `A` and `E` real at the type level documents that the
/// trick is only meaningful for real problems.
pub struct ComplexPerturbation<'a> {
    pub a: &'a SparseMatrix<f64>,
    pub e: &'a SparseMatrix<f64>,
    pub eps: f64,
}

impl<'a> LinearOperator<Complex64> for ComplexPerturbation<'a> {
    fn dim_out(&self) -> usize {
        self.a.n_rows()
    }
    fn dim_in(&self) -> usize {
        self.a.n_cols()
    }
    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        check_dims(self, x, y)?;
        for i in 0..self.a.n_rows() {
            let (cols, vals) = self.a.row(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (&j, &v) in cols.iter().zip(vals) {
                acc += x[j].scale(v);
            }
            y[i] = acc;
        }
        let ieps = Complex64::new(0.0, self.eps);
        for i in 0..self.e.n_rows() {
            let (cols, vals) = self.e.row(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (&j, &v) in cols.iter().zip(vals) {
                acc += x[j].scale(v);
            }
            y[i] += ieps * acc;
        }
        Ok(())
    }
}

/// The 2n×2n block upper-triangular embedding
///
/// ```text
/// [ A  E ] [x_top] = [ A x_top + E x_bot ]
/// [ 0  A ] [x_bot]   [ A x_bot           ]
/// ```
///
/// whose function values carry the Fréchet derivative in the off-diagonal
/// block. Applied lazily; the 2n×2n matrix is never formed.
pub struct BlockEmbedding<'a, S: Scalar> {
    a: &'a dyn LinearOperator<S>,
    e: &'a dyn LinearOperator<S>,
    n: usize,
}

impl<'a, S: Scalar> BlockEmbedding<'a, S> {
    pub fn new(a: &'a dyn LinearOperator<S>, e: &'a dyn LinearOperator<S>) -> Result<Self> {
        let n = a.dim_in();
        if a.dim_out() != n || e.dim_in() != n || e.dim_out() != n {
            return Err(Error::dimension(
                "block embedding requires square A and E of equal size",
            ));
        }
        Ok(BlockEmbedding { a, e, n })
    }
}

impl<'a, S: Scalar> LinearOperator<S> for BlockEmbedding<'a, S> {
    fn dim_out(&self) -> usize {
        2 * self.n
    }
    fn dim_in(&self) -> usize {
        2 * self.n
    }
    fn apply_into(&self, x: &[S], y: &mut [S]) -> Result<()> {
        check_dims(self, x, y)?;
        let (x_top, x_bot) = x.split_at(self.n);
        let (y_top, y_bot) = y.split_at_mut(self.n);
        self.a.apply_into(x_top, y_top)?;
        let ex = self.e.apply(x_bot)?;
        vector::axpy(S::one(), &ex, y_top);
        self.a.apply_into(x_bot, y_bot)?;
        Ok(())
    }
}

/// Rank-one direction `E = u v^*`, applied as `x ↦ u (v^* x)` in O(n).
pub struct OuterProduct<S> {
    pub left: Vec<S>,
    pub right: Vec<S>,
}

impl<S: Scalar> LinearOperator<S> for OuterProduct<S> {
    fn dim_out(&self) -> usize {
        self.left.len()
    }
    fn dim_in(&self) -> usize {
        self.right.len()
    }
    fn apply_into(&self, x: &[S], y: &mut [S]) -> Result<()> {
        check_dims(self, x, y)?;
        let c = vector::dot(&self.right, x);
        for (yi, &li) in y.iter_mut().zip(&self.left) {
            *yi = li * c;
        }
        Ok(())
    }
}

pub struct Identity {
    pub n: usize,
}

impl<S: Scalar> LinearOperator<S> for Identity {
    fn dim_out(&self) -> usize {
        self.n
    }
    fn dim_in(&self) -> usize {
        self.n
    }
    fn apply_into(&self, x: &[S], y: &mut [S]) -> Result<()> {
        check_dims(self, x, y)?;
        y.copy_from_slice(x);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> (SparseMatrix<f64>, SparseMatrix<f64>) {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 1, 3.0)])
            .unwrap();
        let e = SparseMatrix::from_triplets(2, 2, &[(1, 0, 5.0)]).unwrap();
        (a, e)
    }

    #[test]
    fn sum_scaled_matches_explicit_sum() {
        let (a, e) = small();
        let op = SumScaled {
            a: &a,
            e: &e,
            eps: 0.5,
        };
        let y = op.apply(&[1.0, 1.0]).unwrap();
        assert_eq!(y, vec![3.0, 5.5]);
    }

    #[test]
    fn block_embedding_applies_blockwise() {
        let (a, e) = small();
        let op = BlockEmbedding::new(&a, &e).unwrap();
        let y = op.apply(&[0.0, 0.0, 1.0, 0.0]).unwrap();
        // top = E [1, 0] = [0, 5]; bottom = A [1, 0] = [2, 0]
        assert_eq!(y, vec![0.0, 5.0, 2.0, 0.0]);
    }

    #[test]
    fn complex_perturbation_splits_parts() {
        let (a, e) = small();
        let op = ComplexPerturbation {
            a: &a,
            e: &e,
            eps: 1e-8,
        };
        let x = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let y = op.apply(&x).unwrap();
        assert_eq!(y[0], Complex64::new(3.0, 0.0));
        assert_eq!(y[1], Complex64::new(3.0, 5e-8));
    }

    #[test]
    fn outer_product_conjugates_right_factor() {
        let op = OuterProduct {
            left: vec![Complex64::new(1.0, 0.0)],
            right: vec![Complex64::new(0.0, 1.0)],
        };
        let y = op.apply(&[Complex64::new(0.0, 1.0)]).unwrap();
        assert_eq!(y[0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn scaled_identity() {
        let id = Identity { n: 2 };
        let op = Scaled {
            op: &id,
            factor: -2.0,
        };
        assert_eq!(op.apply(&[1.0, 3.0]).unwrap(), vec![-2.0, -6.0]);
    }
}
