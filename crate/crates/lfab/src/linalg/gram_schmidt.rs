//! Orthogonalization of one vector against an orthonormal block.

use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::vector;
use crate::scalar::Scalar;

/// Result of orthogonalizing a vector against a basis block.
#[derive(Debug, Clone)]
pub struct GsStep<S> {
    /// Total projection coefficients onto the basis columns, including the
    /// reorthogonalization correction, so `w = Q coeffs + residual_norm * q_new`.
    pub coeffs: Vec<S>,
    /// Norm of the remainder after orthogonalization.
    pub residual_norm: f64,
    /// Normalized remainder; `None` on breakdown.
    pub q_new: Option<Vec<S>>,
    /// True when the remainder fell below `breakdown_tol * ||w||`, i.e. `w`
    /// is (numerically) inside the span of `Q`.
    pub breakdown: bool,
}

/// Classical Gram-Schmidt step with an optional second pass.
///
/// Orthogonalizes `w` against the columns of `Q` (assumed orthonormal). The
/// single-pass variant loses orthogonality when the projection removes most
/// of `w`; the second pass restores it to working precision, so callers
/// building Krylov bases always set `reorth`. Breakdown is relative: the
/// remainder is compared against `breakdown_tol * ||w||`.
pub fn gram_schmidt_step<S: Scalar>(
    q: &DenseMatrix<S>,
    w: &[S],
    reorth: bool,
    breakdown_tol: f64,
) -> Result<GsStep<S>> {
    if w.len() != q.n_rows() {
        return Err(Error::dimension(format!(
            "gram_schmidt_step: basis has {} rows, vector has length {}",
            q.n_rows(),
            w.len()
        )));
    }
    let w_norm = vector::norm2(w);
    let mut r = w.to_vec();
    let mut coeffs = q.adjoint_matvec(&r)?;
    for (j, &c) in coeffs.iter().enumerate() {
        vector::axpy(-c, q.col(j), &mut r);
    }
    if reorth {
        let corr = q.adjoint_matvec(&r)?;
        for (j, &c) in corr.iter().enumerate() {
            vector::axpy(-c, q.col(j), &mut r);
            coeffs[j] += c;
        }
    }
    let residual_norm = vector::norm2(&r);
    if residual_norm <= breakdown_tol * w_norm {
        return Ok(GsStep {
            coeffs,
            residual_norm,
            q_new: None,
            breakdown: true,
        });
    }
    vector::scale_in_place(&mut r, S::from_re(1.0 / residual_norm));
    Ok(GsStep {
        coeffs,
        residual_norm,
        q_new: Some(r),
        breakdown: false,
    })
}
