//! Principal matrix square root by the scaled Denman-Beavers iteration.

use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::lu::LuFactors;
use crate::scalar::Scalar;

const STEP_TOL: f64 = 1e-14;
const RESIDUAL_TOL: f64 = 1e-10;
const MAX_ITERS: usize = 50;
/// Below this relative step the iteration is in its quadratic phase and
/// determinant scaling is switched off (continuing to scale near the fixed
/// point stalls the iteration just above `STEP_TOL`).
const SCALING_CUTOFF: f64 = 1e-2;

/// Principal square root `X` of `H`, i.e. `X^2 = H` with spectrum in the
/// right half plane.
///
/// Runs the coupled iteration `Y <- (μY + (μZ)^-1)/2`, `Z <- (μZ + (μY)^-1)/2`
/// from `Y = H`, `Z = I`, with determinant scaling
/// `μ = |det(Y) det(Z)|^(-1/(2n))` computed from LU log-magnitudes so large
/// dimensions cannot overflow. `Y` converges to `H^(1/2)` and `Z` to
/// `H^(-1/2)` quadratically. The principal-branch requirement (no eigenvalue
/// of `H` on the closed negative real axis) is not checked a priori; a
/// violation surfaces as a singular iterate or a failed residual check, both
/// reported as convergence errors.
pub fn sqrtm<S: Scalar>(h: &DenseMatrix<S>) -> Result<DenseMatrix<S>> {
    if !h.is_square() {
        return Err(Error::dimension(format!(
            "sqrtm: matrix is {}x{}",
            h.n_rows(),
            h.n_cols()
        )));
    }
    let n = h.n_rows();
    if n == 0 {
        return Ok(DenseMatrix::zeros(0, 0));
    }
    if !h.all_finite() {
        return Err(Error::invalid("sqrtm: matrix has non-finite entries"));
    }
    let h_norm = h.frobenius_norm();

    let mut y = h.clone();
    let mut z = DenseMatrix::<S>::identity(n);
    let mut scaling = true;
    let mut converged = false;

    for iter in 0..MAX_ITERS {
        let lu_y = LuFactors::factor(&y).map_err(|_| {
            Error::convergence(format!(
                "sqrtm: singular iterate at step {iter} (eigenvalue on the negative real axis?)"
            ))
        })?;
        let lu_z = LuFactors::factor(&z)
            .map_err(|_| Error::convergence(format!("sqrtm: singular dual iterate at step {iter}")))?;
        let mu = if scaling {
            (-(lu_y.log_abs_det() + lu_z.log_abs_det()) / (2.0 * n as f64)).exp()
        } else {
            1.0
        };
        let y_inv = lu_y.inverse()?;
        let z_inv = lu_z.inverse()?;

        // Y_next = (mu Y + (mu Z)^-1) / 2, and symmetrically for Z
        let mut y_next = y.scale(S::from_re(0.5 * mu));
        y_next.add_scaled(S::from_re(0.5 / mu), &z_inv);
        let mut z_next = z.scale(S::from_re(0.5 * mu));
        z_next.add_scaled(S::from_re(0.5 / mu), &y_inv);

        let step = y_next.sub(&y)?.frobenius_norm();
        let scale = y_next.frobenius_norm().max(f64::MIN_POSITIVE);
        y = y_next;
        z = z_next;
        if !y.all_finite() || !z.all_finite() {
            return Err(Error::convergence(
                "sqrtm: iteration produced non-finite values",
            ));
        }
        let rel_step = step / scale;
        if rel_step < SCALING_CUTOFF {
            scaling = false;
        }
        if rel_step <= STEP_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::convergence(format!(
            "sqrtm: no convergence in {MAX_ITERS} iterations"
        )));
    }
    let residual = y.matmul(&y)?.sub(h)?.frobenius_norm();
    if residual > RESIDUAL_TOL * h_norm.max(f64::MIN_POSITIVE) {
        return Err(Error::convergence(format!(
            "sqrtm: residual {residual:.3e} exceeds {RESIDUAL_TOL:.1e} * ||H|| = {:.3e}",
            RESIDUAL_TOL * h_norm
        )));
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn diagonal_matrix() {
        let h = DenseMatrix::from_diag(&[4.0, 9.0, 0.25]);
        let x = sqrtm(&h).unwrap();
        assert!((x.get(0, 0) - 2.0).abs() < 1e-13);
        assert!((x.get(1, 1) - 3.0).abs() < 1e-13);
        assert!((x.get(2, 2) - 0.5).abs() < 1e-13);
        assert!(x.get(1, 0).abs() < 1e-14);
    }

    #[test]
    fn residual_on_nonnormal_matrix() {
        let h = DenseMatrix::from_rows(&[
            &[4.0, 1.0, 0.0],
            &[0.5, 6.0, -1.0],
            &[0.0, 0.25, 5.0],
        ])
        .unwrap();
        let x = sqrtm(&h).unwrap();
        let res = x.matmul(&x).unwrap().sub(&h).unwrap().frobenius_norm();
        assert!(res < 1e-12 * h.frobenius_norm());
    }

    #[test]
    fn principal_branch_right_half_plane() {
        // sqrt of a rotation-like SPD matrix stays SPD
        let h = DenseMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let x = sqrtm(&h).unwrap();
        // eigenvalues of H are 1, 3; eigenvalues of X must be 1, sqrt(3)
        let tr = x.get(0, 0) + x.get(1, 1);
        let det = x.get(0, 0) * x.get(1, 1) - x.get(0, 1) * x.get(1, 0);
        assert!((tr - (1.0 + 3.0f64.sqrt())).abs() < 1e-12);
        assert!((det - 3.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn complex_spectrum() {
        let i = Complex64::new(0.0, 1.0);
        let h = DenseMatrix::from_diag(&[Complex64::new(0.0, 4.0), Complex64::new(1.0, -1.0)]);
        let x = sqrtm(&h).unwrap();
        // principal sqrt(4i) = sqrt(2)(1 + i)
        let expect = (Complex64::new(0.0, 4.0)).sqrt();
        assert!((x.get(0, 0) - expect).abs() < 1e-13);
        assert!(x.get(0, 0).re > 0.0);
        let _ = i;
    }

    #[test]
    fn badly_scaled_matrix_needs_determinant_scaling() {
        // Without scaling, DB needs ~ log2(kappa) extra iterations; with
        // determinant scaling this converges well inside the cap.
        let h = DenseMatrix::from_diag(&[1e-8, 1.0, 1e8]);
        let x = sqrtm(&h).unwrap();
        assert!((x.get(0, 0) - 1e-4).abs() / 1e-4 < 1e-10);
        assert!((x.get(2, 2) - 1e4).abs() / 1e4 < 1e-10);
    }

    #[test]
    fn singular_matrix_is_a_convergence_error() {
        let h = DenseMatrix::from_diag(&[1.0, 0.0]);
        match sqrtm(&h) {
            Err(Error::Convergence(_)) => {}
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn negative_real_eigenvalue_fails_cleanly() {
        // real data, spectrum {-1, 2}: principal root leaves the reals, the
        // real iteration cannot represent it and must error rather than
        // return garbage.
        let h = DenseMatrix::from_diag(&[-1.0, 2.0]);
        assert!(sqrtm(&h).is_err());
    }
}
