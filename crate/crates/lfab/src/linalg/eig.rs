//! Hermitian eigendecomposition by cyclic Jacobi rotations.

use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::scalar::Scalar;

/// Maximum Hermitian defect `max |A - A^*|` tolerated, relative to the
/// largest entry.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Off-diagonal reduction target for the sweep loop, relative to ||A||_F.
const OFF_DIAG_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 40;

pub fn is_hermitian<S: Scalar>(a: &DenseMatrix<S>, rel_tol: f64) -> bool {
    if !a.is_square() {
        return false;
    }
    let scale = a.max_abs().max(1.0);
    for j in 0..a.n_cols() {
        for i in 0..=j {
            if (a.get(i, j) - a.get(j, i).conj()).abs() > rel_tol * scale {
                return false;
            }
        }
    }
    true
}

pub fn is_diagonal<S: Scalar>(a: &DenseMatrix<S>, rel_tol: f64) -> bool {
    if !a.is_square() {
        return false;
    }
    let scale = a.max_abs().max(1.0);
    for j in 0..a.n_cols() {
        for i in 0..a.n_rows() {
            if i != j && a.get(i, j).abs() > rel_tol * scale {
                return false;
            }
        }
    }
    true
}

fn off_diag_norm<S: Scalar>(a: &DenseMatrix<S>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.n_cols() {
        for i in 0..a.n_rows() {
            if i != j {
                s += a.get(i, j).abs_sq();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition `A = V diag(w) V^*` of a Hermitian matrix.
///
/// Returns the eigenvalues ascending and the matching unitary eigenvector
/// columns. Cyclic-by-row Jacobi with the standard stable rotation choice;
/// quadratic convergence makes the sweep cap generous. Non-Hermitian input
/// (beyond a small relative defect) is rejected rather than silently
/// symmetrized.
pub fn hermitian_eigen<S: Scalar>(a: &DenseMatrix<S>) -> Result<(Vec<f64>, DenseMatrix<S>)> {
    if !a.is_square() {
        return Err(Error::dimension(format!(
            "hermitian_eigen: matrix is {}x{}",
            a.n_rows(),
            a.n_cols()
        )));
    }
    if !is_hermitian(a, HERMITIAN_TOL) {
        return Err(Error::invalid(
            "hermitian_eigen: input is not Hermitian within tolerance".to_string(),
        ));
    }
    let n = a.n_rows();
    let mut m = a.clone();
    let mut v = DenseMatrix::<S>::identity(n);
    let norm = m.frobenius_norm().max(f64::MIN_POSITIVE);

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        if off_diag_norm(&m) <= OFF_DIAG_TOL * norm {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                let g = apq.abs();
                if g == 0.0 {
                    continue;
                }
                let app = m.get(p, p).re();
                let aqq = m.get(q, q).re();
                // phase of the off-diagonal entry and real rotation angle
                let phase = apq.scale(1.0 / g);
                let tau = (app - aqq) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;

                // columns: [mp, mq] <- [c*mp + s*phase^*Hmm, ...]
                // Unitary U = [[c, -s*phase], [s*phase^*, c]] acting on
                // columns (p, q); rows get U^*.
                for i in 0..n {
                    let mip = m.get(i, p);
                    let miq = m.get(i, q);
                    m.set(i, p, mip.scale(c) + miq * phase.conj().scale(s));
                    m.set(i, q, miq.scale(c) - mip * phase.scale(s));
                }
                for j in 0..n {
                    let mpj = m.get(p, j);
                    let mqj = m.get(q, j);
                    m.set(p, j, mpj.scale(c) + mqj * phase.scale(s));
                    m.set(q, j, mqj.scale(c) - mpj * phase.conj().scale(s));
                }
                // exact zeros and real diagonal by construction
                m.set(p, q, S::zero());
                m.set(q, p, S::zero());
                m.set(p, p, S::from_re(m.get(p, p).re()));
                m.set(q, q, S::from_re(m.get(q, q).re()));

                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip.scale(c) + viq * phase.conj().scale(s));
                    v.set(i, q, viq.scale(c) - vip * phase.scale(s));
                }
            }
        }
    }
    if !converged && off_diag_norm(&m) > OFF_DIAG_TOL * norm {
        return Err(Error::convergence(format!(
            "jacobi eigensolver did not reach tolerance in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m.get(i, i).re()).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));
    let w: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vs = DenseMatrix::with_rows(n);
    for &j in &order {
        vs.push_col(v.col(j));
    }
    Ok((w, vs))
}

/// Smallest and largest eigenvalue of a Hermitian matrix, the spectral
/// interval used by the a-priori error bound.
pub fn hermitian_extremes<S: Scalar>(a: &DenseMatrix<S>) -> Result<(f64, f64)> {
    let (w, _) = hermitian_eigen(a)?;
    match (w.first(), w.last()) {
        (Some(&lo), Some(&hi)) => Ok((lo, hi)),
        _ => Err(Error::invalid("empty matrix has no spectrum".to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn check_decomposition<S: Scalar>(a: &DenseMatrix<S>, tol: f64) {
        let (w, v) = hermitian_eigen(a).unwrap();
        // residual A V = V diag(w)
        let av = a.matmul(&v).unwrap();
        let vd = v.matmul(&DenseMatrix::from_diag(
            &w.iter().map(|&x| S::from_re(x)).collect::<Vec<_>>(),
        ))
        .unwrap();
        assert!(av.max_diff(&vd) < tol);
        assert!(v.orthonormality_defect() < tol);
        assert!(w.windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn real_symmetric_3x3() {
        let a = DenseMatrix::from_rows(&[
            &[2.0, 1.0, 0.0],
            &[1.0, 3.0, 1.0],
            &[0.0, 1.0, 4.0],
        ])
        .unwrap();
        check_decomposition(&a, 1e-12);
        // eigenvalues of this matrix: 3 and 3 ± sqrt(3)
        let (w, _) = hermitian_eigen(&a).unwrap();
        assert!((w[0] - (3.0 - 3.0f64.sqrt())).abs() < 1e-12);
        assert!((w[1] - 3.0).abs() < 1e-12);
        assert!((w[2] - (3.0 + 3.0f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn complex_hermitian() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let a = DenseMatrix::from_rows(&[
            &[one * 2.0, i, Complex64::new(0.5, -0.5)],
            &[-i, one * 1.0, one * 0.25],
            &[Complex64::new(0.5, 0.5), one * 0.25, one * 3.0],
        ])
        .unwrap();
        check_decomposition(&a, 1e-12);
    }

    #[test]
    fn diagonal_is_fixed_point() {
        let a = DenseMatrix::from_diag(&[3.0, -1.0, 2.0]);
        let (w, _) = hermitian_eigen(&a).unwrap();
        assert_eq!(w, vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        assert!(hermitian_eigen(&a).is_err());
        assert!(!is_hermitian(&a, 1e-12));
    }

    #[test]
    fn extremes_of_known_spectrum() {
        let a = DenseMatrix::from_diag(&[0.5, 7.5, 3.0]);
        let (lo, hi) = hermitian_extremes(&a).unwrap();
        assert_eq!((lo, hi), (0.5, 7.5));
    }

    #[test]
    fn larger_random_symmetric() {
        // deterministic pseudo-random symmetric matrix
        let n = 30;
        let mut a = DenseMatrix::zeros(n, n);
        let mut state = 1u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        for i in 0..n {
            for j in 0..=i {
                let v = next();
                a.set(i, j, v);
                a.set(j, i, v);
            }
        }
        check_decomposition(&a, 1e-11);
    }
}
