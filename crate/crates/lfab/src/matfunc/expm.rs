//! Matrix exponential by Padé approximation with scaling and squaring.

use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::lu::LuFactors;
use crate::scalar::Scalar;

/// 1-norm bound under which the degree-13 Padé approximant reaches double
/// precision.
const THETA_13: f64 = 5.371920351148152;

/// Numerator coefficients of the degree-13 diagonal Padé approximant.
const B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Matrix exponential `exp(H)`.
///
/// Scales `H` by `2^-s` until its 1-norm is below the degree-13 Padé
/// threshold, evaluates the approximant, and squares the result `s` times.
/// The degree is fixed at 13 (no order selection for small norms): the
/// matrices here are small compressed blocks, so the extra multiplications
/// are irrelevant next to robustness.
pub fn expm<S: Scalar>(h: &DenseMatrix<S>) -> Result<DenseMatrix<S>> {
    if !h.is_square() {
        return Err(Error::dimension(format!(
            "expm: matrix is {}x{}",
            h.n_rows(),
            h.n_cols()
        )));
    }
    let n = h.n_rows();
    if n == 0 {
        return Ok(DenseMatrix::zeros(0, 0));
    }
    if !h.all_finite() {
        return Err(Error::invalid("expm: matrix has non-finite entries"));
    }
    let eta = h.norm_1();
    let s = if eta > THETA_13 {
        (eta / THETA_13).log2().ceil() as u32
    } else {
        0
    };
    let a = h.scale(S::from_re(0.5f64.powi(s as i32)));

    let id = DenseMatrix::<S>::identity(n);
    let a2 = a.matmul(&a)?;
    let a4 = a2.matmul(&a2)?;
    let a6 = a2.matmul(&a4)?;

    // U = A (A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I)
    let mut w = a6.scale(S::from_re(B[13]));
    w.add_scaled(S::from_re(B[11]), &a4);
    w.add_scaled(S::from_re(B[9]), &a2);
    let mut u_inner = a6.matmul(&w)?;
    u_inner.add_scaled(S::from_re(B[7]), &a6);
    u_inner.add_scaled(S::from_re(B[5]), &a4);
    u_inner.add_scaled(S::from_re(B[3]), &a2);
    u_inner.add_scaled(S::from_re(B[1]), &id);
    let u = a.matmul(&u_inner)?;

    // V = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let mut w2 = a6.scale(S::from_re(B[12]));
    w2.add_scaled(S::from_re(B[10]), &a4);
    w2.add_scaled(S::from_re(B[8]), &a2);
    let mut v = a6.matmul(&w2)?;
    v.add_scaled(S::from_re(B[6]), &a6);
    v.add_scaled(S::from_re(B[4]), &a4);
    v.add_scaled(S::from_re(B[2]), &a2);
    v.add_scaled(S::from_re(B[0]), &id);

    // (V - U) X = (V + U)
    let mut vm = v.clone();
    vm.add_scaled(-S::one(), &u);
    let mut vp = v;
    vp.add_scaled(S::one(), &u);
    let lu = LuFactors::factor(&vm)?;
    let mut x = lu.solve_mat(&vp)?;

    for _ in 0..s {
        x = x.matmul(&x)?;
    }
    if !x.all_finite() {
        return Err(Error::convergence(
            "expm: result overflowed (norm too large for f64)",
        ));
    }
    Ok(x)
}
