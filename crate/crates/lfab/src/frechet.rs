//! Baselines, dense reference oracles, and exact identities for the Fréchet
//! derivative action `L_f(A, E) b`.
//!
//! The derivative is the unique linear-in-`E` map with
//! `f(A + eps E) = f(A) + eps L_f(A, E) + O(eps^2)`. Everything here is
//! either a cheap approximation built on plain Arnoldi (finite difference,
//! complex step) or a dense, size-guarded reference used to validate the
//! structured solver: correctness over scale.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::krylov::arnoldi_fab_final;
use crate::linalg::dense::DenseMatrix;
use crate::linalg::eig;
use crate::linalg::operator::{ComplexPerturbation, SumScaled};
use crate::linalg::sparse::SparseMatrix;
use crate::linalg::vector;
use crate::matfunc::{divided_difference, matfun, FunctionSpec};
use crate::scalar::Scalar;

/// Default step for the complex-step baseline; the method has no subtractive
/// cancellation, so the step can sit far below roundoff.
pub const DEFAULT_CS_EPS: f64 = 1e-20;
/// Dense oracles refuse above this dimension (2n x 2n dense work inside).
pub const DENSE_ORACLE_MAX_DIM: usize = 2000;
/// Identity residuals refuse above this dimension (several dense matrix
/// functions per call).
pub const IDENTITY_MAX_DIM: usize = 500;
/// Eigenvector condition above which an oracle result is flagged.
pub const ORACLE_CONDITION_LIMIT: f64 = 1e8;

/// One Fréchet-action problem instance: square `A`, `E` of equal size, a
/// start vector, and the scalar function.
#[derive(Clone, Copy)]
pub struct FrechetProblem<'a, S: Scalar> {
    pub a: &'a SparseMatrix<S>,
    pub e: &'a SparseMatrix<S>,
    pub b: &'a [S],
    pub f: &'a FunctionSpec,
}

impl<'a, S: Scalar> FrechetProblem<'a, S> {
    pub fn new(
        a: &'a SparseMatrix<S>,
        e: &'a SparseMatrix<S>,
        b: &'a [S],
        f: &'a FunctionSpec,
    ) -> Result<Self> {
        let n = a.n_rows();
        if !a.is_square() || e.n_rows() != n || e.n_cols() != n {
            return Err(Error::dimension(
                "Fréchet problem requires square A and E of equal size",
            ));
        }
        if b.len() != n {
            return Err(Error::dimension(format!(
                "Fréchet problem: start vector has length {}, matrices are {n}x{n}",
                b.len()
            )));
        }
        f.validate()?;
        Ok(FrechetProblem { a, e, b, f })
    }

    pub fn dim(&self) -> usize {
        self.a.n_rows()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    DenseEmbedding,
    DaleckiiKrein,
}

/// Reference values from a dense oracle.
#[derive(Debug, Clone)]
pub struct OracleResult<S> {
    /// Reference `L_f(A, E) b`.
    pub lb: Vec<S>,
    /// Reference `f(A) b`.
    pub fab: Vec<S>,
    pub method: OracleMethod,
    /// Eigenvector condition estimate where an eigendecomposition was used
    /// (1 for the unitary and diagonal cases).
    pub eigenvector_condition: Option<f64>,
    /// Set when the eigenvector condition exceeds [`ORACLE_CONDITION_LIMIT`].
    pub ill_conditioned: bool,
    /// Spectral extremes from the oracle eigendecomposition, when the
    /// spectrum is real.
    pub spectrum_extremes: Option<(f64, f64)>,
}

/// Step-size heuristic for the forward-difference baseline:
/// `1e-5 ||A||_F / ||E||_F`, clamped to `[1e-10, 1e-2]`.
pub fn fd_default_eps<S: Scalar>(a: &SparseMatrix<S>, e: &SparseMatrix<S>) -> f64 {
    let ne = e.frobenius_norm();
    if ne == 0.0 {
        return 1e-5;
    }
    (1e-5 * a.frobenius_norm() / ne).clamp(1e-10, 1e-2)
}

/// Finite-difference baseline:
/// `(f(A + eps E) b - f(A) b) / eps`, both actions approximated with `k`-step
/// Arnoldi. The perturbed matrix is applied lazily; no sparsity patterns are
/// merged. The subtraction caps the accuracy near `sqrt(roundoff)` times the
/// answer scale regardless of `k`.
pub fn fd_arnoldi<S: Scalar>(problem: &FrechetProblem<S>, eps: f64, k: usize) -> Result<Vec<S>> {
    if eps <= 0.0 {
        return Err(Error::invalid(format!("fd_arnoldi: eps = {eps} must be positive")));
    }
    let base = arnoldi_fab_final(problem.a, problem.b, problem.f, k)?;
    let pert_op = SumScaled {
        a: problem.a,
        e: problem.e,
        eps: S::from_re(eps),
    };
    let pert = arnoldi_fab_final(&pert_op, problem.b, problem.f, k)?;
    let mut out = vector::sub(&pert, &base);
    vector::scale_in_place(&mut out, S::from_re(1.0 / eps));
    Ok(out)
}

/// Complex-step baseline for real data:
/// `Im(f(A + i eps E) b) / eps` with a complex-scalar Arnoldi run. No
/// subtraction occurs, so `eps` can be tiny (default 1e-20) and the only
/// error left is the Krylov truncation; defined for real inputs only.
pub fn cs_arnoldi(
    problem: &FrechetProblem<f64>,
    eps: f64,
    k: usize,
) -> Result<Vec<f64>> {
    if eps <= 0.0 {
        return Err(Error::invalid(format!("cs_arnoldi: eps = {eps} must be positive")));
    }
    let op = ComplexPerturbation {
        a: problem.a,
        e: problem.e,
        eps,
    };
    let bz: Vec<Complex64> = problem.b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let x = arnoldi_fab_final(&op, &bz, problem.f, k)?;
    Ok(x.iter().map(|z| z.im / eps).collect())
}

/// Dense top-right block `L_f(A, E)` of `f([[A, E], [0, A]])`, as a matrix.
pub fn dense_frechet_matrix<S: Scalar>(
    a: &DenseMatrix<S>,
    e: &DenseMatrix<S>,
    f: &FunctionSpec,
) -> Result<DenseMatrix<S>> {
    let n = a.n_rows();
    if !a.is_square() || e.n_rows() != n || e.n_cols() != n {
        return Err(Error::dimension(
            "dense_frechet_matrix: square A and E of equal size required",
        ));
    }
    if n > DENSE_ORACLE_MAX_DIM {
        return Err(Error::invalid(format!(
            "dense_frechet_matrix: n = {n} exceeds the dense-work guard {DENSE_ORACLE_MAX_DIM}"
        )));
    }
    let mut m = DenseMatrix::zeros(2 * n, 2 * n);
    m.set_block(0, 0, a);
    m.set_block(0, n, e);
    m.set_block(n, n, a);
    let fm = matfun(f, &m)?;
    Ok(fm.block(0, n, n, n))
}

/// Dense block-embedding oracle: forms `[[A, E], [0, A]]`, applies the matrix
/// function once, and reads off `L_f(A, E) b` (top-right block action) and
/// `f(A) b` (diagonal block action).
pub fn oracle_dense_embedding<S: Scalar>(problem: &FrechetProblem<S>) -> Result<OracleResult<S>> {
    let n = problem.dim();
    if n > DENSE_ORACLE_MAX_DIM {
        return Err(Error::invalid(format!(
            "oracle_dense_embedding: n = {n} exceeds the dense-work guard {DENSE_ORACLE_MAX_DIM}"
        )));
    }
    let mut m = DenseMatrix::zeros(2 * n, 2 * n);
    m.set_block(0, 0, &problem.a.to_dense());
    m.set_block(0, n, &problem.e.to_dense());
    m.set_block(n, n, &problem.a.to_dense());
    let fm = matfun(problem.f, &m)?;
    let mut lb = vec![S::zero(); n];
    let mut fab = vec![S::zero(); n];
    for (j, &bj) in problem.b.iter().enumerate() {
        if bj == S::zero() {
            continue;
        }
        for i in 0..n {
            lb[i] += fm.get(i, n + j) * bj;
            fab[i] += fm.get(n + i, n + j) * bj;
        }
    }
    if !vector::all_finite(&lb) || !vector::all_finite(&fab) {
        return Err(Error::convergence(
            "oracle_dense_embedding: nonfinite result",
        ));
    }
    Ok(OracleResult {
        lb,
        fab,
        method: OracleMethod::DenseEmbedding,
        eigenvector_condition: None,
        ill_conditioned: false,
        spectrum_extremes: None,
    })
}

fn real_extremes<S: Scalar>(lambda: &[S]) -> Option<(f64, f64)> {
    if lambda.is_empty() || lambda.iter().any(|l| l.im() != 0.0) {
        return None;
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for l in lambda {
        lo = lo.min(l.re());
        hi = hi.max(l.re());
    }
    Some((lo, hi))
}

/// Daleckii-Krein oracle: with `A = X diag(lambda) X^{-1}`,
///
/// ```text
/// L_f(A, E) = X ( D .* (X^{-1} E X) ) X^{-1},   D[i][j] = f[lambda_i, lambda_j]
/// ```
///
/// where `f[x, y]` is the first divided difference. Implemented for the two
/// eigendecompositions this crate can do reliably: exactly diagonal `A`
/// (`X = I`) and Hermitian `A` (unitary `X` by Jacobi); both have
/// eigenvector condition 1, so the result is never flagged. Other matrices
/// are refused rather than served from an unverified eigensolver.
pub fn oracle_daleckii_krein<S: Scalar>(
    a: &DenseMatrix<S>,
    e: &DenseMatrix<S>,
    b: &[S],
    f: &FunctionSpec,
) -> Result<OracleResult<S>> {
    f.validate()?;
    let n = a.n_rows();
    if !a.is_square() || e.n_rows() != n || e.n_cols() != n {
        return Err(Error::dimension(
            "oracle_daleckii_krein: square A and E of equal size required",
        ));
    }
    if b.len() != n {
        return Err(Error::dimension(
            "oracle_daleckii_krein: start vector length",
        ));
    }
    if n > DENSE_ORACLE_MAX_DIM {
        return Err(Error::invalid(format!(
            "oracle_daleckii_krein: n = {n} exceeds the dense-work guard {DENSE_ORACLE_MAX_DIM}"
        )));
    }

    if eig::is_diagonal(a, 0.0) {
        let lambda: Vec<S> = (0..n).map(|i| a.get(i, i)).collect();
        let mut lb = vec![S::zero(); n];
        for j in 0..n {
            if b[j] == S::zero() {
                continue;
            }
            for i in 0..n {
                let eij = e.get(i, j);
                if eij == S::zero() {
                    continue;
                }
                lb[i] += divided_difference(f, lambda[i], lambda[j]) * eij * b[j];
            }
        }
        let fab: Vec<S> = (0..n).map(|i| f.eval(lambda[i]) * b[i]).collect();
        return Ok(OracleResult {
            lb,
            fab,
            method: OracleMethod::DaleckiiKrein,
            eigenvector_condition: Some(1.0),
            ill_conditioned: false,
            spectrum_extremes: real_extremes(&lambda),
        });
    }

    if eig::is_hermitian(a, eig::HERMITIAN_TOL) {
        let (w, q) = eig::hermitian_eigen(a)?;
        // E in the eigenbasis: Q^* E Q
        let eq = e.matmul(&q)?;
        let et = q.adjoint_matmul(&eq)?;
        // Hadamard with the divided-difference table, then map back
        let mut core = DenseMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                let d = divided_difference(f, S::from_re(w[i]), S::from_re(w[j]));
                core.set(i, j, d * et.get(i, j));
            }
        }
        let qb = q.adjoint_matvec(b)?;
        let lb = q.matvec(&core.matvec(&qb)?)?;
        let mut fqb = qb;
        for (i, x) in fqb.iter_mut().enumerate() {
            *x = *x * S::from_re(f.eval(w[i]));
        }
        let fab = q.matvec(&fqb)?;
        return Ok(OracleResult {
            lb,
            fab,
            method: OracleMethod::DaleckiiKrein,
            eigenvector_condition: Some(1.0),
            ill_conditioned: false,
            spectrum_extremes: Some((w[0], w[n - 1])),
        });
    }

    Err(Error::unsupported(
        "oracle_daleckii_krein handles diagonal and Hermitian matrices; use oracle_dense_embedding otherwise",
    ))
}

/// Exact `L_p(A, E) b` for a polynomial `p` by the monomial sum
/// `L_{z^d}(A, E) = sum_{l=0}^{d-1} A^l E A^{d-1-l}`, applied to `b` term by
/// term with sparse products only. Deliberately naive: this is the oracle
/// the fast path is judged against.
pub fn poly_frechet_action<S: Scalar>(
    a: &SparseMatrix<S>,
    e: &SparseMatrix<S>,
    b: &[S],
    coeffs: &[f64],
) -> Result<Vec<S>> {
    let n = a.n_rows();
    if !a.is_square() || e.n_rows() != n || e.n_cols() != n || b.len() != n {
        return Err(Error::dimension("poly_frechet_action: shape mismatch"));
    }
    // a_pow_b[m] = A^m b for m = 0..=deg-1
    let deg = coeffs.len().saturating_sub(1);
    let mut a_pow_b: Vec<Vec<S>> = Vec::with_capacity(deg.max(1));
    a_pow_b.push(b.to_vec());
    for _ in 1..deg {
        let last = a_pow_b.last().expect("nonempty");
        a_pow_b.push(a.spmv(last)?);
    }
    let mut out = vec![S::zero(); n];
    for (d, &cd) in coeffs.iter().enumerate().skip(1) {
        if cd == 0.0 {
            continue;
        }
        for l in 0..d {
            // term = A^l E A^{d-1-l} b
            let mut t = e.spmv(&a_pow_b[d - 1 - l])?;
            for _ in 0..l {
                t = a.spmv(&t)?;
            }
            vector::axpy(S::from_re(cd), &t, &mut out);
        }
    }
    Ok(out)
}

fn identity_scale_guard(n: usize, what: &str) -> Result<()> {
    if n > IDENTITY_MAX_DIM {
        return Err(Error::invalid(format!(
            "{what}: n = {n} exceeds the identity-check guard {IDENTITY_MAX_DIM}"
        )));
    }
    Ok(())
}

fn outer<S: Scalar>(c: &[S], b: &[S]) -> DenseMatrix<S> {
    DenseMatrix::from_fn(c.len(), b.len(), |i, j| c[i] * b[j].conj())
}

fn rel_scalar_residual<S: Scalar>(lhs: S, rhs: S) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        return 0.0;
    }
    (lhs - rhs).abs() / scale
}

/// Residual of the adjoint identity
///
/// ```text
/// c^* L_f(A, E) b = < L_f(A^*, c b^*), E >,   <X, Y> = trace(X^* Y),
/// ```
///
/// both sides evaluated densely. This is the form the identity's derivation
/// proves (note the adjoint on `A`); see [`adjoint_statement_residual`] for
/// the weaker variant without it.
pub fn adjoint_identity_residual<S: Scalar>(
    a: &SparseMatrix<S>,
    e: &SparseMatrix<S>,
    b: &[S],
    c: &[S],
    f: &FunctionSpec,
) -> Result<f64> {
    identity_scale_guard(a.n_rows(), "adjoint_identity_residual")?;
    adjoint_residual_impl(a, e, b, c, f, true)
}

/// Residual of the identity as often quoted, without the adjoint on `A`:
/// `c^* L_f(A, E) b = < L_f(A, c b^*), E >`. Coincides with
/// [`adjoint_identity_residual`] for Hermitian `A` and is generally nonzero
/// otherwise; exposed as a diagnostic for exactly that comparison.
pub fn adjoint_statement_residual<S: Scalar>(
    a: &SparseMatrix<S>,
    e: &SparseMatrix<S>,
    b: &[S],
    c: &[S],
    f: &FunctionSpec,
) -> Result<f64> {
    identity_scale_guard(a.n_rows(), "adjoint_statement_residual")?;
    adjoint_residual_impl(a, e, b, c, f, false)
}

fn adjoint_residual_impl<S: Scalar>(
    a: &SparseMatrix<S>,
    e: &SparseMatrix<S>,
    b: &[S],
    c: &[S],
    f: &FunctionSpec,
    use_adjoint: bool,
) -> Result<f64> {
    let n = a.n_rows();
    if b.len() != n || c.len() != n {
        return Err(Error::dimension("adjoint residual: vector length"));
    }
    let problem = FrechetProblem::new(a, e, b, f)?;
    let oracle = oracle_dense_embedding(&problem)?;
    let lhs = vector::dot(c, &oracle.lb);

    let ad = a.to_dense();
    let aside = if use_adjoint { ad.conj_transpose() } else { ad };
    let m = dense_frechet_matrix(&aside, &outer(c, b), f)?;
    // <M, E> = trace(M^* E) = sum conj(M_ij) E_ij over stored entries
    let mut rhs = S::zero();
    for (i, j, x) in e.triplets() {
        rhs += m.get(i, j).conj() * x;
    }
    Ok(rel_scalar_residual(lhs, rhs))
}

/// Rank-one direction reduction: returns the pair
///
/// ```text
/// lhs = c^* L_f(A, x y^*) b,    rhs = conj( x^* L_f(A^*, c b^*) y ),
/// ```
///
/// equal by the adjoint identity with `E = x y^*`. The reduction is what
/// turns an n^2-direction sensitivity query into a single action on a
/// rank-one direction.
pub fn rank_one_reduction<S: Scalar>(
    a: &SparseMatrix<S>,
    x: &[S],
    y: &[S],
    b: &[S],
    c: &[S],
    f: &FunctionSpec,
) -> Result<(S, S)> {
    let n = a.n_rows();
    identity_scale_guard(n, "rank_one_reduction")?;
    if !a.is_square() || [x, y, b, c].iter().any(|v| v.len() != n) {
        return Err(Error::dimension("rank_one_reduction: shape mismatch"));
    }
    f.validate()?;
    let ad = a.to_dense();
    let l = dense_frechet_matrix(&ad, &outer(x, y), f)?;
    let lhs = vector::dot(c, &l.matvec(b)?);
    let m = dense_frechet_matrix(&ad.conj_transpose(), &outer(c, b), f)?;
    let rhs = vector::dot(x, &m.matvec(y)?).conj();
    Ok((lhs, rhs))
}
