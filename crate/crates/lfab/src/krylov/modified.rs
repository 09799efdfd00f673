//! Fréchet-derivative action via the separately orthonormalized recurrence.
//!
//! `modified_arnoldi` approximates the pair
//!
//! ```text
//! v1 ~ L_f(A, E) b        (derivative of X -> f(X) at A, applied to E, times b)
//! v2 ~ f(A) b
//! ```
//!
//! by running the two-track recurrence of [`super::structured`] and, at
//! checkpoints, evaluating `f` on the small compressed surrogate
//! `[[U^* A U, U^* E V], [0, V^* A V]]`. The bottom-right block reproduces
//! plain Arnoldi for `f(A) b`, so `v2` costs nothing extra.
//!
//! `modified_arnoldi_basic` is the reference formulation that first builds
//! the orthonormal basis of the doubled operator `[[A, E], [0, A]]` and then
//! orthonormalizes the stacked top and bottom halves separately. Both
//! variants compress onto the same pair of subspaces, and the extracted
//! `v1`, `v2` are invariant under unitary within-span basis changes, so their
//! outputs agree to roundoff; the recurrence form just never touches a
//! 2n-vector.

use crate::error::{Error, Result};
use crate::frechet;
use crate::linalg::operator::{BlockEmbedding, LinearOperator};
use crate::linalg::sparse::SparseMatrix;
use crate::linalg::{dense::DenseMatrix, eig, gram_schmidt::gram_schmidt_step, vector};
use crate::matfunc::{chebyshev_uniform_error, matfun, FunctionSpec};
use crate::scalar::Scalar;

use super::structured::{OrthOptions, StepOutcome, Stepper};
use super::{arnoldi, SweepPoint, UpdateRecord, BREAKDOWN_TOL};

#[derive(Debug, Clone, Copy)]
pub struct ModifiedOptions {
    /// Stop once the relative change of `v1` between checkpoints drops to
    /// this value or below (0 disables early stopping in practice).
    pub stop_tol: f64,
    /// Evaluate the surrogate every this many steps (and always at the end).
    pub check_every: usize,
    pub orth: OrthOptions,
}

impl Default for ModifiedOptions {
    fn default() -> Self {
        ModifiedOptions {
            stop_tol: 0.0,
            check_every: 5,
            orth: OrthOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FrechetResult<S> {
    /// Approximation of `L_f(A, E) b`.
    pub v1: Vec<S>,
    /// Approximation of `f(A) b`.
    pub v2: Vec<S>,
    /// Relative `v1` change at each checkpoint (first entry is 1 by
    /// convention).
    pub history: Vec<UpdateRecord>,
    /// Completed recurrence steps.
    pub steps: usize,
    pub beta_breakdown: bool,
    pub deflations: usize,
}

/// Approximate `L_f(A, E) b` and `f(A) b` with at most `k` recurrence steps,
/// stopping early when the checkpointed relative update of `v1` falls to
/// `stop_tol` or below.
pub fn modified_arnoldi<S: Scalar>(
    a: &SparseMatrix<S>,
    e: &SparseMatrix<S>,
    b: &[S],
    f: &FunctionSpec,
    k: usize,
    stop_tol: f64,
) -> Result<FrechetResult<S>> {
    let opts = ModifiedOptions {
        stop_tol,
        ..ModifiedOptions::default()
    };
    modified_arnoldi_op(a, e, b, f, k, opts)
}

/// Operator form of [`modified_arnoldi`]: `A` and `E` only need to provide
/// their action on a vector.
pub fn modified_arnoldi_op<S: Scalar>(
    aop: &dyn LinearOperator<S>,
    eop: &dyn LinearOperator<S>,
    b: &[S],
    f: &FunctionSpec,
    k: usize,
    opts: ModifiedOptions,
) -> Result<FrechetResult<S>> {
    f.validate()?;
    if k == 0 || k > aop.dim_in() {
        return Err(Error::invalid(format!(
            "modified_arnoldi: k = {k} not in 1..={}",
            aop.dim_in()
        )));
    }
    let check_every = opts.check_every.max(1);
    let mut st = Stepper::new(aop, eop, b, opts.orth)?;
    let mut history: Vec<UpdateRecord> = Vec::new();
    let mut prev_v1: Option<Vec<S>> = None;
    let mut pair: Option<(Vec<S>, Vec<S>)> = None;

    for i in 1..=k {
        let broke = matches!(st.step()?, StepOutcome::BetaBreakdown);
        if broke || i % check_every == 0 || i == k {
            let (v1, v2) = st.evaluate(f)?;
            let update = match &prev_v1 {
                None => 1.0,
                Some(p) => vector::rel_dist(&v1, p),
            };
            history.push(UpdateRecord {
                k: st.steps(),
                update_norm: update,
            });
            prev_v1 = Some(v1.clone());
            let converged = history.len() > 1 && update <= opts.stop_tol;
            pair = Some((v1, v2));
            if broke || converged {
                break;
            }
        }
    }
    let (v1, v2) = pair.expect("loop evaluates at least once");
    Ok(FrechetResult {
        v1,
        v2,
        history,
        steps: st.steps(),
        beta_breakdown: st.beta_breakdown(),
        deflations: st.deflations(),
    })
}

/// Evaluate one run at several step counts, reusing a single basis build.
/// `ks` is deduplicated and sorted; a bottom breakdown truncates the list.
pub fn modified_sweep<S: Scalar>(
    aop: &dyn LinearOperator<S>,
    eop: &dyn LinearOperator<S>,
    b: &[S],
    f: &FunctionSpec,
    ks: &[usize],
) -> Result<Vec<SweepPoint<S>>> {
    f.validate()?;
    let mut ks: Vec<usize> = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    if ks.is_empty() || ks[0] == 0 {
        return Err(Error::invalid(
            "modified_sweep: need a nonempty list of positive step counts",
        ));
    }
    let k_max = *ks.last().expect("nonempty");
    if k_max > aop.dim_in() {
        return Err(Error::invalid(format!(
            "modified_sweep: k = {k_max} exceeds dimension {}",
            aop.dim_in()
        )));
    }
    let mut st = Stepper::new(aop, eop, b, OrthOptions::default())?;
    let mut points: Vec<SweepPoint<S>> = Vec::new();
    for i in 1..=k_max {
        if matches!(st.step()?, StepOutcome::BetaBreakdown) {
            let already = points.last().is_some_and(|p| p.k == st.steps());
            if !already {
                let (v1, v2) = st.evaluate(f)?;
                points.push(SweepPoint {
                    k: st.steps(),
                    v1,
                    v2,
                });
            }
            break;
        }
        if ks.binary_search(&i).is_ok() {
            let (v1, v2) = st.evaluate(f)?;
            points.push(SweepPoint { k: i, v1, v2 });
        }
    }
    Ok(points)
}

/// Reference formulation: Arnoldi on the doubled operator, then separate
/// orthonormalization of the stacked top and bottom halves of that basis.
/// Costs 2n storage and arithmetic; exists to cross-check the recurrence.
pub fn modified_arnoldi_basic<S: Scalar>(
    a: &SparseMatrix<S>,
    e: &SparseMatrix<S>,
    b: &[S],
    f: &FunctionSpec,
    k: usize,
) -> Result<FrechetResult<S>> {
    f.validate()?;
    let n = a.n_rows();
    let emb = BlockEmbedding::new(a, e)?;
    if b.len() != n {
        return Err(Error::dimension(format!(
            "start vector has length {}, matrices are {n}x{n}",
            b.len()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "modified_arnoldi_basic: k = {k} not in 1..={n}"
        )));
    }
    let mut b2 = vec![S::zero(); 2 * n];
    b2[n..].copy_from_slice(b);
    let dec = arnoldi(&emb, &b2, k, BREAKDOWN_TOL)?;
    let q_cols = dec.basis.n_cols();

    // orthonormalize the two stacks separately; the top of column 0 is
    // exactly zero and is skipped, dependent columns deflate.
    let mut u = DenseMatrix::<S>::with_rows(n);
    let mut deflations = 0usize;
    for i in 1..q_cols {
        let x_i = dec.basis.col(i)[..n].to_vec();
        let gs = gram_schmidt_step(&u, &x_i, true, BREAKDOWN_TOL)?;
        match gs.q_new {
            Some(q) => u.push_col(&q),
            None => deflations += 1,
        }
    }
    let mut v = DenseMatrix::<S>::with_rows(n);
    for i in 0..q_cols {
        let y_i = dec.basis.col(i)[n..].to_vec();
        let gs = gram_schmidt_step(&v, &y_i, true, BREAKDOWN_TOL)?;
        if let Some(q) = gs.q_new {
            v.push_col(&q);
        }
    }

    let r = u.n_cols();
    let kv = v.n_cols();
    let mut au = DenseMatrix::<S>::with_rows(n);
    for j in 0..r {
        au.push_col(&a.spmv(u.col(j))?);
    }
    let mut av = DenseMatrix::<S>::with_rows(n);
    let mut ev = DenseMatrix::<S>::with_rows(n);
    for j in 0..kv {
        av.push_col(&a.spmv(v.col(j))?);
        ev.push_col(&e.spmv(v.col(j))?);
    }
    let mut c = DenseMatrix::zeros(r + kv, r + kv);
    c.set_block(0, 0, &u.adjoint_matmul(&au)?);
    c.set_block(0, r, &u.adjoint_matmul(&ev)?);
    c.set_block(r, r, &v.adjoint_matmul(&av)?);
    let fc = matfun(f, &c)?;

    // extraction: v1 = U (F12 vb), v2 = V (F22 vb) with vb = V^* b
    let vb = v.adjoint_matvec(b)?;
    let mut v1 = vec![S::zero(); n];
    let mut v2 = vec![S::zero(); n];
    let mut f12_vb = vec![S::zero(); r];
    let mut f22_vb = vec![S::zero(); kv];
    for (jj, &w) in vb.iter().enumerate() {
        for (i, item) in f12_vb.iter_mut().enumerate() {
            *item += fc.get(i, r + jj) * w;
        }
        for (i, item) in f22_vb.iter_mut().enumerate() {
            *item += fc.get(r + i, r + jj) * w;
        }
    }
    for (j, &c) in f12_vb.iter().enumerate() {
        vector::axpy(c, u.col(j), &mut v1);
    }
    for (j, &c) in f22_vb.iter().enumerate() {
        vector::axpy(c, v.col(j), &mut v2);
    }

    Ok(FrechetResult {
        v1,
        v2,
        history: Vec::new(),
        steps: dec.steps,
        beta_breakdown: dec.breakdown,
        deflations,
    })
}

/// Relative error of the recurrence against the exact polynomial action
/// `L_p(A, E) b`, computed term by term. For a polynomial of degree `d` and
/// `k >= d` the compression is exact, so the result should sit at roundoff.
pub fn exactness_check<S: Scalar>(
    a: &SparseMatrix<S>,
    e: &SparseMatrix<S>,
    b: &[S],
    coeffs: &[f64],
    k: usize,
) -> Result<f64> {
    let f = FunctionSpec::Polynomial {
        coeffs: coeffs.to_vec(),
    };
    let res = modified_arnoldi(a, e, b, &f, k, 0.0)?;
    let exact = frechet::poly_frechet_action(a, e, b, coeffs)?;
    Ok(vector::rel_dist(&res.v1, &exact))
}

/// A-priori error bound check for Hermitian `A` (where the compression
/// constant is 1): after `k` steps,
///
/// ```text
/// ||L_f(A, E) b - v1||  <=  2 ||b|| ||E||_F  inf_{deg q <= k-2} sup |f' - q|
/// ```
///
/// with the sup over the spectral interval of `A`. The infimum is replaced
/// by an upper proxy, the Chebyshev interpolant of `f'` of degree `k - 2`.
#[derive(Debug, Clone)]
pub struct BoundReport {
    /// Measured error `||exact v1 - computed v1||_2`.
    pub lhs: f64,
    /// Bound value `2 ||b|| ||E||_F sup_proxy`.
    pub rhs: f64,
    /// Uniform error of the Chebyshev interpolant of `f'` (upper proxy for
    /// the best-approximation infimum).
    pub sup_proxy: f64,
    /// Lebesgue-constant bound certifying the proxy overestimates the
    /// infimum by at most this factor.
    pub lebesgue_bound: f64,
    pub spectral_interval: (f64, f64),
    /// Whether `lhs <= rhs` held.
    pub holds: bool,
}

pub fn verify_theorem_bound<S: Scalar>(
    a: &SparseMatrix<S>,
    e: &SparseMatrix<S>,
    b: &[S],
    f: &FunctionSpec,
    k: usize,
) -> Result<BoundReport> {
    f.validate()?;
    let n = a.n_rows();
    if n > 2000 {
        return Err(Error::invalid(format!(
            "bound verification needs a dense eigendecomposition; n = {n} is too large"
        )));
    }
    if k < 2 {
        return Err(Error::invalid("bound verification needs k >= 2"));
    }
    let ad = a.to_dense();
    if !eig::is_hermitian(&ad, eig::HERMITIAN_TOL) {
        return Err(Error::unsupported(
            "bound verification covers the Hermitian case (compression constant 1)",
        ));
    }
    let oracle = frechet::oracle_daleckii_krein(&ad, &e.to_dense(), b, f)?;
    let (lo, hi) = oracle.spectrum_extremes.ok_or_else(|| {
        Error::unsupported("bound verification needs a real spectrum from the oracle")
    })?;
    if matches!(f, FunctionSpec::Sqrt) && lo <= 0.0 {
        return Err(Error::invalid(format!(
            "square root bound needs a positive spectrum; smallest eigenvalue {lo:.3e}"
        )));
    }
    let res = modified_arnoldi(a, e, b, f, k, 0.0)?;
    let lhs = vector::norm2(&vector::sub(&oracle.lb, &res.v1));
    let fit = chebyshev_uniform_error(|x| f.eval_derivative(x), lo, hi, k - 2, 1000)?;
    let rhs = 2.0 * vector::norm2(b) * e.frobenius_norm() * fit.sup_error;
    Ok(BoundReport {
        lhs,
        rhs,
        sup_proxy: fit.sup_error,
        lebesgue_bound: fit.lebesgue_bound,
        spectral_interval: (lo, hi),
        holds: lhs <= rhs,
    })
}
