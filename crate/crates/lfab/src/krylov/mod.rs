//! Krylov subspace approximations: the plain Arnoldi method for `f(A)b`, the
//! block-embedding baseline for Fréchet derivative actions, and the
//! structured two-track method that avoids 2n-vector storage.

pub mod modified;
pub mod structured;

pub use modified::{
    exactness_check, modified_arnoldi, modified_arnoldi_basic, modified_arnoldi_op,
    modified_sweep, verify_theorem_bound, BoundReport, FrechetResult, ModifiedOptions,
};
pub use structured::{
    assemble_compressed, separate_orthonormalization, separate_orthonormalization_op,
    OrthOptions, RColumnScaling, StructuredKrylovBasis,
};

use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::gram_schmidt::gram_schmidt_step;
use crate::linalg::operator::{BlockEmbedding, LinearOperator};
use crate::linalg::sparse::SparseMatrix;
use crate::linalg::vector;
use crate::matfunc::{matfun, FunctionSpec};
use crate::scalar::Scalar;

/// Relative threshold under which a Krylov residual counts as breakdown.
pub const BREAKDOWN_TOL: f64 = 1e-12;

/// Arnoldi relation `M Q_m = Q_{m+1} H` for one operator and start vector.
#[derive(Debug, Clone)]
pub struct ArnoldiDecomposition<S> {
    /// Orthonormal basis, `n x (steps+1)` columns; `n x steps` on breakdown.
    pub basis: DenseMatrix<S>,
    /// Upper Hessenberg coefficients, `(steps+1) x steps`; square `steps x
    /// steps` on breakdown (the final residual vanished, so the relation
    /// closes without a trailing row).
    pub hess: DenseMatrix<S>,
    /// Norm of the start vector.
    pub b_norm: f64,
    /// Completed iterations.
    pub steps: usize,
    /// True when the Krylov space became invariant before `k` steps.
    pub breakdown: bool,
}

impl<S: Scalar> ArnoldiDecomposition<S> {
    /// `f(M) b` projected at `m <= steps` iterations:
    /// `||b|| * Q_m f(H_m) e_1`.
    pub fn function_action(&self, f: &FunctionSpec, m: usize) -> Result<Vec<S>> {
        if m == 0 || m > self.steps {
            return Err(Error::invalid(format!(
                "function_action: m = {m} not in 1..={}",
                self.steps
            )));
        }
        let hm = self.hess.block(0, 0, m, m);
        let fm = matfun(f, &hm)?;
        let mut x = vec![S::zero(); self.basis.n_rows()];
        for j in 0..m {
            vector::axpy(fm.get(j, 0).scale(self.b_norm), self.basis.col(j), &mut x);
        }
        Ok(x)
    }
}

/// Arnoldi with classical Gram-Schmidt and one reorthogonalization pass.
///
/// Stops early (with `breakdown = true`) when the residual of a step falls
/// below `breakdown_tol` relative to the vector being orthogonalized; the
/// returned decomposition is then exact for the invariant subspace found.
pub fn arnoldi<S: Scalar>(
    op: &dyn LinearOperator<S>,
    b: &[S],
    k: usize,
    breakdown_tol: f64,
) -> Result<ArnoldiDecomposition<S>> {
    let n = op.dim_in();
    if op.dim_out() != n {
        return Err(Error::dimension("arnoldi: operator must be square"));
    }
    if b.len() != n {
        return Err(Error::dimension(format!(
            "arnoldi: operator is {n}x{n}, start vector has length {}",
            b.len()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::invalid(format!("arnoldi: k = {k} not in 1..={n}")));
    }
    let b_norm = vector::norm2(b);
    if b_norm == 0.0 {
        return Err(Error::invalid("arnoldi: start vector is zero"));
    }

    let mut basis = DenseMatrix::with_rows(n);
    let mut q0 = b.to_vec();
    vector::scale_in_place(&mut q0, S::from_re(1.0 / b_norm));
    basis.push_col(&q0);

    // Hessenberg columns; column i holds i+2 entries (coefficients + subdiag)
    let mut cols: Vec<Vec<S>> = Vec::with_capacity(k);
    let mut breakdown = false;

    for _ in 0..k {
        let w = op.apply(basis.col(basis.n_cols() - 1))?;
        let gs = gram_schmidt_step(&basis, &w, true, breakdown_tol)?;
        let mut col = gs.coeffs;
        if gs.breakdown {
            cols.push(col);
            breakdown = true;
            break;
        }
        col.push(S::from_re(gs.residual_norm));
        cols.push(col);
        basis.push_col(gs.q_new.as_ref().expect("no breakdown"));
    }

    let steps = cols.len() - usize::from(breakdown);
    let (h_rows, h_cols) = if breakdown {
        (steps + 1, steps + 1)
    } else {
        (steps + 1, steps)
    };
    // On breakdown the projection coefficients of the final (in-span) vector
    // form one extra complete column, making hess square of size steps+1 with
    // basis of steps+1 columns: the compression of the invariant subspace.
    let mut hess = DenseMatrix::zeros(h_rows, h_cols);
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            hess.set(i, j, v);
        }
    }
    let steps_reported = if breakdown { steps + 1 } else { steps };
    Ok(ArnoldiDecomposition {
        basis,
        hess,
        b_norm,
        steps: steps_reported,
        breakdown,
    })
}

/// Per-checkpoint convergence record: the iteration count and the relative
/// change of the tracked quantity since the previous checkpoint.
#[derive(Debug, Clone, Copy)]
pub struct UpdateRecord {
    pub k: usize,
    pub update_norm: f64,
}

/// Result of an `f(A)b` Arnoldi run with per-step update tracking.
#[derive(Debug, Clone)]
pub struct FabResult<S> {
    pub approx: Vec<S>,
    pub history: Vec<UpdateRecord>,
    pub steps: usize,
    pub breakdown: bool,
}

/// Arnoldi approximation of `f(A) b` with the relative update norm recorded
/// at every step.
pub fn arnoldi_fab<S: Scalar>(
    a: &SparseMatrix<S>,
    b: &[S],
    f: &FunctionSpec,
    k: usize,
) -> Result<FabResult<S>> {
    arnoldi_fab_op(a, b, f, k)
}

/// Operator form of [`arnoldi_fab`].
pub fn arnoldi_fab_op<S: Scalar>(
    op: &dyn LinearOperator<S>,
    b: &[S],
    f: &FunctionSpec,
    k: usize,
) -> Result<FabResult<S>> {
    let dec = arnoldi(op, b, k, BREAKDOWN_TOL)?;
    let mut history = Vec::with_capacity(dec.steps);
    let mut prev: Option<Vec<S>> = None;
    let mut last = Vec::new();
    for m in 1..=dec.steps {
        let x = dec.function_action(f, m)?;
        let update = match &prev {
            None => 1.0,
            Some(p) => vector::rel_dist(&x, p).min(f64::MAX),
        };
        history.push(UpdateRecord {
            k: m,
            update_norm: update,
        });
        prev = Some(x.clone());
        last = x;
    }
    Ok(FabResult {
        approx: last,
        history,
        steps: dec.steps,
        breakdown: dec.breakdown,
    })
}

/// `f(A) b` evaluated only at the final iteration (one matrix-function call),
/// for callers that need the value and not the convergence history.
pub fn arnoldi_fab_final<S: Scalar>(
    op: &dyn LinearOperator<S>,
    b: &[S],
    f: &FunctionSpec,
    k: usize,
) -> Result<Vec<S>> {
    let dec = arnoldi(op, b, k, BREAKDOWN_TOL)?;
    dec.function_action(f, dec.steps)
}

/// Evaluate an `f(A)b` Arnoldi run at several iteration counts from a single
/// basis build.
pub fn arnoldi_fab_sweep<S: Scalar>(
    op: &dyn LinearOperator<S>,
    b: &[S],
    f: &FunctionSpec,
    ks: &[usize],
) -> Result<Vec<(usize, Vec<S>)>> {
    let k_max = *ks.iter().max().ok_or_else(|| Error::invalid("empty sweep"))?;
    let dec = arnoldi(op, b, k_max, BREAKDOWN_TOL)?;
    let mut out = Vec::new();
    for &k in ks {
        let m = k.min(dec.steps);
        out.push((m, dec.function_action(f, m)?));
    }
    out.dedup_by_key(|(m, _)| *m);
    Ok(out)
}

/// Fréchet pair from one block-embedding Arnoldi run at several iteration
/// counts: the baseline that carries 2n-vectors.
pub fn block_embedding_sweep<S: Scalar>(
    a: &dyn LinearOperator<S>,
    e: &dyn LinearOperator<S>,
    b: &[S],
    f: &FunctionSpec,
    ks: &[usize],
) -> Result<Vec<SweepPoint<S>>> {
    let n = a.dim_in();
    if b.len() != n {
        return Err(Error::dimension(
            "block_embedding_sweep: start vector length",
        ));
    }
    let emb = BlockEmbedding::new(a, e)?;
    let mut b2 = vec![S::zero(); 2 * n];
    b2[n..].copy_from_slice(b);
    let k_max = *ks.iter().max().ok_or_else(|| Error::invalid("empty sweep"))?;
    let dec = arnoldi(&emb, &b2, k_max, BREAKDOWN_TOL)?;
    let mut out = Vec::new();
    for &k in ks {
        let m = k.min(dec.steps);
        let x = dec.function_action(f, m)?;
        out.push(SweepPoint {
            k: m,
            v1: x[..n].to_vec(),
            v2: x[n..].to_vec(),
        });
    }
    out.dedup_by_key(|p| p.k);
    Ok(out)
}

/// One point of a Fréchet-action convergence sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint<S> {
    pub k: usize,
    pub v1: Vec<S>,
    pub v2: Vec<S>,
}

/// Block-embedding Arnoldi baseline for `(L_f(A,E)b, f(A)b)` at a single
/// iteration count.
pub fn block_embedding_arnoldi<S: Scalar>(
    a: &SparseMatrix<S>,
    e: &SparseMatrix<S>,
    b: &[S],
    f: &FunctionSpec,
    k: usize,
) -> Result<SweepPoint<S>> {
    let points = block_embedding_sweep(a, e, b, f, &[k])?;
    points
        .into_iter()
        .next()
        .ok_or_else(|| Error::invalid("empty sweep"))
}
