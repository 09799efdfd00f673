//! Separately orthonormalized two-track Krylov recurrence.
//!
//! The Krylov basis of the block operator `[[A, E], [0, A]]` started at
//! `[0; b]` has 2n-vectors `[x_i; y_i]`. This module builds, without ever
//! storing a 2n-vector, three linked objects:
//!
//! * `V`: an orthonormal basis of the bottom track `span{y_0, ..., y_k}`,
//!   which is exactly the plain Arnoldi basis of `K_{k+1}(A, b)`;
//! * `U`: an orthonormal basis of the top track `span{x_1, ..., x_k}`;
//! * `R`: the small coupling matrix with `[x_0, ..., x_k] = U R`, strictly
//!   upper triangular by construction (`x_0 = 0`).
//!
//! One step computes `A v_{i-1}` (bottom Arnoldi step giving `h`, `beta`,
//! `v_i`), then the raw top vector `A w_{i-1} + E v_{i-1}` with
//! `w_{i-1} = U R[:, i-1]`, orthonormalizes it against `U` (giving `g`,
//! `alpha`, `u_i`), and extends the coupling matrix with the column
//! `(g - R h) / beta` plus diagonal entry `alpha / beta`. Caches of `A U` and
//! `E V` keep the step free of any extra size-n products: a run of k steps
//! costs 2k+1 products with `A` and k+1 with `E`.
//!
//! Breakdowns are asymmetric. A *bottom* breakdown (`beta ~ 0`) means the
//! Krylov space of `(A, b)` became invariant; the coupling update divides by
//! `beta`, so the recurrence cannot continue and the run truncates with a
//! flag. The bottom compression (and hence `f(A) b`) is exact from that
//! point, while the top-track approximation simply stops improving. A *top*
//! breakdown (`alpha ~ 0`) means the new top vector is linearly dependent on
//! `U`: the step records the dependence in `R` without growing `U`
//! (deflation) and continues.

use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::gram_schmidt::gram_schmidt_step;
use crate::linalg::operator::LinearOperator;
use crate::linalg::sparse::SparseMatrix;
use crate::linalg::vector;
use crate::matfunc::{matfun, FunctionSpec};
use crate::scalar::Scalar;

/// Scaling of the new off-diagonal column of `R`.
///
/// The change-of-basis derivation gives division by the bottom-track
/// normalization `beta`; dividing by the top-track `alpha` instead looks
/// plausible (it mirrors the diagonal entry) but silently corrupts the basis
/// correspondence. The wrong variant is kept behind this switch as a
/// verification hook: the span self-check must fail loudly under it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RColumnScaling {
    /// `(g - R h) / beta`: the correct scaling.
    Beta,
    /// `(g - R h) / alpha`: deliberately wrong, for failure-mode tests.
    Alpha,
}

#[derive(Debug, Clone, Copy)]
pub struct OrthOptions {
    /// Relative residual below which a Gram-Schmidt step counts as breakdown.
    pub breakdown_tol: f64,
    pub r_scaling: RColumnScaling,
}

impl Default for OrthOptions {
    fn default() -> Self {
        OrthOptions {
            breakdown_tol: super::BREAKDOWN_TOL,
            r_scaling: RColumnScaling::Beta,
        }
    }
}

/// Completed two-track basis with caches and the fully assembled bottom
/// compression `VAV = V^* A V`.
#[derive(Debug, Clone)]
pub struct StructuredKrylovBasis<S> {
    /// Top-track orthonormal basis, `n x r` with `r = steps - deflations`.
    pub u: DenseMatrix<S>,
    /// Bottom-track orthonormal basis, `n x (steps + 1)`.
    pub v: DenseMatrix<S>,
    /// Coupling matrix, `r x (steps + 1)`, strictly upper triangular.
    pub r: DenseMatrix<S>,
    /// Cache `A U`, `n x r`.
    pub au: DenseMatrix<S>,
    /// Cache `E V`, `n x (steps + 1)`.
    pub ev: DenseMatrix<S>,
    /// Bottom compression `V^* A V`, `(steps + 1) x (steps + 1)`.
    pub vav: DenseMatrix<S>,
    pub b_norm: f64,
    /// Completed iterations.
    pub steps: usize,
    /// True when the bottom track hit an invariant subspace; the run was
    /// truncated there. `vav` is then an exact compression of `A` on that
    /// subspace (the top track is simply frozen).
    pub beta_breakdown: bool,
    /// Number of top-track steps that deflated instead of growing `U`.
    pub deflations: usize,
}

pub(crate) enum StepOutcome {
    Advanced,
    BetaBreakdown,
}

/// Incremental state of the recurrence. Drives both the one-shot
/// [`separate_orthonormalization`] and the checkpointed evaluation loop of
/// the modified Arnoldi method.
pub(crate) struct Stepper<'a, S: Scalar> {
    aop: &'a dyn LinearOperator<S>,
    eop: &'a dyn LinearOperator<S>,
    opts: OrthOptions,
    u: DenseMatrix<S>,
    v: DenseMatrix<S>,
    au: DenseMatrix<S>,
    ev: DenseMatrix<S>,
    /// Recurrence column `j`: coefficients of `A v_j` over `v_0..v_{j+1}`
    /// (length `j + 2`), for `j < steps`.
    h_cols: Vec<Vec<S>>,
    /// Column `j + 1` of `R` (column 0 is zero); length tracks `U`'s column
    /// count at creation time.
    r_cols: Vec<Vec<S>>,
    /// `V^* A v_steps` for the current final basis vector; set at
    /// checkpoints and frozen by a bottom breakdown, invalidated by a step.
    vav_last: Option<Vec<S>>,
    /// `A v_steps`, shared between a checkpoint and the following step so the
    /// product is never computed twice.
    pending_av: Option<Vec<S>>,
    b_norm: f64,
    steps: usize,
    beta_breakdown: bool,
    deflations: usize,
}

impl<'a, S: Scalar> Stepper<'a, S> {
    pub fn new(
        aop: &'a dyn LinearOperator<S>,
        eop: &'a dyn LinearOperator<S>,
        b: &[S],
        opts: OrthOptions,
    ) -> Result<Self> {
        let n = aop.dim_in();
        if aop.dim_out() != n || eop.dim_in() != n || eop.dim_out() != n {
            return Err(Error::dimension(
                "two-track recurrence requires square A and E of equal size",
            ));
        }
        if b.len() != n {
            return Err(Error::dimension(format!(
                "start vector has length {}, operators are {n}x{n}",
                b.len()
            )));
        }
        let b_norm = vector::norm2(b);
        if b_norm == 0.0 {
            return Err(Error::invalid("start vector is zero"));
        }
        let mut v0 = b.to_vec();
        vector::scale_in_place(&mut v0, S::from_re(1.0 / b_norm));
        let ev0 = eop.apply(&v0)?;
        let mut v = DenseMatrix::with_rows(n);
        v.push_col(&v0);
        let mut ev = DenseMatrix::with_rows(n);
        ev.push_col(&ev0);
        Ok(Stepper {
            aop,
            eop,
            opts,
            u: DenseMatrix::with_rows(n),
            v,
            au: DenseMatrix::with_rows(n),
            ev,
            h_cols: Vec::new(),
            r_cols: Vec::new(),
            vav_last: None,
            pending_av: None,
            b_norm,
            steps: 0,
            beta_breakdown: false,
            deflations: 0,
        })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn beta_breakdown(&self) -> bool {
        self.beta_breakdown
    }

    pub fn deflations(&self) -> usize {
        self.deflations
    }

    pub fn b_norm(&self) -> f64 {
        self.b_norm
    }

    fn av_last(&mut self) -> Result<Vec<S>> {
        match self.pending_av.take() {
            Some(av) => Ok(av),
            None => self.aop.apply(self.v.col(self.v.n_cols() - 1)),
        }
    }

    /// Advance the recurrence by one iteration.
    pub fn step(&mut self) -> Result<StepOutcome> {
        if self.beta_breakdown {
            return Err(Error::invalid(
                "two-track recurrence cannot continue past a bottom breakdown",
            ));
        }
        let av = self.av_last()?;
        self.vav_last = None;

        // bottom track: plain Arnoldi step on (A, b)
        let gs_bot = gram_schmidt_step(&self.v, &av, true, self.opts.breakdown_tol)?;
        if gs_bot.breakdown {
            // invariant subspace: the projection coefficients complete VAV
            // exactly; freeze everything else.
            self.vav_last = Some(gs_bot.coeffs);
            self.beta_breakdown = true;
            return Ok(StepOutcome::BetaBreakdown);
        }
        let beta = gs_bot.residual_norm;
        let v_new = gs_bot.q_new.as_ref().expect("no breakdown").clone();
        let mut h_col = gs_bot.coeffs;

        // top track: raw vector A w_{i-1} + E v_{i-1}, with
        // w_{i-1} = U R[:, i-1] so A w_{i-1} = (A U) R[:, i-1]
        let i_prev = self.steps;
        let mut ut = self.ev.col(i_prev).to_vec();
        if let Some(r_last) = self.r_cols.last() {
            for (j, &c) in r_last.iter().enumerate() {
                vector::axpy(c, self.au.col(j), &mut ut);
            }
        }
        let gs_top = gram_schmidt_step(&self.u, &ut, true, self.opts.breakdown_tol)?;

        // new R column: (g - R_{i-1} h) / beta. R's column 0 is zero, so
        // r_cols[j] pairs with coefficient h[j + 1].
        let u_cols = self.u.n_cols();
        let mut new_r = gs_top.coeffs.clone();
        for (j, col) in self.r_cols.iter().enumerate() {
            let c = h_col[j + 1];
            for (t, &rv) in col.iter().enumerate() {
                new_r[t] -= c * rv;
            }
        }
        let denom = match self.opts.r_scaling {
            RColumnScaling::Beta => beta,
            RColumnScaling::Alpha => gs_top.residual_norm,
        };
        if denom == 0.0 {
            return Err(Error::convergence(
                "two-track recurrence: zero column scaling",
            ));
        }
        for rv in new_r.iter_mut() {
            *rv = rv.scale(1.0 / denom);
        }
        debug_assert_eq!(new_r.len(), u_cols);

        if gs_top.breakdown {
            self.deflations += 1;
            self.r_cols.push(new_r);
        } else {
            let alpha = gs_top.residual_norm;
            let u_new = gs_top.q_new.as_ref().expect("no breakdown");
            let au_new = self.aop.apply(u_new)?;
            self.u.push_col(u_new);
            self.au.push_col(&au_new);
            let mut col = new_r;
            col.push(S::from_re(alpha / beta));
            self.r_cols.push(col);
        }

        // commit the bottom step
        let ev_new = self.eop.apply(&v_new)?;
        h_col.push(S::from_re(beta));
        self.v.push_col(&v_new);
        self.ev.push_col(&ev_new);
        self.h_cols.push(h_col);
        self.steps += 1;
        Ok(StepOutcome::Advanced)
    }

    /// Make sure the final column of `V^* A V` for the current basis exists.
    fn ensure_vav_last(&mut self) -> Result<()> {
        if self.vav_last.is_some() {
            return Ok(());
        }
        let av = self.av_last()?;
        let col = self.v.adjoint_matvec(&av)?;
        self.pending_av = Some(av);
        self.vav_last = Some(col);
        Ok(())
    }

    fn vav_matrix(&self) -> DenseMatrix<S> {
        let kv = self.v.n_cols();
        let mut vav = DenseMatrix::zeros(kv, kv);
        for (j, col) in self.h_cols.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                vav.set(i, j, x);
            }
        }
        if let Some(last) = &self.vav_last {
            for (i, &x) in last.iter().enumerate() {
                vav.set(i, kv - 1, x);
            }
        }
        vav
    }

    fn r_matrix(&self) -> DenseMatrix<S> {
        let mut r = DenseMatrix::zeros(self.u.n_cols(), self.v.n_cols());
        for (j, col) in self.r_cols.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                r.set(i, j + 1, x);
            }
        }
        r
    }

    /// Compressed surrogate `[[U^* A U, U^* E V], [0, V^* A V]]` of the block
    /// embedding, built from the caches: no size-n operator products beyond
    /// the single `A v_steps` shared with the next step.
    pub fn compressed(&mut self) -> Result<DenseMatrix<S>> {
        self.ensure_vav_last()?;
        let r = self.u.n_cols();
        let kv = self.v.n_cols();
        let huu = self.u.adjoint_matmul(&self.au)?;
        let huv = self.u.adjoint_matmul(&self.ev)?;
        let vav = self.vav_matrix();
        let mut c = DenseMatrix::zeros(r + kv, r + kv);
        c.set_block(0, 0, &huu);
        c.set_block(0, r, &huv);
        c.set_block(r, r, &vav);
        Ok(c)
    }

    /// Evaluate the Fréchet pair at the current iteration:
    /// `v1 = U F_12 (V^* b)`, `v2 = V F_22 (V^* b)` with `F = f(compressed)`
    /// and `V^* b = ||b|| e_1`.
    pub fn evaluate(&mut self, f: &FunctionSpec) -> Result<(Vec<S>, Vec<S>)> {
        let c = self.compressed()?;
        let r = self.u.n_cols();
        let kv = self.v.n_cols();
        let fc = matfun(f, &c)?;
        let n = self.v.n_rows();
        let mut v1 = vec![S::zero(); n];
        for j in 0..r {
            vector::axpy(fc.get(j, r).scale(self.b_norm), self.u.col(j), &mut v1);
        }
        let mut v2 = vec![S::zero(); n];
        for j in 0..kv {
            vector::axpy(fc.get(r + j, r).scale(self.b_norm), self.v.col(j), &mut v2);
        }
        Ok((v1, v2))
    }

    /// Freeze into the public basis struct (completes `VAV`).
    pub fn finish(mut self) -> Result<StructuredKrylovBasis<S>> {
        self.ensure_vav_last()?;
        let vav = self.vav_matrix();
        let r = self.r_matrix();
        Ok(StructuredKrylovBasis {
            u: self.u,
            v: self.v,
            r,
            au: self.au,
            ev: self.ev,
            vav,
            b_norm: self.b_norm,
            steps: self.steps,
            beta_breakdown: self.beta_breakdown,
            deflations: self.deflations,
        })
    }
}

/// Build the two-track basis for sparse `A`, `E`.
pub fn separate_orthonormalization<S: Scalar>(
    a: &SparseMatrix<S>,
    e: &SparseMatrix<S>,
    b: &[S],
    k: usize,
    opts: OrthOptions,
) -> Result<StructuredKrylovBasis<S>> {
    separate_orthonormalization_op(a, e, b, k, opts)
}

/// Operator form of [`separate_orthonormalization`].
pub fn separate_orthonormalization_op<S: Scalar>(
    aop: &dyn LinearOperator<S>,
    eop: &dyn LinearOperator<S>,
    b: &[S],
    k: usize,
    opts: OrthOptions,
) -> Result<StructuredKrylovBasis<S>> {
    if k == 0 || k > aop.dim_in() {
        return Err(Error::invalid(format!(
            "separate_orthonormalization: k = {k} not in 1..={}",
            aop.dim_in()
        )));
    }
    let mut st = Stepper::new(aop, eop, b, opts)?;
    for _ in 0..k {
        match st.step()? {
            StepOutcome::Advanced => {}
            StepOutcome::BetaBreakdown => break,
        }
    }
    st.finish()
}

/// Compressed block surrogate assembled from a finished basis:
/// `[[U^* (A U), U^* (E V)], [0, V^* A V]]`, using only the stored caches.
pub fn assemble_compressed<S: Scalar>(basis: &StructuredKrylovBasis<S>) -> Result<DenseMatrix<S>> {
    let r = basis.u.n_cols();
    let kv = basis.v.n_cols();
    if basis.vav.n_rows() != kv || basis.vav.n_cols() != kv {
        return Err(Error::dimension("assemble_compressed: VAV shape"));
    }
    let huu = basis.u.adjoint_matmul(&basis.au)?;
    let huv = basis.u.adjoint_matmul(&basis.ev)?;
    let mut c = DenseMatrix::zeros(r + kv, r + kv);
    c.set_block(0, 0, &huu);
    c.set_block(0, r, &huv);
    c.set_block(r, r, &basis.vav);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krylov::{arnoldi, BREAKDOWN_TOL};
    use crate::linalg::operator::BlockEmbedding;

    fn test_pair(n: usize) -> (SparseMatrix<f64>, SparseMatrix<f64>) {
        // deterministic sparse-ish pair with distinct structure
        let mut ta = Vec::new();
        let mut te = Vec::new();
        for i in 0..n {
            ta.push((i, i, 1.0 + 0.3 * i as f64));
            if i + 1 < n {
                ta.push((i, i + 1, -0.5));
                ta.push((i + 1, i, 0.25));
            }
            te.push((i, (i * 3 + 1) % n, 0.1 + 0.05 * i as f64));
        }
        (
            SparseMatrix::from_triplets(n, n, &ta).unwrap(),
            SparseMatrix::from_triplets(n, n, &te).unwrap(),
        )
    }

    fn test_b(n: usize) -> Vec<f64> {
        (0..n).map(|i| 0.3 + ((i * 5 + 2) % 7) as f64 / 7.0).collect()
    }

    #[test]
    fn both_tracks_orthonormal_and_shapes_consistent() {
        let n = 20;
        let (a, e) = test_pair(n);
        let b = test_b(n);
        let k = 8;
        let basis = separate_orthonormalization(&a, &e, &b, k, OrthOptions::default()).unwrap();
        assert_eq!(basis.steps, k);
        assert!(!basis.beta_breakdown);
        assert_eq!(basis.deflations, 0);
        assert_eq!(basis.v.n_cols(), k + 1);
        assert_eq!(basis.u.n_cols(), k);
        assert_eq!(basis.r.n_rows(), k);
        assert_eq!(basis.r.n_cols(), k + 1);
        assert!(basis.u.orthonormality_defect() < 1e-13);
        assert!(basis.v.orthonormality_defect() < 1e-13);
    }

    #[test]
    fn r_is_strictly_upper_triangular() {
        let n = 18;
        let (a, e) = test_pair(n);
        let b = test_b(n);
        let basis = separate_orthonormalization(&a, &e, &b, 7, OrthOptions::default()).unwrap();
        for j in 0..basis.r.n_cols() {
            for i in j..basis.r.n_rows() {
                assert_eq!(basis.r.get(i, j), 0.0, "R[{i}][{j}] must be zero");
            }
        }
    }

    #[test]
    fn bottom_track_is_plain_arnoldi() {
        let n = 20;
        let (a, e) = test_pair(n);
        let b = test_b(n);
        let k = 8;
        let basis = separate_orthonormalization(&a, &e, &b, k, OrthOptions::default()).unwrap();
        let dec = arnoldi(&a, &b, k, BREAKDOWN_TOL).unwrap();
        assert!(basis.v.max_diff(&dec.basis) < 1e-13);
        // VAV's leading (k+1) x k block is the Hessenberg matrix
        let lead = basis.vav.block(0, 0, k + 1, k);
        assert!(lead.max_diff(&dec.hess) < 1e-13);
    }

    #[test]
    fn caches_match_fresh_products() {
        let n = 16;
        let (a, e) = test_pair(n);
        let b = test_b(n);
        let basis = separate_orthonormalization(&a, &e, &b, 6, OrthOptions::default()).unwrap();
        for j in 0..basis.u.n_cols() {
            let fresh = a.spmv(basis.u.col(j)).unwrap();
            assert!(vector::rel_dist(&fresh, basis.au.col(j)) < 1e-14);
        }
        for j in 0..basis.v.n_cols() {
            let fresh = e.spmv(basis.v.col(j)).unwrap();
            let cached = basis.ev.col(j).to_vec();
            assert!(vector::sub(&fresh, &cached).iter().all(|&x| x.abs() < 1e-14));
        }
        // VAV == V^* A V recomputed densely
        let mut av = DenseMatrix::with_rows(n);
        for j in 0..basis.v.n_cols() {
            av.push_col(&a.spmv(basis.v.col(j)).unwrap());
        }
        let vav = basis.v.adjoint_matmul(&av).unwrap();
        assert!(vav.max_diff(&basis.vav) < 1e-13);
    }

    #[test]
    fn coupling_reconstructs_top_blocks_of_block_krylov_basis() {
        // span check: U R must reproduce the top blocks of the orthonormal
        // basis of the 2n embedding run on [0; b], up to the unitary
        // relating the two bases. Directly: the 2n Arnoldi vectors q_i =
        // [x_i; y_i] satisfy span{x_1..x_k} = span(U); check by projecting
        // each x_i onto U and measuring the residual.
        let n = 14;
        let (a, e) = test_pair(n);
        let b = test_b(n);
        let k = 6;
        let basis = separate_orthonormalization(&a, &e, &b, k, OrthOptions::default()).unwrap();

        let emb = BlockEmbedding::new(&a, &e).unwrap();
        let mut b2 = vec![0.0; 2 * n];
        b2[n..].copy_from_slice(&b);
        let dec = arnoldi(&emb, &b2, k, BREAKDOWN_TOL).unwrap();
        for i in 1..=k {
            let x_i: Vec<f64> = dec.basis.col(i)[..n].to_vec();
            let norm = vector::norm2(&x_i);
            let coeffs = basis.u.adjoint_matvec(&x_i).unwrap();
            let mut res = x_i;
            for (j, &c) in coeffs.iter().enumerate() {
                vector::axpy(-c, basis.u.col(j), &mut res);
            }
            assert!(
                vector::norm2(&res) < 1e-10 * norm.max(1e-300),
                "top block {i} escapes span(U): residual {:.3e}",
                vector::norm2(&res)
            );
        }
    }

    #[test]
    fn wrong_r_scaling_breaks_the_span_property() {
        let n = 14;
        let (a, e) = test_pair(n);
        let b = test_b(n);
        let k = 6;
        let opts = OrthOptions {
            r_scaling: RColumnScaling::Alpha,
            ..OrthOptions::default()
        };
        let basis = separate_orthonormalization(&a, &e, &b, k, opts).unwrap();
        let emb = BlockEmbedding::new(&a, &e).unwrap();
        let mut b2 = vec![0.0; 2 * n];
        b2[n..].copy_from_slice(&b);
        let dec = arnoldi(&emb, &b2, k, BREAKDOWN_TOL).unwrap();
        let mut worst = 0.0f64;
        for i in 1..=k {
            let x_i: Vec<f64> = dec.basis.col(i)[..n].to_vec();
            let norm = vector::norm2(&x_i);
            let coeffs = basis.u.adjoint_matvec(&x_i).unwrap();
            let mut res = x_i;
            for (j, &c) in coeffs.iter().enumerate() {
                vector::axpy(-c, basis.u.col(j), &mut res);
            }
            worst = worst.max(vector::norm2(&res) / norm.max(1e-300));
        }
        assert!(
            worst > 1e-4,
            "alpha scaling should corrupt the span, worst residual {worst:.3e}"
        );
    }

    #[test]
    fn bottom_breakdown_truncates_with_exact_compression() {
        // b is an eigenvector of A: bottom track is 1-dimensional
        let a = SparseMatrix::from_diag(&[2.0, 5.0, 7.0]);
        let e = SparseMatrix::from_triplets(3, 3, &[(1, 0, 1.0)]).unwrap();
        let b = vec![1.0, 0.0, 0.0];
        let basis = separate_orthonormalization(&a, &e, &b, 3, OrthOptions::default()).unwrap();
        assert!(basis.beta_breakdown);
        assert_eq!(basis.steps, 0);
        assert_eq!(basis.v.n_cols(), 1);
        assert_eq!(basis.u.n_cols(), 0);
        assert!((basis.vav.get(0, 0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_direction_deflates_every_step() {
        let n = 10;
        let (a, _) = test_pair(n);
        let e = SparseMatrix::from_triplets(n, n, &[]).unwrap();
        let b = test_b(n);
        let basis = separate_orthonormalization(&a, &e, &b, 5, OrthOptions::default()).unwrap();
        assert_eq!(basis.deflations, 5);
        assert_eq!(basis.u.n_cols(), 0);
        assert_eq!(basis.steps, 5);
    }

    #[test]
    fn assemble_compressed_matches_dense_compression() {
        let n = 15;
        let (a, e) = test_pair(n);
        let b = test_b(n);
        let basis = separate_orthonormalization(&a, &e, &b, 6, OrthOptions::default()).unwrap();
        let c = assemble_compressed(&basis).unwrap();
        let r = basis.u.n_cols();
        let kv = basis.v.n_cols();
        assert_eq!(c.n_rows(), r + kv);
        // dense reference blocks
        let ad = a.to_dense();
        let au = ad.matmul(&basis.u).unwrap();
        let huu = basis.u.adjoint_matmul(&au).unwrap();
        assert!(c.block(0, 0, r, r).max_diff(&huu) < 1e-13);
        let ed = e.to_dense();
        let ev = ed.matmul(&basis.v).unwrap();
        let huv = basis.u.adjoint_matmul(&ev).unwrap();
        assert!(c.block(0, r, r, kv).max_diff(&huv) < 1e-13);
        // lower-left block is exactly zero
        assert_eq!(c.block(r, 0, kv, r).max_abs(), 0.0);
    }

    #[test]
    fn dimension_validation() {
        let (a, _) = test_pair(8);
        let e_bad = SparseMatrix::<f64>::identity(9);
        let b = test_b(8);
        assert!(separate_orthonormalization(&a, &e_bad, &b, 3, OrthOptions::default()).is_err());
        let e = SparseMatrix::<f64>::identity(8);
        assert!(separate_orthonormalization(&a, &e, &[0.0; 8], 3, OrthOptions::default()).is_err());
        assert!(separate_orthonormalization(&a, &e, &b, 0, OrthOptions::default()).is_err());
        assert!(separate_orthonormalization(&a, &e, &b, 9, OrthOptions::default()).is_err());
    }
}
