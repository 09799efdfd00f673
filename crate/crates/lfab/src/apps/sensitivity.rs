//! Edge-weight sensitivities of exponential-based network centrality.
//!
//! For an adjacency matrix `A`, the sensitivity of a centrality measure to
//! the edge weight `A_ij` is a directional derivative of `exp`:
//!
//! ```text
//! total communicability   1^T exp(A) 1    -> S_ij = 1^T  L_exp(A, e_i e_j^T) 1
//! subgraph centrality     e_l^T exp(A)e_l -> S_ij = e_l^T L_exp(A, e_i e_j^T) e_l
//! Estrada index           trace exp(A)    -> S_ij = trace L_exp(A, e_i e_j^T)
//! ```
//!
//! Computing one directional derivative per entry pair is wasteful; the
//! adjoint identity moves the entry dependence into the vectors instead, so a
//! single Krylov run per measure serves any `(i, j)`:
//!
//! ```text
//! S_ij = e_i^T L_exp(A^T, D) e_j,   D = 1 1^T, e_l e_l^T, or I.
//! ```
//!
//! The rank-one directions are applied as lazy outer-product operators, never
//! materialized. A genuinely full-rank study perturbs every edge at once:
//! `1^T L_exp(A, E) 1` with `E_ij = 1` wherever `A_ij != 0`; no reduction
//! applies there and the derivative runs on `A` itself.

use crate::error::{Error, Result};
use crate::krylov::structured::{OrthOptions, StepOutcome, Stepper};
use crate::linalg::operator::{Identity, LinearOperator, OuterProduct};
use crate::linalg::sparse::SparseMatrix;
use crate::linalg::vector;
use crate::matfunc::FunctionSpec;

/// Centrality measure whose edge sensitivity is requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensitivityMeasure {
    /// `1^T exp(A) 1`.
    TotalCommunicability,
    /// `e_l^T exp(A) e_l` for the given node `l`.
    SubgraphCentrality(usize),
    /// `trace exp(A)`.
    EstradaIndex,
}

/// A single entry query `S_ij` for one measure.
#[derive(Debug, Clone, Copy)]
pub struct SensitivityQuery {
    pub measure: SensitivityMeasure,
    pub i: usize,
    pub j: usize,
    /// Set when the caller wants the full-rank perturbation study instead of
    /// an entry sensitivity; entry queries reject it (see
    /// [`sensitivity_full_rank`]).
    pub full_rank_direction: bool,
}

/// One row of the per-iteration estimate trajectory.
#[derive(Debug, Clone, Copy)]
pub struct SensitivityRow {
    pub k: usize,
    pub estimate: f64,
    /// Relative change of the derivative iterate against the previous step
    /// (1 for the first step, where there is nothing to compare).
    pub update_norm: f64,
}

/// Trajectory and final state of one sensitivity run.
#[derive(Debug, Clone)]
pub struct SensitivityRun {
    pub rows: Vec<SensitivityRow>,
    /// Final estimate (last row).
    pub estimate: f64,
    /// Whether the update norm reached the stopping tolerance.
    pub converged: bool,
    /// Bottom-track steps completed.
    pub steps: usize,
    /// The bottom track hit an invariant subspace and the recurrence stopped
    /// early; the derivative estimate is then frozen at the truncation point
    /// and generally still carries truncation error.
    pub beta_breakdown: bool,
}

/// Shared driver: run the two-track recurrence on `(aop, dop, b)` for `exp`,
/// record `left^T v1` after every step, and stop once the relative change of
/// `v1` falls to `stop_tol` (or on breakdown).
fn left_contraction_run(
    aop: &dyn LinearOperator<f64>,
    dop: &dyn LinearOperator<f64>,
    b: &[f64],
    left: &[f64],
    k: usize,
    stop_tol: f64,
) -> Result<SensitivityRun> {
    let n = aop.dim_in();
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "sensitivity: k = {k} not in 1..={n}"
        )));
    }
    let f = FunctionSpec::exp();
    let mut st = Stepper::new(aop, dop, b, OrthOptions::default())?;
    let mut rows = Vec::new();
    let mut prev_v1: Option<Vec<f64>> = None;
    let mut converged = false;
    for step in 1..=k {
        let broke = matches!(st.step()?, StepOutcome::BetaBreakdown);
        let (v1, _) = st.evaluate(&f)?;
        let estimate = vector::dot(left, &v1);
        let update = match &prev_v1 {
            None => 1.0,
            Some(p) => vector::rel_dist(&v1, p),
        };
        rows.push(SensitivityRow {
            k: step,
            estimate,
            update_norm: update,
        });
        prev_v1 = Some(v1);
        if broke {
            break;
        }
        if rows.len() > 1 && update <= stop_tol {
            converged = true;
            break;
        }
    }
    let last = rows.last().expect("k >= 1 produces at least one row");
    Ok(SensitivityRun {
        estimate: last.estimate,
        converged,
        steps: st.steps(),
        beta_breakdown: st.beta_breakdown(),
        rows,
    })
}

/// Entry sensitivity `S_ij` of the queried measure, via the reduced form
/// `e_i^T L_exp(A^T, D) e_j` with the measure's direction `D`.
pub fn sensitivity_entry(
    a: &SparseMatrix<f64>,
    query: &SensitivityQuery,
    k: usize,
    stop_tol: f64,
) -> Result<SensitivityRun> {
    let n = a.n_rows();
    if a.n_cols() != n {
        return Err(Error::dimension(format!(
            "adjacency matrix is {}x{}",
            n,
            a.n_cols()
        )));
    }
    if query.full_rank_direction {
        return Err(Error::invalid(
            "full-rank perturbations have no entry reduction; use sensitivity_full_rank",
        ));
    }
    if query.i >= n || query.j >= n {
        return Err(Error::invalid(format!(
            "node pair ({}, {}) out of range for n = {n}",
            query.i, query.j
        )));
    }
    let at = a.transpose();
    let b = vector::unit::<f64>(n, query.j)?;
    let left = vector::unit::<f64>(n, query.i)?;
    match query.measure {
        SensitivityMeasure::TotalCommunicability => {
            let dir = OuterProduct {
                left: vector::ones::<f64>(n),
                right: vector::ones::<f64>(n),
            };
            left_contraction_run(&at, &dir, &b, &left, k, stop_tol)
        }
        SensitivityMeasure::SubgraphCentrality(l) => {
            if l >= n {
                return Err(Error::invalid(format!(
                    "subgraph centrality node {l} out of range for n = {n}"
                )));
            }
            let el = vector::unit::<f64>(n, l)?;
            let dir = OuterProduct {
                left: el.clone(),
                right: el,
            };
            left_contraction_run(&at, &dir, &b, &left, k, stop_tol)
        }
        SensitivityMeasure::EstradaIndex => {
            let dir = Identity { n };
            left_contraction_run(&at, &dir, &b, &left, k, stop_tol)
        }
    }
}

/// Perturbation direction that bumps every existing edge by one:
/// `E_ij = 1` exactly where `A_ij != 0`.
pub fn full_rank_direction(a: &SparseMatrix<f64>) -> SparseMatrix<f64> {
    let triplets: Vec<(usize, usize, f64)> = a
        .triplets()
        .filter(|&(_, _, v)| v != 0.0)
        .map(|(i, j, _)| (i, j, 1.0))
        .collect();
    SparseMatrix::from_triplets(a.n_rows(), a.n_cols(), &triplets)
        .expect("pattern copy of a valid matrix is valid")
}

/// Total-communicability sensitivity under the full-rank direction:
/// `1^T L_exp(A, E) 1` with `E = full_rank_direction(A)`. No rank-one
/// reduction applies, so the derivative runs on `A` directly with `b = 1`.
pub fn sensitivity_full_rank(
    a: &SparseMatrix<f64>,
    k: usize,
    stop_tol: f64,
) -> Result<SensitivityRun> {
    let n = a.n_rows();
    if a.n_cols() != n {
        return Err(Error::dimension(format!(
            "adjacency matrix is {}x{}",
            n,
            a.n_cols()
        )));
    }
    let e = full_rank_direction(a);
    let ones = vector::ones::<f64>(n);
    left_contraction_run(a, &e, &ones, &ones, k, stop_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frechet::dense_frechet_matrix;
    use crate::linalg::dense::DenseMatrix;
    use crate::random;

    /// 0/1 symmetric adjacency with a seeded random pattern.
    fn random_graph(n: usize, seed: u64) -> SparseMatrix<f64> {
        random::symmetric_sparse_normal(n, 0.3, seed)
            .unwrap()
            .pattern_ones()
    }

    fn cycle_graph(n: usize) -> SparseMatrix<f64> {
        let mut t = Vec::new();
        for i in 0..n {
            let j = (i + 1) % n;
            t.push((i, j, 1.0));
            t.push((j, i, 1.0));
        }
        SparseMatrix::from_triplets(n, n, &t).unwrap()
    }

    /// Unreduced definition straight from the dense derivative matrix
    /// `L_exp(A, e_i e_j^T)`, contracted per measure.
    fn unreduced(a: &SparseMatrix<f64>, m: SensitivityMeasure, i: usize, j: usize) -> f64 {
        let n = a.n_rows();
        let mut dir = DenseMatrix::zeros(n, n);
        dir.set(i, j, 1.0);
        let l = dense_frechet_matrix(&a.to_dense(), &dir, &FunctionSpec::exp()).unwrap();
        match m {
            SensitivityMeasure::TotalCommunicability => {
                let lv = l.matvec(&vector::ones::<f64>(n)).unwrap();
                lv.iter().sum()
            }
            SensitivityMeasure::SubgraphCentrality(node) => l.get(node, node),
            SensitivityMeasure::EstradaIndex => (0..n).map(|t| l.get(t, t)).sum(),
        }
    }

    #[test]
    fn reduced_forms_match_unreduced_oracle() {
        let n = 12;
        let a = random_graph(n, 42);
        let cases = [
            (SensitivityMeasure::TotalCommunicability, 0, 7),
            (SensitivityMeasure::SubgraphCentrality(3), 5, 2),
            (SensitivityMeasure::EstradaIndex, 4, 4),
            (SensitivityMeasure::EstradaIndex, 1, 9),
        ];
        for (measure, i, j) in cases {
            let query = SensitivityQuery {
                measure,
                i,
                j,
                full_rank_direction: false,
            };
            let run = sensitivity_entry(&a, &query, n, 0.0).unwrap();
            let want = unreduced(&a, measure, i, j);
            let rel = (run.estimate - want).abs() / want.abs().max(1.0);
            assert!(
                rel < 1e-9,
                "{measure:?} S_{i}{j}: reduced {} vs unreduced {want}, rel {rel:.3e}",
                run.estimate
            );
        }
    }

    #[test]
    fn full_rank_matches_oracle_on_cycle() {
        let n = 6;
        let a = cycle_graph(n);
        let run = sensitivity_full_rank(&a, n, 0.0).unwrap();
        let l = dense_frechet_matrix(
            &a.to_dense(),
            &full_rank_direction(&a).to_dense(),
            &FunctionSpec::exp(),
        )
        .unwrap();
        let want: f64 = l.matvec(&vector::ones::<f64>(n)).unwrap().iter().sum();
        let rel = (run.estimate - want).abs() / want.abs();
        assert!(rel < 1e-9, "full rank {} vs {want}, rel {rel:.3e}", run.estimate);
    }

    #[test]
    fn converged_estimate_is_stable_under_larger_k() {
        let a = random_graph(16, 7);
        let short = sensitivity_full_rank(&a, 12, 1e-10).unwrap();
        let long = sensitivity_full_rank(&a, 16, 1e-10).unwrap();
        assert!(short.converged && long.converged);
        assert_eq!(short.steps, long.steps);
        assert_eq!(short.estimate, long.estimate);
    }

    #[test]
    fn empty_graph_truncates_at_step_one() {
        // On A = 0 every vector spans an invariant subspace, so the bottom
        // track breaks down before the coupled top track can grow: the run
        // reports the truncated estimate 0 and flags it. The true value is
        // 1 (L_exp(0, 1 1^T) = 1 1^T, checked against the dense derivative
        // below); the recurrence cannot reach it because its coupling update
        // divides by the vanished residual.
        let n = 5;
        let a = SparseMatrix::from_triplets(n, n, &[]).unwrap();
        let query = SensitivityQuery {
            measure: SensitivityMeasure::TotalCommunicability,
            i: 1,
            j: 3,
            full_rank_direction: false,
        };
        let run = sensitivity_entry(&a, &query, n, 0.0).unwrap();
        assert!(run.beta_breakdown);
        assert_eq!(run.steps, 0);
        assert_eq!(run.estimate, 0.0);

        let ones_mat = DenseMatrix::from_fn(n, n, |_, _| 1.0);
        let l = dense_frechet_matrix(&DenseMatrix::zeros(n, n), &ones_mat, &FunctionSpec::exp())
            .unwrap();
        assert!(l.max_diff(&ones_mat) < 1e-14);
        assert!((unreduced(&a, SensitivityMeasure::TotalCommunicability, 1, 3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn estrada_reduction_is_diagonal_of_exp_for_diagonal_a() {
        // Identity direction on diagonal A: L_exp(A, I) = diag(e^lambda), so
        // S_ij = delta_ij e^(lambda_i). Verified on the dense derivative (the
        // Krylov path on a diagonal matrix breaks down at step one, same as
        // the empty graph above).
        let lams = [0.3, -0.7, 1.2];
        let a = SparseMatrix::from_diag(&lams);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { lams[i].exp() } else { 0.0 };
                let got = unreduced(&a, SensitivityMeasure::EstradaIndex, i, j);
                assert!(
                    (got - want).abs() < 1e-12,
                    "S_{i}{j} = {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn full_rank_direction_copies_the_pattern() {
        let a = SparseMatrix::from_triplets(3, 3, &[(0, 1, 2.5), (2, 0, -1.0)]).unwrap();
        let e = full_rank_direction(&a);
        assert_eq!(e.nnz(), 2);
        assert_eq!(e.get(0, 1), 1.0);
        assert_eq!(e.get(2, 0), 1.0);

        let zero = SparseMatrix::<f64>::from_triplets(4, 4, &[]).unwrap();
        assert_eq!(full_rank_direction(&zero).nnz(), 0);

        let adj = cycle_graph(4);
        assert!(full_rank_direction(&adj).to_dense().max_diff(&adj.to_dense()) == 0.0);
    }

    #[test]
    fn query_validation() {
        let a = cycle_graph(4);
        let bad_index = SensitivityQuery {
            measure: SensitivityMeasure::TotalCommunicability,
            i: 4,
            j: 0,
            full_rank_direction: false,
        };
        assert!(sensitivity_entry(&a, &bad_index, 4, 0.0).is_err());

        let bad_node = SensitivityQuery {
            measure: SensitivityMeasure::SubgraphCentrality(9),
            i: 0,
            j: 1,
            full_rank_direction: false,
        };
        assert!(sensitivity_entry(&a, &bad_node, 4, 0.0).is_err());

        let full_rank = SensitivityQuery {
            measure: SensitivityMeasure::TotalCommunicability,
            i: 0,
            j: 1,
            full_rank_direction: true,
        };
        assert!(sensitivity_entry(&a, &full_rank, 4, 0.0).is_err());
    }
}

#[cfg(test)]
mod probe {
    use super::tests_helpers::*;
    use super::*;
}
