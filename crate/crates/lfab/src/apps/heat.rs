//! Heat-equation diffusivity fit on the unit square.
//!
//! The forward model is `u_t = sigma * (u_xx + u_yy)` on `[-1, 1]^2` with
//! homogeneous Dirichlet boundary, discretized by the 5-point Laplacian on an
//! `m x m` interior grid. Its solution at time `T` is a matrix-exponential
//! action, `s(sigma) = exp(T sigma Lap) u0`, and the misfit against a
//! reference trajectory is `f(sigma) = ||s(sigma) - s_ref||^2`.
//!
//! The point of the example: one two-track Krylov run on
//! `(T sigma Lap, T Lap, u0)` returns `s(sigma)` and its sigma-derivative
//! together, so every gradient-descent iteration costs a single solve. Line
//! search candidates only need `f`, which the plain Arnoldi action provides
//! at `k + 1` steps (identical to the two-track bottom track at `k` steps).

use crate::error::{Error, Result};
use crate::krylov::{arnoldi_fab_final, modified_arnoldi_op, ModifiedOptions};
use crate::linalg::operator::Scaled;
use crate::linalg::sparse::SparseMatrix;
use crate::linalg::vector;
use crate::matfunc::FunctionSpec;

/// Parameters of the fitting study.
#[derive(Debug, Clone, Copy)]
pub struct HeatFitConfig {
    /// Interior grid points per dimension (`m`), so the Laplacian is
    /// `m^2 x m^2`.
    pub grid_points_per_dim: usize,
    /// Horizon `T` of the solution operator.
    pub final_time: f64,
    /// Initial diffusivity guess.
    pub sigma0: f64,
    /// Diffusivity that generates the reference trajectory.
    pub sigma_ref: f64,
    /// Initial line-search step.
    pub step0: f64,
    /// Stop once `f <= abs_tol`.
    pub abs_tol: f64,
    pub max_iters: usize,
    /// Krylov steps per solve (clamped to the problem size).
    pub krylov_k: usize,
}

impl Default for HeatFitConfig {
    fn default() -> Self {
        HeatFitConfig {
            grid_points_per_dim: 75,
            final_time: 1.0,
            sigma0: 1.0,
            sigma_ref: 0.85,
            step0: 0.5,
            abs_tol: 1e-8,
            max_iters: 100,
            krylov_k: 120,
        }
    }
}

impl HeatFitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points_per_dim < 3 {
            return Err(Error::invalid(format!(
                "grid needs at least 3 interior points per dimension, got {}",
                self.grid_points_per_dim
            )));
        }
        if !(self.sigma0 > 0.0 && self.sigma_ref > 0.0) {
            return Err(Error::invalid("diffusivities must be positive"));
        }
        if !(self.final_time > 0.0 && self.step0 > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::invalid(
                "final time, initial step and tolerance must be positive",
            ));
        }
        if self.krylov_k == 0 {
            return Err(Error::invalid("krylov_k must be at least 1"));
        }
        Ok(())
    }
}

/// 5-point Laplacian on the `m x m` interior grid of `[-1, 1]^2` with
/// homogeneous Dirichlet boundary: `h = 2 / (m + 1)`, diagonal `-4/h^2`,
/// neighbor entries `1/h^2`; symmetric negative definite. Row-major node
/// order (`index = iy * m + ix`).
pub fn assemble_laplacian_2d(m: usize) -> Result<SparseMatrix<f64>> {
    if m < 3 {
        return Err(Error::invalid(format!(
            "laplacian grid needs m >= 3 interior points, got {m}"
        )));
    }
    let h = 2.0 / (m as f64 + 1.0);
    let w = 1.0 / (h * h);
    let n = m * m;
    let mut t = Vec::with_capacity(5 * n);
    for iy in 0..m {
        for ix in 0..m {
            let p = iy * m + ix;
            t.push((p, p, -4.0 * w));
            if ix > 0 {
                t.push((p, p - 1, w));
            }
            if ix + 1 < m {
                t.push((p, p + 1, w));
            }
            if iy > 0 {
                t.push((p, p - m, w));
            }
            if iy + 1 < m {
                t.push((p, p + m, w));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, &t)
}

/// Initial temperature `u0(x, y) = 2 (1 - x^2)(1 - y^2)` sampled on the
/// interior grid: a smooth bump, zero on the boundary, with energy in many
/// Laplacian eigenmodes (a single-eigenmode start would collapse the Krylov
/// space to one dimension and freeze the derivative track).
pub fn initial_condition(m: usize) -> Vec<f64> {
    let h = 2.0 / (m as f64 + 1.0);
    let mut u = Vec::with_capacity(m * m);
    for iy in 0..m {
        let y = -1.0 + (iy as f64 + 1.0) * h;
        for ix in 0..m {
            let x = -1.0 + (ix as f64 + 1.0) * h;
            u.push(2.0 * (1.0 - x * x) * (1.0 - y * y));
        }
    }
    u
}

/// Assembled model state shared by all evaluations in one study.
struct HeatModel {
    lap: SparseMatrix<f64>,
    u0: Vec<f64>,
    t: f64,
    k: usize,
}

impl HeatModel {
    fn new(config: &HeatFitConfig) -> Result<Self> {
        config.validate()?;
        let m = config.grid_points_per_dim;
        let lap = assemble_laplacian_2d(m)?;
        let n = m * m;
        // The plain-Arnoldi candidate evaluation runs k + 1 steps, so keep
        // k + 1 <= n.
        let k = config.krylov_k.min(n - 1);
        Ok(HeatModel {
            lap,
            u0: initial_condition(m),
            t: config.final_time,
            k,
        })
    }

    /// `s(sigma) = exp(T sigma Lap) u0` via the plain Arnoldi action at
    /// `k + 1` steps (the space the two-track run at `k` steps compresses).
    fn solution(&self, sigma: f64) -> Result<Vec<f64>> {
        let aop = Scaled {
            op: &self.lap,
            factor: sigma * self.t,
        };
        arnoldi_fab_final(&aop, &self.u0, &FunctionSpec::exp(), self.k + 1)
    }

    fn objective(&self, sigma: f64, s_ref: &[f64]) -> Result<f64> {
        let s = self.solution(sigma)?;
        let d = vector::norm2(&vector::sub(&s, s_ref));
        Ok(d * d)
    }

    /// One two-track run yields the trajectory and its sigma-derivative
    /// together: `v2 = s(sigma)`, `v1 = d/dsigma s(sigma)`, hence
    /// `f = ||v2 - s_ref||^2` and `f' = 2 <v2 - s_ref, v1>`.
    fn objective_and_gradient(&self, sigma: f64, s_ref: &[f64]) -> Result<(f64, f64)> {
        if vector::norm2(&self.u0) == 0.0 {
            let r = vector::norm2(s_ref);
            return Ok((r * r, 0.0));
        }
        let aop = Scaled {
            op: &self.lap,
            factor: sigma * self.t,
        };
        let eop = Scaled {
            op: &self.lap,
            factor: self.t,
        };
        let opts = ModifiedOptions {
            stop_tol: 0.0,
            check_every: self.k,
            ..ModifiedOptions::default()
        };
        let res = modified_arnoldi_op(&aop, &eop, &self.u0, &FunctionSpec::exp(), self.k, opts)?;
        let d = vector::sub(&res.v2, s_ref);
        let f = vector::norm2(&d);
        let grad = 2.0 * vector::dot(&d, &res.v1);
        Ok((f * f, grad))
    }
}

/// Objective value and sigma-gradient of the misfit at one diffusivity.
pub fn heat_objective_and_gradient(
    config: &HeatFitConfig,
    sigma: f64,
    s_ref: &[f64],
) -> Result<(f64, f64)> {
    if sigma <= 0.0 {
        return Err(Error::invalid(format!(
            "diffusivity must be positive, got {sigma}"
        )));
    }
    HeatModel::new(config)?.objective_and_gradient(sigma, s_ref)
}

/// Reference trajectory `s(sigma_ref)` for the configured grid.
pub fn heat_reference_solution(config: &HeatFitConfig) -> Result<Vec<f64>> {
    HeatModel::new(config)?.solution(config.sigma_ref)
}

/// One accepted gradient-descent iterate.
#[derive(Debug, Clone, Copy)]
pub struct HeatFitIterate {
    pub iter: usize,
    pub sigma: f64,
    pub f_value: f64,
}

/// Trajectory and terminal state of the fit.
#[derive(Debug, Clone)]
pub struct HeatFitOutcome {
    pub iterates: Vec<HeatFitIterate>,
    /// Terminal objective reached `abs_tol`.
    pub converged: bool,
    /// The line search failed 30 consecutive times; `iterates` still holds
    /// the trajectory up to that point.
    pub diverged: bool,
}

impl HeatFitOutcome {
    pub fn final_sigma(&self) -> f64 {
        self.iterates.last().map_or(f64::NAN, |it| it.sigma)
    }

    pub fn final_f(&self) -> f64 {
        self.iterates.last().map_or(f64::NAN, |it| it.f_value)
    }
}

/// Gradient descent with a halving backtracking line search, starting from
/// `step0` at every iteration. Candidates are accepted only on a strict
/// objective decrease; a candidate whose evaluation fails (a non-positive
/// trial diffusivity flips the spectrum and overflows the exponential)
/// counts as a rejection. Thirty consecutive rejections end the run with the
/// `diverged` flag instead of an error, so the trajectory survives.
pub fn heat_fit(config: &HeatFitConfig) -> Result<HeatFitOutcome> {
    let model = HeatModel::new(config)?;
    let s_ref = model.solution(config.sigma_ref)?;

    let mut sigma = config.sigma0;
    let (mut f_cur, mut g_cur) = model.objective_and_gradient(sigma, &s_ref)?;
    let mut iterates = vec![HeatFitIterate {
        iter: 0,
        sigma,
        f_value: f_cur,
    }];
    if f_cur <= config.abs_tol {
        return Ok(HeatFitOutcome {
            iterates,
            converged: true,
            diverged: false,
        });
    }

    let mut rejections = 0usize;
    let mut converged = false;
    'outer: for iter in 1..=config.max_iters {
        let mut step = config.step0;
        loop {
            let trial = sigma - step * g_cur;
            let accept = if trial > 0.0 {
                match model.objective(trial, &s_ref) {
                    Ok(fc) if fc.is_finite() && fc < f_cur => Some(fc),
                    _ => None,
                }
            } else {
                None
            };
            if accept.is_some() {
                rejections = 0;
                sigma = trial;
                // Re-evaluate the accepted iterate with the coupled solver so
                // the stored objective and the next gradient are consistent.
                let (f_new, g_new) = model.objective_and_gradient(sigma, &s_ref)?;
                f_cur = f_new;
                g_cur = g_new;
                break;
            }
            rejections += 1;
            if rejections >= 30 {
                return Ok(HeatFitOutcome {
                    iterates,
                    converged: false,
                    diverged: true,
                });
            }
            step *= 0.5;
        }
        iterates.push(HeatFitIterate {
            iter,
            sigma,
            f_value: f_cur,
        });
        if f_cur <= config.abs_tol {
            converged = true;
            break 'outer;
        }
    }

    Ok(HeatFitOutcome {
        iterates,
        converged,
        diverged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig;

    #[test]
    fn stencil_center_row() {
        let m = 3;
        let lap = assemble_laplacian_2d(m).unwrap();
        let h = 0.5;
        let w = 1.0 / (h * h);
        assert_eq!(lap.n_rows(), 9);
        assert_eq!(lap.get(4, 4), -4.0 * w);
        for neighbor in [1, 3, 5, 7] {
            assert_eq!(lap.get(4, neighbor), w);
        }
        // corner node has only two neighbors inside
        assert_eq!(lap.get(0, 0), -4.0 * w);
        assert_eq!(lap.get(0, 1), w);
        assert_eq!(lap.get(0, 3), w);
        assert_eq!(lap.get(0, 2), 0.0);

        assert!(assemble_laplacian_2d(2).is_err());
    }

    #[test]
    fn laplacian_is_exactly_symmetric() {
        let lap = assemble_laplacian_2d(5).unwrap();
        assert!(lap.to_dense().max_diff(&lap.transpose().to_dense()) == 0.0);
    }

    #[test]
    fn eigenvalues_match_closed_form() {
        // lambda_pq = (2/h^2)(cos(p pi /(m+1)) + cos(q pi /(m+1)) - 2)
        let m = 3;
        let lap = assemble_laplacian_2d(m).unwrap();
        let (w, _) = eig::hermitian_eigen(&lap.to_dense()).unwrap();
        let h = 2.0 / (m as f64 + 1.0);
        let mut expect = Vec::new();
        for p in 1..=m {
            for q in 1..=m {
                let c = (p as f64 * std::f64::consts::PI / (m as f64 + 1.0)).cos()
                    + (q as f64 * std::f64::consts::PI / (m as f64 + 1.0)).cos();
                expect.push(2.0 / (h * h) * (c - 2.0));
            }
        }
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let scale = expect[0].abs();
        for (got, want) in w.iter().zip(&expect) {
            assert!(
                (got - want).abs() < 1e-12 * scale,
                "eigenvalue {got} vs {want}"
            );
        }
        assert!(*expect.last().unwrap() < 0.0, "spectrum must stay negative");
    }

    #[test]
    fn gradient_matches_central_difference() {
        let config = HeatFitConfig {
            grid_points_per_dim: 12,
            ..HeatFitConfig::default()
        };
        let s_ref = heat_reference_solution(&config).unwrap();
        let model = HeatModel::new(&config).unwrap();
        let sigma = 1.05;
        let (_, grad) = model.objective_and_gradient(sigma, &s_ref).unwrap();
        let delta = 1e-6;
        let fp = model.objective(sigma + delta, &s_ref).unwrap();
        let fm = model.objective(sigma - delta, &s_ref).unwrap();
        let fd = (fp - fm) / (2.0 * delta);
        let rel = (grad - fd).abs() / grad.abs().max(1e-30);
        assert!(rel < 1e-5, "gradient {grad:.6e} vs central fd {fd:.6e}, rel {rel:.3e}");
    }

    #[test]
    fn desk_scale_fit_recovers_the_diffusivity() {
        let config = HeatFitConfig {
            grid_points_per_dim: 20,
            ..HeatFitConfig::default()
        };
        let out = heat_fit(&config).unwrap();
        assert!(out.converged, "fit did not reach the tolerance");
        assert!(!out.diverged);
        assert!(
            (out.final_sigma() - config.sigma_ref).abs() <= 1e-3,
            "terminal sigma {}",
            out.final_sigma()
        );
        assert!(out.final_f() <= config.abs_tol);
        for pair in out.iterates.windows(2) {
            assert!(
                pair[1].f_value <= pair[0].f_value,
                "objective rose from {:.3e} to {:.3e}",
                pair[0].f_value,
                pair[1].f_value
            );
        }
    }

    #[test]
    fn starting_at_the_reference_terminates_immediately() {
        let config = HeatFitConfig {
            grid_points_per_dim: 8,
            sigma0: 0.85,
            krylov_k: 60,
            ..HeatFitConfig::default()
        };
        let out = heat_fit(&config).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterates.len(), 1);
        assert_eq!(out.iterates[0].iter, 0);
        assert!(out.final_f() <= config.abs_tol);
    }

    #[test]
    fn zero_initial_condition_short_circuits() {
        let config = HeatFitConfig {
            grid_points_per_dim: 8,
            krylov_k: 30,
            ..HeatFitConfig::default()
        };
        let mut model = HeatModel::new(&config).unwrap();
        let s_ref = model.solution(config.sigma_ref).unwrap();
        model.u0 = vec![0.0; model.u0.len()];
        let (f, g) = model.objective_and_gradient(1.0, &s_ref).unwrap();
        let r = vector::norm2(&s_ref);
        assert!((f - r * r).abs() <= 1e-12 * r * r);
        assert_eq!(g, 0.0);
    }

    #[test]
    fn objective_is_smooth_near_the_minimum() {
        let config = HeatFitConfig {
            grid_points_per_dim: 10,
            krylov_k: 80,
            ..HeatFitConfig::default()
        };
        let model = HeatModel::new(&config).unwrap();
        let s_ref = model.solution(config.sigma_ref).unwrap();
        let f0 = model.objective(config.sigma_ref, &s_ref).unwrap();
        let fp = model.objective(config.sigma_ref + 1e-8, &s_ref).unwrap();
        let fm = model.objective(config.sigma_ref - 1e-8, &s_ref).unwrap();
        let band = 1e-6 * f0.max(1.0);
        assert!((fp - f0).abs() <= band && (fm - f0).abs() <= band);
    }

    #[test]
    fn config_validation() {
        let bad_grid = HeatFitConfig {
            grid_points_per_dim: 2,
            ..HeatFitConfig::default()
        };
        assert!(heat_fit(&bad_grid).is_err());
        let bad_sigma = HeatFitConfig {
            sigma0: 0.0,
            ..HeatFitConfig::default()
        };
        assert!(bad_sigma.validate().is_err());
        assert!(heat_objective_and_gradient(&HeatFitConfig::default(), -1.0, &[]).is_err());
    }
}
