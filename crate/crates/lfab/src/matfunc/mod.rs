//! Scalar and matrix functions: `exp`, `sqrt`, polynomials, divided
//! differences, and a Chebyshev interpolation error estimator.

pub mod expm;
pub mod sqrtm;

pub use expm::expm;
pub use sqrtm::sqrtm;

use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::scalar::Scalar;

/// The function `f` whose Fréchet derivative action is being approximated.
///
/// Every consumer needs scalar evaluation (`f`, `f'`) and a dense matrix
/// evaluation, so the variants are a closed enum rather than a trait: this
/// keeps the matrix kernels (`expm`, `sqrtm`, Horner) in one place and makes
/// the CLI surface trivially serializable.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    /// `f(z) = exp(t z)` with a fixed time scale `t`.
    Exp { time_scale: f64 },
    /// Principal square root.
    Sqrt,
    /// `f(z) = sum_i coeffs[i] z^i`, real coefficients, constant term first.
    Polynomial { coeffs: Vec<f64> },
}

impl FunctionSpec {
    pub fn exp() -> Self {
        FunctionSpec::Exp { time_scale: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionSpec::Exp { time_scale } => {
                if !time_scale.is_finite() {
                    return Err(Error::invalid("exp time scale must be finite"));
                }
            }
            FunctionSpec::Sqrt => {}
            FunctionSpec::Polynomial { coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::invalid("polynomial needs at least one coefficient"));
                }
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::invalid("polynomial coefficients must be finite"));
                }
            }
        }
        Ok(())
    }

    /// Scalar evaluation `f(z)`.
    pub fn eval<S: Scalar>(&self, z: S) -> S {
        match self {
            FunctionSpec::Exp { time_scale } => z.scale(*time_scale).exp(),
            FunctionSpec::Sqrt => z.sqrt(),
            FunctionSpec::Polynomial { coeffs } => horner(coeffs, z),
        }
    }

    /// Scalar derivative `f'(z)`.
    pub fn eval_derivative<S: Scalar>(&self, z: S) -> S {
        match self {
            FunctionSpec::Exp { time_scale } => z.scale(*time_scale).exp().scale(*time_scale),
            FunctionSpec::Sqrt => S::from_re(0.5) / z.sqrt(),
            FunctionSpec::Polynomial { coeffs } => {
                let d: Vec<f64> = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, &c)| c * i as f64)
                    .collect();
                if d.is_empty() {
                    S::zero()
                } else {
                    horner(&d, z)
                }
            }
        }
    }
}

fn horner<S: Scalar>(coeffs: &[f64], z: S) -> S {
    let mut acc = S::zero();
    for &c in coeffs.iter().rev() {
        acc = acc * z + S::from_re(c);
    }
    acc
}

/// Dense matrix function `f(H)`.
pub fn matfun<S: Scalar>(f: &FunctionSpec, h: &DenseMatrix<S>) -> Result<DenseMatrix<S>> {
    if !h.is_square() {
        return Err(Error::dimension(format!(
            "matfun: matrix is {}x{}",
            h.n_rows(),
            h.n_cols()
        )));
    }
    f.validate()?;
    match f {
        FunctionSpec::Exp { time_scale } => expm(&h.scale(S::from_re(*time_scale))),
        FunctionSpec::Sqrt => sqrtm(h),
        FunctionSpec::Polynomial { coeffs } => Ok(polym(coeffs, h)),
    }
}

/// Matrix polynomial by Horner's rule.
pub fn polym<S: Scalar>(coeffs: &[f64], h: &DenseMatrix<S>) -> DenseMatrix<S> {
    let n = h.n_rows();
    let mut acc = DenseMatrix::zeros(n, n);
    for &c in coeffs.iter().rev() {
        acc = acc.matmul(h).expect("square");
        for i in 0..n {
            let v = acc.get(i, i) + S::from_re(c);
            acc.set(i, i, v);
        }
    }
    acc
}

/// Relative gap below which two abscissas are treated as confluent.
const CONFLUENT_TOL: f64 = 1e-7;

/// First divided difference `f[x, y] = (f(x) - f(y)) / (x - y)`, switching to
/// the derivative at the midpoint when the nodes are too close for the
/// quotient to survive cancellation.
pub fn divided_difference<S: Scalar>(f: &FunctionSpec, x: S, y: S) -> S {
    let gap = (x - y).abs();
    if gap <= CONFLUENT_TOL * x.abs().max(y.abs()).max(1.0) {
        f.eval_derivative((x + y).scale(0.5))
    } else {
        (f.eval(x) - f.eval(y)) / (x - y)
    }
}

/// Chebyshev interpolation report: `sup_error` is the uniform error of the
/// degree-`degree` interpolant measured on a uniform grid, an upper proxy for
/// the best-approximation error `inf_q sup |g - q|` (it overshoots the true
/// infimum by at most the Lebesgue factor, reported alongside).
#[derive(Debug, Clone)]
pub struct ChebyshevFit {
    pub degree: usize,
    pub sup_error: f64,
    pub lebesgue_bound: f64,
}

/// Uniform error of the Chebyshev interpolant of `g` on `[lo, hi]`.
///
/// Interpolates at the `degree + 1` Chebyshev points of the first kind and
/// evaluates with the barycentric formula on `grid` uniform sample points.
pub fn chebyshev_uniform_error(
    g: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    degree: usize,
    grid: usize,
) -> Result<ChebyshevFit> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::invalid(format!(
            "chebyshev interval [{lo}, {hi}] is not a finite interval"
        )));
    }
    if grid < 2 {
        return Err(Error::invalid("chebyshev grid needs at least 2 points"));
    }
    let lebesgue_bound = (2.0 / std::f64::consts::PI) * ((degree + 1) as f64).ln() + 1.0;
    if hi == lo {
        return Ok(ChebyshevFit {
            degree,
            sup_error: 0.0,
            lebesgue_bound,
        });
    }
    let m = degree + 1;
    let map = |t: f64| 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    let mut values = Vec::with_capacity(m);
    for j in 0..m {
        let theta = (2.0 * j as f64 + 1.0) * std::f64::consts::PI / (2.0 * m as f64);
        let t = theta.cos();
        // barycentric weights for first-kind points, up to a common factor
        let w = if j % 2 == 0 { theta.sin() } else { -theta.sin() };
        nodes.push(map(t));
        weights.push(w);
        values.push(g(map(t)));
    }
    let mut sup = 0.0f64;
    for s in 0..grid {
        let x = lo + (hi - lo) * s as f64 / (grid - 1) as f64;
        let mut num = 0.0;
        let mut den = 0.0;
        let mut exact = None;
        for j in 0..m {
            let d = x - nodes[j];
            if d.abs() < 1e-300 {
                exact = Some(values[j]);
                break;
            }
            let q = weights[j] / d;
            num += q * values[j];
            den += q;
        }
        let p = exact.unwrap_or(num / den);
        sup = sup.max((g(x) - p).abs());
    }
    Ok(ChebyshevFit {
        degree,
        sup_error: sup,
        lebesgue_bound,
    })
}
