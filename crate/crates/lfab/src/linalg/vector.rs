//! Free functions over `&[S]` vectors.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Inner product `x^* y`, conjugating the left argument.
pub fn dot<S: Scalar>(x: &[S], y: &[S]) -> S {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(&a, &b)| a.conj() * b).sum()
}

/// Euclidean norm.
pub fn norm2<S: Scalar>(x: &[S]) -> f64 {
    x.iter().map(|&a| a.abs_sq()).sum::<f64>().sqrt()
}

/// `y += alpha * x`.
pub fn axpy<S: Scalar>(alpha: S, x: &[S], y: &mut [S]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `x *= c` in place.
pub fn scale_in_place<S: Scalar>(x: &mut [S], c: S) {
    for xi in x.iter_mut() {
        *xi *= c;
    }
}

/// Element-wise difference `x - y`.
pub fn sub<S: Scalar>(x: &[S], y: &[S]) -> Vec<S> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(&a, &b)| a - b).collect()
}

/// Relative Euclidean distance `||x - y|| / ||y||`, with `||y||` replaced by
/// 1 when `y` is zero.
pub fn rel_dist<S: Scalar>(x: &[S], y: &[S]) -> f64 {
    let d = norm2(&sub(x, y));
    let n = norm2(y);
    if n == 0.0 {
        d
    } else {
        d / n
    }
}

/// Largest modulus of an entry.
pub fn max_abs<S: Scalar>(x: &[S]) -> f64 {
    x.iter().map(|&a| a.abs()).fold(0.0, f64::max)
}

pub fn all_finite<S: Scalar>(x: &[S]) -> bool {
    x.iter().all(|&a| a.is_finite())
}

/// Standard basis vector `e_i` of length `n`.
pub fn unit<S: Scalar>(n: usize, i: usize) -> Result<Vec<S>> {
    if i >= n {
        return Err(Error::invalid(format!(
            "unit vector index {i} out of range for length {n}"
        )));
    }
    let mut e = vec![S::zero(); n];
    e[i] = S::one();
    Ok(e)
}

/// All-ones vector of length `n`.
pub fn ones<S: Scalar>(n: usize) -> Vec<S> {
    vec![S::one(); n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn dot_conjugates_left_argument() {
        let x = vec![Complex64::new(0.0, 1.0)];
        let y = vec![Complex64::new(0.0, 1.0)];
        // (i)^* * i = -i * i = 1
        assert_eq!(dot(&x, &y), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn norm_and_axpy() {
        let x = vec![3.0, 4.0];
        assert_eq!(norm2(&x), 5.0);
        let mut y = vec![1.0, 1.0];
        axpy(2.0, &x, &mut y);
        assert_eq!(y, vec![7.0, 9.0]);
    }

    #[test]
    fn rel_dist_zero_reference_is_absolute() {
        let x = vec![1e-3, 0.0];
        let y = vec![0.0, 0.0];
        assert_eq!(rel_dist(&x, &y), 1e-3);
    }

    #[test]
    fn unit_vector_bounds() {
        assert!(unit::<f64>(3, 3).is_err());
        assert_eq!(unit::<f64>(3, 1).unwrap(), vec![0.0, 1.0, 0.0]);
    }
}
