use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

/// Scalar field for all numerical kernels: either `f64` or `Complex64`.
///
/// Everything generic in this crate is written against this trait so the same
/// Arnoldi / LU / Jacobi / matrix-function code runs over real and complex
/// data. Inner products conjugate the left argument through [`Scalar::conj`],
/// which is the identity on `f64`.
pub trait Scalar:
    Copy
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
{
    /// Whether the field carries an imaginary part.
    const IS_COMPLEX: bool;

    fn zero() -> Self;
    fn one() -> Self;

    /// Embed a real number into the field.
    fn from_re(x: f64) -> Self;
    /// Build a scalar from real and imaginary parts (imaginary part dropped
    /// on `f64`).
    fn from_parts(re: f64, im: f64) -> Self;

    fn re(self) -> f64;
    fn im(self) -> f64;
    fn conj(self) -> Self;

    /// Modulus |z|.
    fn abs(self) -> f64;
    /// Squared modulus, cheaper than `abs` for comparisons.
    fn abs_sq(self) -> f64;

    /// Multiply by a real factor.
    fn scale(self, x: f64) -> Self;

    /// Principal square root (NaN for negative reals on `f64`).
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;

    fn is_finite(self) -> bool;
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn one() -> Self {
        1.0
    }
    #[inline]
    fn from_re(x: f64) -> Self {
        x
    }
    #[inline]
    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn im(self) -> f64 {
        0.0
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    #[inline]
    fn abs_sq(self) -> f64 {
        self * self
    }
    #[inline]
    fn scale(self, x: f64) -> Self {
        self * x
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;

    #[inline]
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    #[inline]
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    #[inline]
    fn from_re(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    #[inline]
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn im(self) -> f64 {
        self.im
    }
    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn abs(self) -> f64 {
        self.norm()
    }
    #[inline]
    fn abs_sq(self) -> f64 {
        self.norm_sqr()
    }
    #[inline]
    fn scale(self, x: f64) -> Self {
        self * x
    }
    #[inline]
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    #[inline]
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_conjugation_is_identity() {
        assert_eq!((-3.5f64).conj(), -3.5);
        assert_eq!(2.0f64.im(), 0.0);
        assert!(!f64::IS_COMPLEX);
    }

    #[test]
    fn complex_roundtrip_and_modulus() {
        let z = Complex64::from_parts(3.0, -4.0);
        assert_eq!(z.re(), 3.0);
        assert_eq!(z.im(), -4.0);
        assert_eq!(z.abs(), 5.0);
        assert_eq!(z.abs_sq(), 25.0);
        assert_eq!(z.conj(), Complex64::new(3.0, 4.0));
        assert!(Complex64::IS_COMPLEX);
    }

    #[test]
    fn principal_sqrt_branches() {
        let z = Complex64::new(-1.0, 0.0).sqrt();
        assert!((z.re - 0.0).abs() < 1e-15 && (z.im - 1.0).abs() < 1e-15);
        assert!(f64::sqrt(-1.0).is_nan());
    }
}
