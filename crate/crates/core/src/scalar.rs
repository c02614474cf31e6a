//! Scalar abstractions.
//!
//! Floating-point code is generic over [`Real`] (any `nalgebra::RealField`,
//! in practice `f32` and `f64`). The ladder and vertical operators of the
//! block construction only ever need integers, rationals and square roots of
//! integers, so they are generic over the lighter [`RadicalScalar`], which is
//! implemented both for the floats and for the exact [`Surd`](crate::Surd).

use std::fmt::Debug;
use std::ops::Neg;

use nalgebra::{ClosedAddAssign, ClosedMulAssign, ClosedSubAssign, Complex, RealField};
use num_traits::{One, ToPrimitive, Zero};

/// Real floating-point field used by every numerical routine.
pub trait Real: RealField + Copy + ToPrimitive {}

impl<T: RealField + Copy + ToPrimitive> Real for T {}

/// Complex number over a [`Real`] field.
pub type C<T> = Complex<T>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Lossy conversion back to `f64`, for reports and error payloads.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Machine epsilon of `T`.
#[inline]
pub fn epsilon<T: Real>() -> T {
    T::default_epsilon()
}

/// A tolerance quoted for `f64`, rescaled to the precision of `T`.
///
/// For `f64` this returns `x` unchanged; for a coarser type the value is
/// multiplied by the ratio of machine epsilons.
pub fn tol<T: Real>(x: f64) -> T {
    let ratio = (to_f64(epsilon::<T>()) / f64::EPSILON).max(1.0);
    lit(x * ratio)
}

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

/// Modulus of a complex number.
#[inline]
pub fn cabs<T: Real>(z: C<T>) -> T {
    z.re.hypot(z.im)
}

#[inline]
pub(crate) fn creal<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// Scalars that can represent `sqrt(k)` for natural `k` and rationals `p/q`.
///
/// Enough structure to build the truncated ladder matrices and the block
/// frame vectors, and to multiply them through `nalgebra`.
pub trait RadicalScalar:
    nalgebra::Scalar + Zero + One + ClosedAddAssign + ClosedSubAssign + ClosedMulAssign + Neg<Output = Self> + Debug
{
    /// `sqrt(k)`.
    fn sqrt_of(k: u64) -> Self;
    /// `num / den`; `den` must be nonzero.
    fn ratio(num: i64, den: i64) -> Self;
    /// Nearest `f64`.
    fn approx_f64(&self) -> f64;
}

macro_rules! float_radical {
    ($t:ty) => {
        impl RadicalScalar for $t {
            fn sqrt_of(k: u64) -> Self {
                (k as $t).sqrt()
            }
            fn ratio(num: i64, den: i64) -> Self {
                assert!(den != 0, "zero denominator");
                num as $t / den as $t
            }
            fn approx_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

float_radical!(f32);
float_radical!(f64);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tol_is_identity_for_f64() {
        assert_eq!(tol::<f64>(1e-10), 1e-10);
    }

    #[test]
    fn tol_scales_for_f32() {
        let t = to_f64(tol::<f32>(1e-10));
        let expected = 1e-10 * (f32::EPSILON as f64 / f64::EPSILON);
        assert!((t - expected).abs() <= 1e-6 * expected);
    }

    #[test]
    fn float_radicals() {
        assert_eq!(<f64 as RadicalScalar>::sqrt_of(4), 2.0);
        assert_eq!(<f64 as RadicalScalar>::ratio(-3, 4), -0.75);
    }
}
