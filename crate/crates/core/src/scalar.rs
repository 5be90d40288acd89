//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating point type underlying the complex arithmetic: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Pivot magnitude, relative to the largest matrix entry, below which a
    /// factorization reports the matrix as singular.
    fn pivot_tolerance() -> Self;

    /// Converts an `f64` literal into this type.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    #[inline]
    fn pivot_tolerance() -> Self {
        1e-14
    }
}

impl Real for f32 {
    #[inline]
    fn pivot_tolerance() -> Self {
        1e-6
    }
}

/// Float formatting shared by every CSV writer: 17 significant digits.
pub fn fmt17<T: Real>(v: T) -> String {
    let v = v.as_f64();
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

/// Zeroes subnormal components. Long banded solves whose solutions decay
/// geometrically otherwise spend most of their time in subnormal arithmetic.
#[inline]
pub(crate) fn flush_subnormal<T: Real>(z: &mut Complex<T>) {
    if z.re.abs() < T::min_positive_value() {
        z.re = T::zero();
    }
    if z.im.abs() < T::min_positive_value() {
        z.im = T::zero();
    }
}

/// `|z|` through `sqrt(re^2 + im^2)` when that neither overflows nor
/// underflows, else through `hypot`.
#[inline]
pub(crate) fn modulus<T: Real>(z: Complex<T>) -> T {
    let sq = z.norm_sqr();
    if sq.is_finite() && sq >= T::min_positive_value() {
        sq.sqrt()
    } else {
        z.norm()
    }
}
