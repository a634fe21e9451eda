//! Scalar abstraction: the crate's numerics are generic over the floating
//! type through `Real`, instantiated for `f32` and `f64`.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::float::{Float, FloatConst};
use num_traits::FromPrimitive;

/// Floating scalar for coefficients, evaluation points and tolerances.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for pulling `f64` literals (tolerances, constants) into `T`.
#[inline]
pub fn cast<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in every Real")
}

/// Widening conversion for log-space arithmetic.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    num_traits::cast(x).expect("Real widens to f64")
}
