//! Floating-point abstraction shared by every geometric routine.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar the geometry is generic over (`f32` or `f64`).
///
/// The default tolerances are per-type because the double-precision
/// thresholds are far below `f32` resolution.
pub trait Scalar: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Relative tolerance for the collinearity test of [`crate::angle::side_of_line`].
    fn default_side_tol() -> Self;
    /// Absolute tolerance (radians) for closed angle-interval tests.
    fn default_angle_tol() -> Self;

    /// Converts an `f64` literal. Every literal used by this crate is representable.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }
}

impl Scalar for f64 {
    fn default_side_tol() -> Self {
        1e-12
    }
    fn default_angle_tol() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn default_side_tol() -> Self {
        1e-6
    }
    fn default_angle_tol() -> Self {
        1e-4
    }
}

/// The pair of numeric knobs used by every predicate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<T> {
    /// Relative collinearity tolerance.
    pub side: T,
    /// Absolute angle tolerance in radians.
    pub angle: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            side: T::default_side_tol(),
            angle: T::default_angle_tol(),
        }
    }
}

impl<T: Scalar> Tolerances<T> {
    pub fn with_angle(angle: T) -> Self {
        Self {
            angle,
            ..Self::default()
        }
    }
}
