//! Planning piecewise-linear paths between two planar points with at most
//! `n` turns, each bounded by `phi` in absolute value.
//!
//! The geometry is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix it to `f64`, which every tolerance default is tuned for.
//!
//! Angles are clockwise-positive; see [`angle`].

// `!(x > 0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angle;
pub mod construct;
pub mod enumerate;
pub mod error;
pub mod optimize;
pub mod region;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Scalar, Tolerances};

pub type Point = angle::Point<f64>;
pub type OrientedAngle = angle::OrientedAngle<f64>;
pub type AngleBounds = angle::AngleBounds<f64>;
pub type TurnRegion = region::TurnRegion<f64>;
pub type Cone = region::Cone<f64>;
pub type Rect = region::Rect<f64>;
pub type CanonicalFrame = region::CanonicalFrame<f64>;
pub type Polyline = construct::Polyline<f64>;
pub type ValidationReport = construct::ValidationReport<f64>;
pub type ProblemOInput = construct::ProblemOInput<f64>;
pub type GridSpec = enumerate::GridSpec<f64>;
pub type TurnSequence = enumerate::TurnSequence<f64>;
pub type DiscreteSequenceSet = enumerate::DiscreteSequenceSet<f64>;
pub type ShrinkParams = enumerate::ShrinkParams<f64>;
pub type CostModel = optimize::CostModel<f64>;
pub type Solution = optimize::Solution<f64>;
pub type ConvergenceReport = optimize::ConvergenceReport<f64>;
