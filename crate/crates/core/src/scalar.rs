//! Scalar traits shared by the exact and floating-point layers.
//!
//! The combinatorial layer only needs ordered ring arithmetic, so it runs on
//! `f32`, `f64`, machine integers and exact rationals alike. The Riemannian
//! layer additionally needs transcendental functions and is bounded on
//! [`Real`].

use std::fmt::Debug;
use std::iter::Sum;
use std::ops::Neg;

use num_traits::{Float, FromPrimitive, Num};

/// Ordered ring scalar used for cost weights, critical values and Hessian
/// diagonals.
pub trait Weight:
    Num + Neg<Output = Self> + PartialOrd + Clone + FromPrimitive + Debug + Send + Sync + 'static
{
}

impl<T> Weight for T where
    T: Num
        + Neg<Output = Self>
        + PartialOrd
        + Clone
        + FromPrimitive
        + Debug
        + Send
        + Sync
        + 'static
{
}

/// Floating-point scalar for the matrix layer.
pub trait Real: Weight + Float + Sum {
    /// Converts an `f64` literal, panicking only for values the type cannot
    /// represent at all (never the case for `f32`/`f64`).
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        <Self as num_traits::ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where T: Weight + Float + Sum {}
