//! Morse theory of `f_C(A) = c_1 x_11 + ... + c_n x_nn` on the rotation group
//! SO(n).
//!
//! Two layers that check each other:
//!
//! - an exact layer ([`morse`], [`poly`]) enumerating the `2^(n-1)` critical
//!   sign matrices, their indices and values, and comparing the Morse
//!   polynomial against the `Z_2` Poincare polynomial of SO(n);
//! - a floating-point layer ([`lie`], [`numeric`], [`flow`]) that evaluates
//!   gradients and Hessians in the Givens-curve basis, counts negative
//!   eigenvalues, and runs Riemannian gradient descent from Haar-random
//!   starts.
//!
//! The math is generic over the scalar. The aliases below fix the common
//! choices: `f64` for numerics and `Rational64` for exact critical values.

pub mod eigen;
pub mod error;
pub mod flow;
pub mod lie;
pub mod matrix;
pub mod morse;
pub mod numeric;
pub mod poly;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use flow::{gradient_flow, run_flow_batch, FlowBatch, FlowConfig, FlowResult, FlowSummary};
pub use lie::{
    curve_velocity, givens_curve, haar_sample, is_rotation, retract, sample_rng, CostVector,
    PairIndex, PairVector, RotationMatrix, Side, MEMBERSHIP_TOL,
};
pub use matrix::Matrix;
pub use morse::{
    critical_value, enumerate_critical_points, hessian_diagonal, index_by_formula,
    index_by_hessian, morse_polynomial, CriticalPointRecord, SignPattern,
};
pub use numeric::{
    numeric_index, objective, riemannian_gradient, tangent_hessian, GradientVector, TangentHessian,
};
pub use poly::{
    enumerate_basis, induction_step, is_perfect, morse_remainder, poincare_from_basis,
    poincare_product, ExteriorBasisElement, IntPolynomial, MorseRemainder, PerfectnessReport,
};
pub use scalar::{Real, Weight};

pub use num_rational::Rational64;

/// Rotation in double precision.
pub type Rotation = RotationMatrix<f64>;
/// Rotation in single precision.
pub type Rotation32 = RotationMatrix<f32>;
/// Double-precision cost weights.
pub type Costs = CostVector<f64>;
/// Exact rational cost weights.
pub type ExactCosts = CostVector<Rational64>;
/// Critical point with a double-precision value.
pub type Record = CriticalPointRecord<f64>;
/// Critical point with an exact rational value.
pub type ExactRecord = CriticalPointRecord<Rational64>;
pub type Hessian = TangentHessian<f64>;
pub type Gradient = GradientVector<f64>;
pub type Flow = FlowResult<f64>;
