//! Scalar abstraction for the numeric core.
//!
//! Everything in this crate is generic over [`Scalar`], which is any real
//! field type with primitive conversions. `f64` is the precision used by the
//! CLI and the test suites; `f32` is supported with proportionally looser
//! tolerances.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar type the library operates on.
///
/// The associated constants are the validation and diagnostic tolerances,
/// tuned per precision. The `f64` values are the contractual ones.
pub trait Scalar: RealField + FromPrimitive + ToPrimitive + Copy {
    /// Entries of a stochastic matrix may undershoot zero by this much and
    /// are clamped at construction.
    const NEG_ENTRY_TOL: Self;
    /// Accepted deviation of a row sum from one before renormalization.
    const ROW_SUM_TOL: Self;
    /// Residual accepted when verifying block-triangular structure.
    const BLOCK_TOL: Self;
    /// Base step for central finite differences (scaled by `1 + ||x||`).
    const FD_STEP: Self;
    /// Relative tolerance for fixed-point and root searches.
    const ROOT_TOL: Self;
    /// State magnitude treated as divergence by the simulator.
    const DIVERGENCE_LIMIT: Self;
    /// Row-difference norm below which a left product counts as mixed.
    const ERGODIC_TOL: Self;
    /// Noise floor excluded from log-linear rate fits.
    const FIT_FLOOR: Self;
}

impl Scalar for f64 {
    const NEG_ENTRY_TOL: f64 = 1e-12;
    const ROW_SUM_TOL: f64 = 1e-9;
    const BLOCK_TOL: f64 = 1e-9;
    const FD_STEP: f64 = 1e-6;
    const ROOT_TOL: f64 = 1e-12;
    const DIVERGENCE_LIMIT: f64 = 1e12;
    const ERGODIC_TOL: f64 = 1e-8;
    const FIT_FLOOR: f64 = 1e-14;
}

impl Scalar for f32 {
    const NEG_ENTRY_TOL: f32 = 1e-5;
    const ROW_SUM_TOL: f32 = 1e-4;
    const BLOCK_TOL: f32 = 1e-4;
    const FD_STEP: f32 = 1e-3;
    const ROOT_TOL: f32 = 1e-5;
    const DIVERGENCE_LIMIT: f32 = 1e12;
    const ERGODIC_TOL: f32 = 1e-4;
    const FIT_FLOOR: f32 = 1e-6;
}

/// Shorthand for converting an `f64` literal into the working scalar.
#[inline]
pub(crate) fn real<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("f64 literal must convert into the scalar type")
}
