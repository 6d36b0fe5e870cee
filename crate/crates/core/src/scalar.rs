//! Floating point abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar the solvers are generic over: `f32` or `f64`.
///
/// The associated tolerances are expressed in `f64` and converted on use, so
/// each precision carries thresholds that are meaningful for its mantissa.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Primal feasibility / optimality tolerance of the simplex solver.
    const LP_TOLERANCE: f64;
    /// Smallest magnitude accepted as a pivot element.
    const PIVOT_TOLERANCE: f64;
    /// Allowed deviation of a probability vector's sum from one.
    const WEIGHT_TOLERANCE: f64;

    /// Converts an `f64` literal, panicking only for values no float can hold.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn lp_tol() -> Self {
        Self::lit(Self::LP_TOLERANCE)
    }

    #[inline]
    fn pivot_tol() -> Self {
        Self::lit(Self::PIVOT_TOLERANCE)
    }

    #[inline]
    fn weight_tol() -> Self {
        Self::lit(Self::WEIGHT_TOLERANCE)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const LP_TOLERANCE: f64 = 1e-9;
    const PIVOT_TOLERANCE: f64 = 1e-11;
    const WEIGHT_TOLERANCE: f64 = 1e-12;
}

impl Scalar for f32 {
    const LP_TOLERANCE: f64 = 1e-4;
    const PIVOT_TOLERANCE: f64 = 1e-6;
    const WEIGHT_TOLERANCE: f64 = 1e-5;
}

/// Euclidean norm of `a - b`.
pub fn distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>().sqrt()
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    a.iter().map(|&x| x * x).sum::<T>().sqrt()
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}
