//! Floating-point abstraction used by the instance builder and the solvers.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Scalar type the LP/MILP machinery is generic over.
///
/// The tolerances are tied to the precision of the type: `f64` meets the
/// 1e-7 feasibility / 1e-6 integrality contract, `f32` runs with looser
/// values suited to its 24-bit mantissa.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Primal feasibility tolerance on rows and bounds.
    fn feas_tol() -> Self;
    /// Reduced-cost optimality tolerance.
    fn opt_tol() -> Self;
    /// Distance from an integer below which a value counts as integral.
    fn int_tol() -> Self;
    /// Smallest magnitude accepted as a simplex pivot element.
    fn pivot_tol() -> Self;
    /// Entries below this magnitude are dropped from factor and update vectors.
    fn drop_tol() -> Self;
    /// Bound relaxation used by the two-pass ratio test.
    fn harris_tol() -> Self;

    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f64 {
    fn feas_tol() -> Self {
        1e-7
    }
    fn opt_tol() -> Self {
        1e-7
    }
    fn int_tol() -> Self {
        1e-6
    }
    fn pivot_tol() -> Self {
        1e-9
    }
    fn drop_tol() -> Self {
        1e-14
    }
    fn harris_tol() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn feas_tol() -> Self {
        2e-3
    }
    fn opt_tol() -> Self {
        1e-3
    }
    fn int_tol() -> Self {
        5e-3
    }
    fn pivot_tol() -> Self {
        1e-5
    }
    fn drop_tol() -> Self {
        1e-7
    }
    fn harris_tol() -> Self {
        1e-5
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerances_are_ordered() {
        fn check<S: Scalar>() {
            assert!(S::drop_tol() < S::pivot_tol());
            assert!(S::harris_tol() <= S::feas_tol());
            assert!(S::feas_tol() <= S::int_tol());
        }
        check::<f64>();
        check::<f32>();
    }

    #[test]
    fn round_trips_through_f64() {
        assert_eq!(f32::of(0.25).as_f64(), 0.25);
        assert_eq!(f64::of(-12.0), -12.0);
    }
}
