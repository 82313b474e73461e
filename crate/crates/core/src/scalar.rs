//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive};

/// Floating-point type the solvers are generic over.
///
/// Tolerances are part of the trait because the right absolute slack for a
/// feasibility check depends on the precision of the type. The `f64` values
/// assume function values of order 1 to 1e4.
pub trait Scalar: Float + FromPrimitive + Sum + Debug + Display + FromStr + Default + Send + Sync + 'static {
    /// Absolute slack for `s(A) <= F(A)` style feasibility checks.
    fn feasibility_tol() -> Self;

    /// Two objective values closer than this (relative to `1 + |a|`) are a tie.
    fn tie_tol() -> Self;

    /// Allowed gap between primal and dual values of a single prox solve.
    fn duality_tol() -> Self;

    /// Shorthand for literal conversion.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable")
    }
}

impl Scalar for f64 {
    fn feasibility_tol() -> Self {
        1e-9
    }

    fn tie_tol() -> Self {
        1e-12
    }

    fn duality_tol() -> Self {
        1e-7
    }
}

impl Scalar for f32 {
    fn feasibility_tol() -> Self {
        1e-3
    }

    fn tie_tol() -> Self {
        1e-6
    }

    fn duality_tol() -> Self {
        1e-2
    }
}

/// `a` and `b` are equal up to [`Scalar::tie_tol`].
pub fn nearly_equal<T: Scalar>(a: T, b: T) -> bool {
    (a - b).abs() <= T::tie_tol() * (T::one() + a.abs().max(b.abs()))
}
