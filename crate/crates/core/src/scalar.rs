//! Scalar abstraction shared by the numerical core.
//!
//! Everything below the verification layer (domains, kernels, quadrature,
//! the dense eigensolver and the Nyström operator) is written against
//! [`Real`], so the same code runs in `f64` for verification work and in
//! `f32` for quick, memory-light sweeps.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    /// Conversion from a count or index.
    #[inline]
    fn of(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Bisection stops once an interval is this many ulps wide.
    fn bisection_steps() -> usize;
}

impl Real for f64 {
    fn bisection_steps() -> usize {
        64
    }
}

impl Real for f32 {
    fn bisection_steps() -> usize {
        32
    }
}

/// `(2π)^{-d}`, the Plancherel factor of the `e^{-ix·ξ}` transform.
#[inline]
pub fn plancherel_factor<T: Real>(d: usize) -> T {
    T::TAU().powi(-(d as i32))
}
