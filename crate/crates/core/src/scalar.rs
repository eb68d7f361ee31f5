//! Real scalar types the matrix model can be instantiated over.

use std::fmt::{Debug, Display};

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

mod sealed {
    pub trait Sealed {}
    impl Sealed for f32 {}
    impl Sealed for f64 {}
}

/// Complex number over a [`Real`] scalar.
pub type C<T> = Complex<T>;

/// Floating point scalar backing every matrix computation: `f32` or `f64`.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + sealed::Sealed
{
    /// Default absolute tolerance for residual comparisons.
    const DEFAULT_TOL: f64;

    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite literal")
    }

    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("real scalar converts to f64")
    }
}

impl Real for f32 {
    const DEFAULT_TOL: f64 = 1e-4;
}

impl Real for f64 {
    const DEFAULT_TOL: f64 = 1e-10;
}

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn real<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}
