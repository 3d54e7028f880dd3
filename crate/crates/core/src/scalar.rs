//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All algorithms are written against [`Real`], which is satisfied by `f32`
//! and `f64`. Tolerances quoted throughout the crate are double-precision
//! values; single precision compiles and runs but only the scalar-level
//! routines (special functions, schedules, fits) are meaningful there.

use nalgebra::{Complex, RealField};
use num_traits::FloatConst;

/// Real scalar usable by the operator algebra and the quadrature routines.
pub trait Real: RealField + FloatConst + Copy + Default {}

impl<T> Real for T where T: RealField + FloatConst + Copy + Default {}

/// Complex scalar over a [`Real`].
pub type Cplx<T> = Complex<T>;

/// Converts an `f64` literal into the working scalar.
#[inline(always)]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Converts a working scalar back to `f64` (lossless for `f32`/`f64`).
#[inline(always)]
pub fn to_f64<T: Real>(x: T) -> f64 {
    nalgebra::try_convert(x).unwrap_or(f64::NAN)
}

#[inline(always)]
pub fn from_usize<T: Real>(n: usize) -> T {
    lit(n as f64)
}

#[inline(always)]
pub fn cplx<T: Real>(re: T, im: T) -> Cplx<T> {
    Complex::new(re, im)
}

#[inline(always)]
pub fn creal<T: Real>(re: T) -> Cplx<T> {
    Complex::new(re, T::zero())
}

#[inline(always)]
pub fn imag_unit<T: Real>() -> Cplx<T> {
    Complex::new(T::zero(), T::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_round_trip() {
        assert_eq!(lit::<f64>(0.25), 0.25);
        assert_eq!(to_f64(lit::<f32>(0.5)), 0.5);
        assert_eq!(from_usize::<f64>(7), 7.0);
    }
}
