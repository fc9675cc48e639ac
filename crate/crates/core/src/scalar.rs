//! Real scalar abstraction underlying all matrix numerics.
//!
//! Every module in this crate is generic over the real field `T`; complex
//! quantities are `num_complex::Complex<T>`. Concrete aliases for `f64`
//! live at the crate root.

use std::fmt::{Debug, Display};
use std::iter::{Product, Sum};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Product
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lift an `f64` constant into `Self`.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant must be representable")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over the scalar `T`.
pub type C<T> = Complex<T>;

/// Complex constant from `f64` parts.
#[inline]
pub fn cplx<T: Scalar>(re: f64, im: f64) -> C<T> {
    Complex::new(T::of(re), T::of(im))
}

/// Real axis embedding of a scalar.
#[inline]
pub fn re<T: Scalar>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// Point on the unit circle at angle `x`.
#[inline]
pub fn unit_circle<T: Scalar>(x: T) -> C<T> {
    Complex::new(x.cos(), x.sin())
}
