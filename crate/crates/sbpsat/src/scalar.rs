//! Scalar abstractions.
//!
//! [`Real`] is the floating-point type every operator and solver is generic
//! over. [`Field`] is the (possibly exact) arithmetic used when constructing
//! operator closures; it is implemented for `BigRational` and for `f64`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive, Zero};

/// Floating-point scalar used by all assembled operators.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`; constants in this crate are all representable.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal conversion")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize conversion")
    }

    fn f64(self) -> f64 {
        self.to_f64().expect("conversion to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Arithmetic used for operator construction. Exact for rationals.
pub trait Field: Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync {
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Magnitude used for pivot selection.
    fn magnitude(&self) -> f64;
    /// Whether the value should be treated as zero during elimination.
    fn negligible(&self, scale: f64) -> bool;
    fn to_real<T: Real>(&self) -> T {
        T::lit(self.magnitude_signed())
    }
    fn magnitude_signed(&self) -> f64;
}

impl Field for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn magnitude(&self) -> f64 {
        self.to_f64().map(f64::abs).unwrap_or(f64::INFINITY)
    }
    fn negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
    fn magnitude_signed(&self) -> f64 {
        self.to_f64().expect("rational out of f64 range")
    }
}

impl Field for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn negligible(&self, scale: f64) -> bool {
        self.abs() <= 1e-12 * scale.max(1.0)
    }
    fn magnitude_signed(&self) -> f64 {
        *self
    }
}

/// `x^k` in a field, with `0^0 = 1`.
pub fn fpow<F: Field>(x: &F, k: usize) -> F {
    let mut r = F::one();
    for _ in 0..k {
        r = r * x.clone();
    }
    r
}

pub fn fint<F: Field>(n: i64) -> F {
    F::from_ratio(n, 1)
}

/// Exact rational from integers, convenience for tests and tables.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::from_ratio(num, den)
}

