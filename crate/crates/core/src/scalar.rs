//! Exact ordered-field scalars.
//!
//! Everything in this crate is generic over [`Scalar`], an exact ordered
//! field. The provided implementations are the `num-rational` ratio types;
//! [`crate::Rational`] (arbitrary precision) is the default used by the
//! concrete aliases at the crate root. Fixed-width ratios are faster but
//! panic on overflow.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive};

/// An exact ordered field usable as the coefficient domain.
pub trait Scalar: Clone + Ord + Hash + Debug + Display + FromStr + Signed + Send + Sync + 'static {
    fn from_i64(n: i64) -> Self;

    fn to_big_rational(&self) -> BigRational;

    /// Converts back from an arbitrary-precision rational, or `None` when the
    /// value does not fit the representation.
    fn from_big_rational(q: &BigRational) -> Option<Self>;

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn is_integral(&self) -> bool {
        self.to_big_rational().is_integer()
    }
}

macro_rules! impl_scalar_for_ratio {
    ($($int:ty),*) => {$(
        impl Scalar for Ratio<$int> {
            fn from_i64(n: i64) -> Self {
                Ratio::from_integer(<$int>::try_from(n).expect("integer out of range"))
            }

            fn to_big_rational(&self) -> BigRational {
                BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
            }

            fn from_big_rational(q: &BigRational) -> Option<Self> {
                let n = <$int>::try_from(q.numer().clone()).ok()?;
                let d = <$int>::try_from(q.denom().clone()).ok()?;
                Some(Ratio::new(n, d))
            }
        }
    )*};
}

impl_scalar_for_ratio!(i32, i64, i128);

impl Scalar for BigRational {
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn to_big_rational(&self) -> BigRational {
        self.clone()
    }

    fn from_big_rational(q: &BigRational) -> Option<Self> {
        Some(q.clone())
    }
}

/// Converts a scalar into any other scalar type, when representable.
pub fn convert<S: Scalar, T: Scalar>(s: &S) -> Option<T> {
    T::from_big_rational(&s.to_big_rational())
}

/// Floating-point approximation, for display and sanity checks only.
pub fn approx_f64<S: Scalar>(s: &S) -> f64 {
    let q = s.to_big_rational();
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() && d != 0.0 => n / d,
        _ => q.to_f64().unwrap_or(f64::NAN),
    }
}
