//! Exact unsigned integer scalars.
//!
//! Type values `y * 2^y * x^y` outgrow 64 bits almost immediately, so every
//! computation that feeds an oracle runs on [`num_bigint::BigUint`]. The
//! simulators may instead run on a fixed-width type; all arithmetic here is
//! checked, and an unrepresentable value surfaces as `None` rather than a
//! wrapped result.

use std::fmt;

use num_traits::{checked_pow, CheckedAdd, CheckedMul, FromPrimitive, ToPrimitive, Unsigned};

/// An exact unsigned integer usable as a path-type value.
///
/// Implemented for `u64`, `u128` and `BigUint`.
pub trait ExactScalar:
    Clone
    + Ord
    + fmt::Debug
    + fmt::Display
    + Unsigned
    + CheckedAdd
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
{
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("every exact scalar holds a u64")
    }
}

impl<T> ExactScalar for T where
    T: Clone
        + Ord
        + fmt::Debug
        + fmt::Display
        + Unsigned
        + CheckedAdd
        + CheckedMul
        + FromPrimitive
        + ToPrimitive
{
}

/// `base^exp`, or `None` on overflow.
pub fn pow_checked<T: ExactScalar>(base: u64, exp: u64) -> Option<T> {
    let exp = usize::try_from(exp).ok()?;
    checked_pow(T::from_count(base), exp)
}

/// `y * 2^y * x^y`, or `None` when it does not fit in `T`.
pub fn value_checked<T: ExactScalar>(x: u64, y: u64) -> Option<T> {
    let twos: T = pow_checked(2, y)?;
    let powers: T = pow_checked(x, y)?;
    T::from_count(y).checked_mul(&twos)?.checked_mul(&powers)
}

/// Convert between exact scalars; `None` if the target is too narrow.
pub fn convert<S: ExactScalar, T: ExactScalar>(v: &S) -> Option<T> {
    match v.to_u128() {
        Some(small) => T::from_u128(small),
        None => T::from_str_radix(&v.to_string(), 10).ok(),
    }
}
