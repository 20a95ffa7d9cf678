//! The integer abstraction every algorithm in this crate is written against.
//!
//! Arbitrary precision ([`num_bigint::BigInt`]) is the production choice.
//! Fixed-width types (`i64`, `i128`) also satisfy [`Int`]; every product or
//! sum that can grow goes through the checked helpers below, so a
//! fixed-width run either produces the same answer as the big-integer run
//! or fails with [`Error::Overflow`].

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};

use crate::error::{Error, Result};

/// Signed integer usable as the scalar of residues, moduli and rationals.
pub trait Int:
    Integer
    + Signed
    + Clone
    + Hash
    + Debug
    + Display
    + FromPrimitive
    + ToPrimitive
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + Send
    + Sync
    + 'static
{
}

impl<T> Int for T where
    T: Integer
        + Signed
        + Clone
        + Hash
        + Debug
        + Display
        + FromPrimitive
        + ToPrimitive
        + CheckedAdd
        + CheckedSub
        + CheckedMul
        + Send
        + Sync
        + 'static
{
}

#[inline]
pub(crate) fn add<T: Int>(a: &T, b: &T) -> Result<T> {
    a.checked_add(b).ok_or(Error::Overflow)
}

#[inline]
pub(crate) fn sub<T: Int>(a: &T, b: &T) -> Result<T> {
    a.checked_sub(b).ok_or(Error::Overflow)
}

#[inline]
pub(crate) fn mul<T: Int>(a: &T, b: &T) -> Result<T> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

/// `a - q * b`, the update shared by every Euclid-style loop here.
#[inline]
pub(crate) fn sub_mul<T: Int>(a: &T, q: &T, b: &T) -> Result<T> {
    sub(a, &mul(q, b)?)
}

pub(crate) fn from_u64<T: Int>(n: u64) -> Result<T> {
    T::from_u64(n).ok_or(Error::Overflow)
}


/// Inverse of `a` modulo `m` in `[0, m)`, or `None` when `gcd(a, m) > 1`.
pub fn inv_mod<T: Int>(a: &T, m: &T) -> Option<T> {
    let a = a.mod_floor(m);
    let eg = a.extended_gcd(m);
    if !eg.gcd.is_one() {
        return None;
    }
    Some(eg.x.mod_floor(m))
}

/// Floor of the square root, by Newton iteration.
pub fn isqrt<T: Int>(n: &T) -> T {
    assert!(!n.is_negative(), "isqrt of a negative number");
    if n.is_zero() || n.is_one() {
        return n.clone();
    }
    let two = T::one() + T::one();
    let mut x = n.clone();
    let mut y = (x.clone() + T::one()) / two.clone();
    while y < x {
        x = y;
        y = (x.clone() + n.clone() / x.clone()) / two.clone();
    }
    x
}
