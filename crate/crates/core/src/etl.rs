//! Error tolerant lifting by two-dimensional lattice reduction.
//!
//! This is the comparison algorithm. The lattice `{(a, b) : a == b X mod M}`
//! is spanned by `(M, 0)` and `(X, 1)`; its shortest vector `(a, b)` gives
//! the candidate `a/b`. When the bad moduli multiply to `M_bad`, the vector
//! `(p M_bad, q M_bad)` lies in the lattice, so `a/b` still normalizes to
//! `p/q` once that vector is the shortest.
//!
//! Acceptance: `a^2 + b^2 < M / divisor` for the shortest vector. A divisor
//! of 1 is the original criterion, 100 the stricter one that suppresses
//! most false positives. Refinement A additionally rejects a candidate for
//! which half or more of the moduli are bad.


use crate::arith::{count_bad, rational, Instance, Rational};
use crate::error::{Error, Result};
use crate::int::{self, Int};

/// A lattice vector `(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeVec<T> {
    pub a: T,
    pub b: T,
}

impl<T: Int> LatticeVec<T> {
    pub fn new(a: T, b: T) -> Self {
        Self { a, b }
    }

    pub fn dot(&self, other: &Self) -> Result<T> {
        int::add(&int::mul(&self.a, &other.a)?, &int::mul(&self.b, &other.b)?)
    }

    pub fn norm2(&self) -> Result<T> {
        self.dot(self)
    }

    fn sub_mul(&self, k: &T, other: &Self) -> Result<Self> {
        Ok(Self { a: int::sub_mul(&self.a, k, &other.a)?, b: int::sub_mul(&self.b, k, &other.b)? })
    }

    /// Whether `a == b X (mod M)`.
    pub fn in_lattice(&self, x: &T, m: &T) -> Result<bool> {
        Ok(int::sub(&self.a, &int::mul(&self.b, x)?)?.mod_floor(m).is_zero())
    }
}

/// Nearest integer to `n / d` for `d > 0`, halves rounded up.
fn round_div<T: Int>(n: &T, d: &T) -> Result<T> {
    let two = T::one() + T::one();
    let num = int::add(&int::mul(&two, n)?, d)?;
    Ok(num.div_floor(&int::mul(&two, d)?))
}

/// Lagrange-Gauss reduction of the basis `u, v`. Returns `(v1, v2)` with
/// `v1` a shortest nonzero vector of the lattice and `v2` the shortest
/// vector completing it to a basis, so `|v1| <= |v2|`.
pub fn lagrange_reduce<T: Int>(u: LatticeVec<T>, v: LatticeVec<T>) -> Result<(LatticeVec<T>, LatticeVec<T>)> {
    let det = int::sub(&int::mul(&u.a, &v.b)?, &int::mul(&u.b, &v.a)?)?;
    if det.is_zero() {
        return Err(Error::DependentInput);
    }
    let (mut long, mut short) = if u.norm2()? < v.norm2()? { (v, u) } else { (u, v) };
    let mut short_norm = short.norm2()?;
    loop {
        let k = round_div(&long.dot(&short)?, &short_norm)?;
        let w = long.sub_mul(&k, &short)?;
        let w_norm = w.norm2()?;
        if w_norm >= short_norm {
            return Ok((short, w));
        }
        long = std::mem::replace(&mut short, w);
        short_norm = w_norm;
    }
}

/// Reduced basis of the lattice of `X mod M`.
///
/// Plain Euclid steps are taken on `(M, 0), (X, 1)` while the first
/// component still dominates; the remaining pair is an equivalent basis
/// that [`lagrange_reduce`] finishes in a few steps.
pub fn reduce_instance_lattice<T: Int>(x: &T, m: &T) -> Result<(LatticeVec<T>, LatticeVec<T>)> {
    let (mut r0, mut t0) = (m.clone(), T::zero());
    let (mut r1, mut t1) = (x.clone(), T::one());
    while r1 > t1.abs() {
        let q = r0.clone() / r1.clone();
        let r2 = int::sub_mul(&r0, &q, &r1)?;
        let t2 = int::sub_mul(&t0, &q, &t1)?;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    lagrange_reduce(LatticeVec::new(r0, t0), LatticeVec::new(r1, t1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EtlConfig {
    /// Reject candidates with at least half of the moduli bad.
    pub refinement_a: bool,
    /// Accept only when the shortest vector's squared norm is below
    /// `M / refinement_b_divisor`.
    pub refinement_b_divisor: u64,
}

impl Default for EtlConfig {
    fn default() -> Self {
        Self { refinement_a: true, refinement_b_divisor: 100 }
    }
}

impl EtlConfig {
    /// The criterion as originally published: no refinements.
    pub fn original() -> Self {
        Self { refinement_a: false, refinement_b_divisor: 1 }
    }

    pub fn new(refinement_a: bool, refinement_b_divisor: u64) -> Result<Self> {
        if refinement_b_divisor == 0 {
            return Err(Error::InvalidArgument("refinement B divisor must be at least 1".into()));
        }
        Ok(Self { refinement_a, refinement_b_divisor })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EtlResult<T: Int> {
    Value { value: Rational<T>, bad: Vec<usize> },
    Failure,
}

impl<T: Int> EtlResult<T> {
    pub fn value(&self) -> Option<Rational<T>> {
        match self {
            EtlResult::Value { value, .. } => Some(value.clone()),
            EtlResult::Failure => None,
        }
    }
}

pub fn etl<T: Int>(inst: &Instance<T>, cfg: &EtlConfig) -> Result<EtlResult<T>> {
    let (m, x) = (inst.modulus(), inst.residue());
    let shortest = if x.is_zero() {
        LatticeVec::new(T::zero(), T::one())
    } else {
        reduce_instance_lattice(x, m)?.0
    };
    if shortest.b.is_zero() {
        return Ok(EtlResult::Failure);
    }
    let divisor = int::from_u64::<T>(cfg.refinement_b_divisor)?;
    if int::mul(&shortest.norm2()?, &divisor)? >= *m {
        return Ok(EtlResult::Failure);
    }
    let value = rational(shortest.a, shortest.b)?;
    let bad = count_bad(&value, inst)?;
    if cfg.refinement_a && 2 * bad.len() >= inst.len() {
        return Ok(EtlResult::Failure);
    }
    Ok(EtlResult::Value { value, bad })
}
