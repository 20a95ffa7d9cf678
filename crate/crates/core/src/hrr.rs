//! Heuristic rational reconstruction: no bounds needed.
//!
//! The answer is read off the approximant just before the largest partial
//! quotient of `X/M`, and only accepted when that quotient is convincingly
//! large. Failure is an ordinary outcome; callers add pairs and retry.


use crate::arith::{rational, Instance, Rational};
use crate::contfrac::partial_quotients;
use crate::error::{Error, Result};
use crate::int::{self, Int};

pub const DEFAULT_A_CRIT: u64 = 1_000_000;
pub const DEFAULT_RATIO_THRESHOLD: u64 = 4096;

/// How a largest partial quotient is judged convincing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// `A_max >= A_crit`.
    AbsoluteThreshold,
    /// `A_max / A_next >= threshold`.
    RatioThreshold(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HrrConfig {
    pub a_crit: u64,
    pub criterion: Criterion,
}

impl Default for HrrConfig {
    fn default() -> Self {
        Self { a_crit: DEFAULT_A_CRIT, criterion: Criterion::AbsoluteThreshold }
    }
}

impl HrrConfig {
    pub fn new(a_crit: u64, criterion: Criterion) -> Result<Self> {
        if a_crit < 2 {
            return Err(Error::InvalidArgument("A_crit must be at least 2".into()));
        }
        if let Criterion::RatioThreshold(t) = criterion {
            if t < 2 {
                return Err(Error::InvalidArgument("ratio threshold must be at least 2".into()));
            }
        }
        Ok(Self { a_crit, criterion })
    }

    pub fn ratio(threshold: u64) -> Result<Self> {
        Self::new(DEFAULT_A_CRIT, Criterion::RatioThreshold(threshold))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HrrResult<T: Int> {
    /// `m_bad = gcd(M, u_2)`, the product of the moduli judged bad.
    Value { value: Rational<T>, m_bad: T },
    Zero,
    Failure,
}

impl<T: Int> HrrResult<T> {
    pub fn value(&self) -> Option<Rational<T>> {
        match self {
            HrrResult::Value { value, .. } => Some(value.clone()),
            HrrResult::Zero => Some(Rational::from_integer(T::zero())),
            HrrResult::Failure => None,
        }
    }

    /// Sorted-order indices of the moduli dividing into `m_bad`.
    pub fn bad_indices(&self, inst: &Instance<T>) -> Vec<usize> {
        match self {
            HrrResult::Value { m_bad, .. } => inst
                .pairs()
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.modulus().gcd(m_bad).is_one())
                .map(|(i, _)| i)
                .collect(),
            _ => Vec::new(),
        }
    }
}

/// Largest and second-largest of the quotients past `a_0`. With a single
/// such quotient the runner-up is taken to be 1.
pub fn a_max_scan<T: Int>(quotients: &[T]) -> Result<(T, T)> {
    let mut tail = quotients.iter().skip(1);
    let first = tail.next().ok_or(Error::NoPositiveQuotients)?;
    let (mut max, mut next) = (first, None::<&T>);
    for a in tail {
        if a > max {
            next = Some(max);
            max = a;
        } else if next.is_none_or(|n| a > n) {
            next = Some(a);
        }
    }
    Ok((max.clone(), next.cloned().unwrap_or_else(T::one)))
}

/// Whether `a_max` (with runner-up `a_next`) passes the configured test.
pub fn is_convincing<T: Int>(cfg: &HrrConfig, a_max: &T, a_next: &T) -> Result<bool> {
    Ok(match cfg.criterion {
        Criterion::AbsoluteThreshold => *a_max >= int::from_u64(cfg.a_crit)?,
        Criterion::RatioThreshold(t) => *a_max >= int::mul(a_next, &int::from_u64(t)?)?,
    })
}

pub fn hrr<T: Int>(inst: &Instance<T>, cfg: &HrrConfig) -> Result<HrrResult<T>> {
    let (m, x) = (inst.modulus(), inst.residue());
    if x.is_zero() {
        return Ok(HrrResult::Zero);
    }
    let g = x.gcd(m);
    if int::mul(&g, &g)? > int::mul(&int::from_u64(cfg.a_crit)?, m)? {
        return Ok(HrrResult::Zero);
    }

    let quotients = partial_quotients(x, m)?;
    let (a_max, a_next) = a_max_scan(&quotients)?;
    if !is_convincing(cfg, &a_max, &a_next)? {
        return Ok(HrrResult::Failure);
    }

    // The cofactor loop stops right after yielding the first `a_max`, leaving
    // `-u1/u2` equal to the approximant just before it. That approximant is
    // rebuilt from the stored quotients, which avoids a second division pass.
    let k = quotients.iter().skip(1).position(|a| *a == a_max).expect("a_max occurs") + 1;
    let (mut r, mut r_prev) = (T::one(), T::zero());
    let (mut s, mut s_prev) = (T::zero(), T::one());
    for a in &quotients[..k] {
        let r_next = int::add(&int::mul(a, &r)?, &r_prev)?;
        let s_next = int::add(&int::mul(a, &s)?, &s_prev)?;
        r_prev = std::mem::replace(&mut r, r_next);
        s_prev = std::mem::replace(&mut s, s_next);
    }
    let num = int::sub(&int::mul(x, &s)?, &int::mul(m, &r)?)?;
    let m_bad = m.gcd(&s);
    let value = rational(num, s)?;
    Ok(HrrResult::Value { value, m_bad })
}
