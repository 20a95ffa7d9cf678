//! Continued fractions of exact rationals and single-pair reconstruction.
//!
//! The `k`-th approximant `r_k/s_k` is the value of `[a_0; a_1, ..., a_k]`;
//! indexing starts at 0, so approximant 0 is `a_0/1`. Quotients follow the
//! floor convention: `a_0` may be zero or negative, every later quotient is
//! positive.

use num_rational::Ratio;

use crate::arith::{rational, Rational};
use crate::error::{Error, Result};
use crate::int::{self, Int};

/// Streams `(a_k, r_k, s_k)` for `num/den` by the recurrence
/// `r_k = a_k r_{k-1} + r_{k-2}`, `s_k = a_k s_{k-1} + s_{k-2}`.
#[derive(Debug, Clone)]
pub struct Convergents<T> {
    num: T,
    den: T,
    r: (T, T),
    s: (T, T),
    failed: bool,
}

impl<T: Int> Convergents<T> {
    pub fn new(num: T, den: T) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num, den) };
        Ok(Self {
            num,
            den,
            // (r_{k-1}, r_{k-2}) and (s_{k-1}, s_{k-2}) seeded with k = 0
            r: (T::one(), T::zero()),
            s: (T::zero(), T::one()),
            failed: false,
        })
    }
}

impl<T: Int> Iterator for Convergents<T> {
    type Item = Result<(T, T, T)>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.den.is_zero() || self.failed {
            return None;
        }
        let (a, rem) = self.num.div_mod_floor(&self.den);
        let step = (|| {
            let r = int::add(&int::mul(&a, &self.r.0)?, &self.r.1)?;
            let s = int::add(&int::mul(&a, &self.s.0)?, &self.s.1)?;
            Ok((r, s))
        })();
        match step {
            Ok((r, s)) => {
                self.num = std::mem::replace(&mut self.den, rem);
                self.r.1 = std::mem::replace(&mut self.r.0, r.clone());
                self.s.1 = std::mem::replace(&mut self.s.0, s.clone());
                Some(Ok((a, r, s)))
            }
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}

/// Partial quotients of `num/den` only, without the approximants.
pub fn partial_quotients<T: Int>(num: &T, den: &T) -> Result<Vec<T>> {
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    let (mut n, mut d) = if den.is_negative() {
        (-num.clone(), -den.clone())
    } else {
        (num.clone(), den.clone())
    };
    let mut out = Vec::new();
    while !d.is_zero() {
        let (a, rem) = n.div_mod_floor(&d);
        out.push(a);
        n = std::mem::replace(&mut d, rem);
    }
    Ok(out)
}

/// Full continued fraction expansion of a rational with its approximants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfExpansion<T: Int> {
    quotients: Vec<T>,
    approximants: Vec<Rational<T>>,
}

/// Expands `num/den` eagerly.
pub fn expand<T: Int>(num: &T, den: &T) -> Result<CfExpansion<T>> {
    let mut quotients = Vec::new();
    let mut approximants = Vec::new();
    for item in Convergents::new(num.clone(), den.clone())? {
        let (a, r, s) = item?;
        quotients.push(a);
        // consecutive approximants are coprime with positive denominators
        approximants.push(Ratio::new_raw(r, s));
    }
    Ok(CfExpansion { quotients, approximants })
}

impl<T: Int> CfExpansion<T> {
    pub fn partial_quotients(&self) -> &[T] {
        &self.quotients
    }

    pub fn approximants(&self) -> &[Rational<T>] {
        &self.approximants
    }

    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    /// The expanded rational (the last approximant).
    pub fn value(&self) -> &Rational<T> {
        self.approximants.last().expect("an expansion has at least a_0")
    }

    /// Evaluates `[a_0; a_1, ..., a_n]` back to front, independently of the
    /// stored approximants.
    pub fn evaluate(&self) -> Result<Rational<T>> {
        let mut iter = self.quotients.iter().rev();
        let last = iter.next().ok_or(Error::NoPositiveQuotients)?;
        let (mut num, mut den) = (last.clone(), T::one());
        for a in iter {
            // a + den/num
            let next_num = int::add(&int::mul(a, &num)?, &den)?;
            den = num;
            num = next_num;
        }
        rational(num, den)
    }
}

/// The approximant of greatest index whose denominator is at most
/// `den_cap`, with that index.
pub fn last_approximant_below<T: Int>(cf: &CfExpansion<T>, den_cap: &T) -> (Rational<T>, usize) {
    let idx = cf
        .approximants
        .iter()
        .rposition(|r| r.denom() <= den_cap)
        .unwrap_or(0);
    (cf.approximants[idx].clone(), idx)
}

/// A rational recovered from one combined pair `X mod M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SinglePairSolution<T: Int> {
    pub value: Rational<T>,
    pub approximant_index: usize,
    /// `R/S`, the last approximant of `X/M` with `S <= Q * Mbad_cap`.
    pub last_small_approximant: Rational<T>,
}

/// Recovers the unique `p/q` with `|p| <= P`, `q <= Q` and
/// `p == qX (mod M_good)` for any factorization `M = M_good * M_bad` with
/// `M_bad <= mbad_cap`. Returns `Ok(None)` when the candidate breaks the
/// bounds.
pub fn reconstruct_single<T: Int>(
    x: &T,
    m: &T,
    num_bound: &T,
    den_bound: &T,
    mbad_cap: &T,
) -> Result<Option<SinglePairSolution<T>>> {
    let two = T::one() + T::one();
    if *m < two {
        return Err(Error::InvalidModulus(m.to_string()));
    }
    if !num_bound.is_positive() || !den_bound.is_positive() || !mbad_cap.is_positive() {
        return Err(Error::InvalidArgument("bounds must be positive".into()));
    }
    let lhs = int::mul(&int::mul(&int::mul(&two, num_bound)?, den_bound)?, &int::mul(mbad_cap, mbad_cap)?)?;
    if lhs >= *m {
        return Err(Error::PreconditionViolated(format!("2*P*Q*Mbad^2 = {lhs} is not below M = {m}")));
    }
    let cap = int::mul(den_bound, mbad_cap)?;

    let mut last: Option<(T, T, usize)> = None;
    for (k, item) in Convergents::new(x.clone(), m.clone())?.enumerate() {
        let (_, r, s) = item?;
        if s > cap {
            break;
        }
        last = Some((r, s, k));
    }
    let (r, s, k) = last.expect("s_0 = 1 never exceeds the cap");
    // p/q = X - M*R/S = (X*S - M*R) / S
    let num = int::sub(&int::mul(x, &s)?, &int::mul(m, &r)?)?;
    let value = rational(num, s.clone())?;
    if value.numer().abs() > *num_bound || *value.denom() > *den_bound {
        return Ok(None);
    }
    Ok(Some(SinglePairSolution {
        value,
        approximant_index: k,
        last_small_approximant: Ratio::new_raw(r, s),
    }))
}

/// The largest of `a_1, a_2, ...` and its index; the smallest index wins a
/// tie.
pub fn largest_partial_quotient<T: Int>(cf: &CfExpansion<T>) -> Result<(T, usize)> {
    largest_in(&cf.quotients)
}

pub(crate) fn largest_in<T: Int>(quotients: &[T]) -> Result<(T, usize)> {
    let mut best: Option<(usize, &T)> = None;
    for (i, a) in quotients.iter().enumerate().skip(1) {
        if best.is_none_or(|(_, b)| a > b) {
            best = Some((i, a));
        }
    }
    best.map(|(i, a)| (a.clone(), i)).ok_or(Error::NoPositiveQuotients)
}

/// `Q_max`: the greatest integer strictly below
/// `M*_good / (2 |p| M*_bad)` where `M*_good = gcd(p - qX, M)` and
/// `M*_bad = M / M*_good`. The partial quotient following the approximant
/// used by [`reconstruct_single`] is at least `Q_max / q - 1`.
///
/// Needs the true `p/q`, so it is a checking aid rather than part of any
/// reconstruction. `None` for `p = 0`.
pub fn quotient_lower_bound<T: Int>(value: &Rational<T>, x: &T, m: &T) -> Result<Option<T>> {
    let p = value.numer();
    if p.is_zero() {
        return Ok(None);
    }
    let good = int::sub(p, &int::mul(value.denom(), x)?)?.gcd(m);
    let bad = m.clone() / good.clone();
    let two = T::one() + T::one();
    let divisor = int::mul(&int::mul(&two, &p.abs())?, &bad)?;
    // greatest integer strictly less than good / divisor
    let q_max = (good - T::one()).div_floor(&divisor);
    Ok(Some(q_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    const X: i64 = 7_213_578_109;
    const M: i64 = 101 * 103 * 105 * 107 * 109;

    fn ints(v: &[i64]) -> Vec<i64> {
        v.to_vec()
    }

    #[test]
    fn expand_355_113() {
        let cf = expand(&355i64, &113).unwrap();
        assert_eq!(cf.partial_quotients(), ints(&[3, 7, 16]).as_slice());
        let approx: Vec<(i64, i64)> = cf.approximants().iter().map(|r| (*r.numer(), *r.denom())).collect();
        assert_eq!(approx, vec![(3, 1), (22, 7), (355, 113)]);
        assert_eq!(largest_partial_quotient(&cf).unwrap(), (16, 2));
    }

    #[test]
    fn expand_integer_and_negative() {
        let cf = expand(&5i64, &1).unwrap();
        assert_eq!(cf.partial_quotients(), &[5]);
        assert_eq!(*cf.value(), Ratio::new(5, 1));
        assert_eq!(largest_partial_quotient(&cf), Err(Error::NoPositiveQuotients));

        let cf = expand(&-2i64, &7).unwrap();
        assert_eq!(cf.partial_quotients(), &[-1, 1, 2, 2]);
        assert_eq!(*cf.value(), Ratio::new(-2, 7));
        assert_eq!(expand(&1i64, &0), Err(Error::ZeroDenominator));
    }

    #[test]
    fn expand_half() {
        let cf = expand(&1i64, &2).unwrap();
        assert_eq!(cf.partial_quotients(), &[0, 2]);
        assert_eq!(largest_partial_quotient(&cf).unwrap(), (2, 1));
    }

    #[test]
    fn worked_example_expansion() {
        let cf = expand(&X, &M).unwrap();
        assert_eq!(cf.approximants()[10], Ratio::new(2116, 3737));
        assert_eq!(cf.partial_quotients()[11], 2596);
        assert_eq!(*cf.approximants()[11].denom(), 9_701_939);
        assert_eq!(largest_partial_quotient(&cf).unwrap(), (2596, 11));
        assert_eq!(last_approximant_below(&cf, &10_100), (Ratio::new(2116, 3737), 10));
    }

    #[test]
    fn last_approximant_small_cases() {
        let cf = expand(&5i64, &1).unwrap();
        assert_eq!(last_approximant_below(&cf, &1), (Ratio::new(5, 1), 0));
        let cf = expand(&355i64, &113).unwrap();
        assert_eq!(last_approximant_below(&cf, &50), (Ratio::new(22, 7), 1));
    }

    #[test]
    fn reconstruct_worked_example() {
        let sol = reconstruct_single(&X, &M, &100, &100, &101).unwrap().unwrap();
        assert_eq!(sol.value, Ratio::new(13, 37));
        assert_eq!(sol.last_small_approximant, Ratio::new(2116, 3737));
        assert_eq!(sol.approximant_index, 10);
        // value = X - M * R/S exactly
        let r = &sol.last_small_approximant;
        assert_eq!(Ratio::from_integer(X as i128) - Ratio::new(M as i128 * *r.numer() as i128, *r.denom() as i128),
            Ratio::new(13i128, 37));
    }

    #[test]
    fn reconstruct_edge_cases() {
        let sol = reconstruct_single(&0i64, &7, &1, &1, &1).unwrap().unwrap();
        assert_eq!(sol.value, Ratio::new(0, 1));
        assert_eq!(reconstruct_single(&2i64, &5, &1, &1, &1).unwrap(), None);
        assert!(matches!(
            reconstruct_single(&2i64, &5, &1, &1, &2),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn corollary_bound_on_worked_example() {
        let r = Ratio::new(13i64, 37);
        let q_max = quotient_lower_bound(&r, &X, &M).unwrap().unwrap();
        // 2596 >= q_max / 37 - 1
        assert!((2596 + 1) * 37 >= q_max);
    }

    #[test]
    fn evaluate_round_trip() {
        let cf = expand(&-1234i64, &567).unwrap();
        assert_eq!(cf.evaluate().unwrap(), Ratio::new(-1234, 567));
    }
}
