//! Fault tolerant rational reconstruction with known bounds.
//!
//! Given `P`, `Q` and a cap `e` on bad pairs, and provided
//! `M > 2 P Q M_max^2` where `M_max` is the product of the `e` largest
//! moduli, [`ftrr`] returns the unique rational with `|p| <= P`, `q <= Q`
//! and at most `e` bad pairs, or reports that none exists.


use crate::arith::{count_bad, rational, Bounds, Instance, Rational};
use crate::error::{Error, Result};
use crate::euclid::CofactorLoop;
use crate::int::{self, Int};

/// By-products of a successful run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FtrrWitness<T> {
    /// Product of the `e` largest moduli.
    pub m_max: T,
    /// Absolute value of the final `u_2`, the denominator of `R/S`.
    pub s: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtrrFailure {
    /// `gcd(X, M) > P * M_max`; no nonzero answer can exist.
    GcdTooLarge,
    /// The candidate breaks a bound or has more than `e` bad pairs.
    InvalidCandidate,
}

impl std::fmt::Display for FtrrFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FtrrFailure::GcdTooLarge => f.write_str("gcd(X, M) exceeds P * M_max"),
            FtrrFailure::InvalidCandidate => f.write_str("no rational within the bounds has at most e bad pairs"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FtrrResult<T: Int> {
    Value { value: Rational<T>, bad: Vec<usize>, witness: FtrrWitness<T> },
    Zero,
    Failure(FtrrFailure),
}

impl<T: Int> FtrrResult<T> {
    /// The reconstructed value, with `Zero` mapped to `0/1`.
    pub fn value(&self) -> Option<Rational<T>> {
        match self {
            FtrrResult::Value { value, .. } => Some(value.clone()),
            FtrrResult::Zero => Some(Rational::from_integer(T::zero())),
            FtrrResult::Failure(_) => None,
        }
    }
}

fn check_max_bad<T: Int>(inst: &Instance<T>, b: &Bounds<T>) -> Result<()> {
    if b.max_bad >= inst.len() {
        return Err(Error::TooManyBadAllowed { max_bad: b.max_bad, pairs: inst.len() });
    }
    Ok(())
}

/// Whether `M > 2 P Q M_max^2`. When false, more pairs are needed.
pub fn ftrr_precondition<T: Int>(inst: &Instance<T>, b: &Bounds<T>) -> Result<bool> {
    check_max_bad(inst, b)?;
    let m_max = inst.largest_moduli_product(b.max_bad)?;
    let two = T::one() + T::one();
    let rhs = int::mul(&int::mul(&int::mul(&two, &b.num_bound)?, &b.den_bound)?, &int::mul(&m_max, &m_max)?)?;
    Ok(*inst.modulus() > rhs)
}

/// Runs FTRR. Errors when the precondition fails or `e >= s`.
pub fn ftrr<T: Int>(inst: &Instance<T>, b: &Bounds<T>) -> Result<FtrrResult<T>> {
    if !ftrr_precondition(inst, b)? {
        return Err(Error::PreconditionViolated(
            "M <= 2*P*Q*M_max^2; more residue-modulus pairs are needed".into(),
        ));
    }
    let s = inst.len();
    if inst.zero_residues() >= s - b.max_bad {
        return Ok(FtrrResult::Zero);
    }

    let (m, x) = (inst.modulus(), inst.residue());
    let m_max = inst.largest_moduli_product(b.max_bad)?;
    if x.gcd(m) > int::mul(&b.num_bound, &m_max)? {
        return Ok(FtrrResult::Failure(FtrrFailure::GcdTooLarge));
    }

    let cap = int::mul(&b.den_bound, &m_max)?;
    let mut lp = CofactorLoop::new(m, x);
    while lp.v.1.abs() <= cap {
        lp.step()?;
    }

    // r = X + M u1/u2
    let (u1, u2) = (&lp.u.0, &lp.u.1);
    let num = int::add(&int::mul(x, u2)?, &int::mul(m, u1)?)?;
    let r = rational(num, u2.clone())?;
    if !b.admits(&r) {
        return Ok(FtrrResult::Failure(FtrrFailure::InvalidCandidate));
    }
    let bad = count_bad(&r, inst)?;
    if bad.len() > b.max_bad {
        return Ok(FtrrResult::Failure(FtrrFailure::InvalidCandidate));
    }
    let witness = FtrrWitness { m_max, s: u2.abs() };
    Ok(FtrrResult::Value { value: r, bad, witness })
}

/// Indices of the moduli sharing a factor with `s`, the final `|u_2|` of a
/// successful run. These are exactly the bad pairs.
pub fn identify_bad_moduli<T: Int>(inst: &Instance<T>, s: &T) -> Vec<usize> {
    inst.pairs()
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.modulus().gcd(s).is_one())
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{residues_of, ResiduePair};
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::One;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn corrupted_13_over_37() -> Instance<BigInt> {
        let moduli: Vec<BigInt> = [101, 103, 105, 107, 109].iter().map(|&m| big(m)).collect();
        let mut pairs = residues_of(&Rational::new(big(13), big(37)), &moduli).unwrap();
        let wrong = (pairs[0].residue() + 17) % 101;
        pairs[0] = ResiduePair::new(wrong, big(101)).unwrap();
        Instance::new(pairs).unwrap()
    }

    #[test]
    fn precondition_worked_example() {
        let inst = corrupted_13_over_37();
        let b = Bounds::new(big(100), big(100), 1).unwrap();
        assert_eq!(inst.largest_moduli_product(1).unwrap(), big(109));
        assert!(big(12_739_669_845) > big(2 * 100 * 100 * 109 * 109));
        assert!(ftrr_precondition(&inst, &b).unwrap());
    }

    #[test]
    fn precondition_small_cases() {
        let inst = Instance::new(vec![ResiduePair::new(2i64, 5).unwrap()]).unwrap();
        assert!(ftrr_precondition(&inst, &Bounds::new(1, 1, 0).unwrap()).unwrap());
        let inst = Instance::new(vec![ResiduePair::new(1i64, 3).unwrap()]).unwrap();
        assert!(ftrr_precondition(&inst, &Bounds::new(1, 1, 0).unwrap()).unwrap());
        assert!(!ftrr_precondition(&inst, &Bounds::new(2, 1, 0).unwrap()).unwrap());
        assert_eq!(
            ftrr_precondition(&inst, &Bounds::new(1, 1, 1).unwrap()),
            Err(Error::TooManyBadAllowed { max_bad: 1, pairs: 1 })
        );
    }

    #[test]
    fn no_valid_answer_for_2_mod_5() {
        let inst = Instance::new(vec![ResiduePair::new(2i64, 5).unwrap()]).unwrap();
        let res = ftrr(&inst, &Bounds::new(1, 1, 0).unwrap()).unwrap();
        assert!(matches!(res, FtrrResult::Failure(_)));
    }

    #[test]
    fn recovers_13_over_37_with_one_bad_modulus() {
        let inst = corrupted_13_over_37();
        let res = ftrr(&inst, &Bounds::new(big(100), big(100), 1).unwrap()).unwrap();
        let FtrrResult::Value { value, bad, witness } = res else { panic!("expected a value, got {res:?}") };
        assert_eq!(value, Rational::new(big(13), big(37)));
        assert_eq!(bad, vec![0]);
        assert_eq!(witness.m_max, big(109));
        assert!(witness.s <= big(100 * 109));
        assert_eq!(identify_bad_moduli(&inst, &witness.s), vec![0]);
        assert!(!(big(101).gcd(&witness.s)).is_one());
    }

    #[test]
    fn exact_images_have_no_bad_moduli() {
        let moduli: Vec<BigInt> = [101, 103, 105, 107, 109].iter().map(|&m| big(m)).collect();
        let inst = Instance::new(residues_of(&Rational::new(big(-13), big(37)), &moduli).unwrap()).unwrap();
        let res = ftrr(&inst, &Bounds::new(big(100), big(100), 1).unwrap()).unwrap();
        let FtrrResult::Value { value, bad, witness } = res else { panic!() };
        assert_eq!(value, Rational::new(big(-13), big(37)));
        assert!(bad.is_empty());
        assert!(identify_bad_moduli(&inst, &witness.s).is_empty());
    }

    #[test]
    fn mostly_zero_residues_give_zero() {
        let pairs = [(0, 7), (0, 11), (5, 13), (0, 17)].map(|(x, m)| ResiduePair::new(x as i64, m).unwrap());
        let inst = Instance::new(pairs).unwrap();
        let res = ftrr(&inst, &Bounds::new(1, 1, 1).unwrap()).unwrap();
        assert_eq!(res, FtrrResult::Zero);
        assert_eq!(res.value(), Some(Rational::from_integer(0)));
    }

    #[test]
    fn precondition_failure_is_an_error() {
        let inst = Instance::new(vec![ResiduePair::new(2i64, 5).unwrap()]).unwrap();
        assert!(matches!(ftrr(&inst, &Bounds::new(3, 1, 0).unwrap()), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn two_bad_out_of_seven() {
        let primes = [101i64, 103, 107, 109, 113, 127, 131];
        let target = Rational::new(-5i128, 7);
        let moduli: Vec<i128> = primes.iter().map(|&p| p as i128).collect();
        let mut pairs = residues_of(&target, &moduli).unwrap();
        for i in [1usize, 4] {
            let x = (pairs[i].residue() + 3) % moduli[i];
            pairs[i] = ResiduePair::new(x, moduli[i]).unwrap();
        }
        let inst = Instance::new(pairs).unwrap();
        let b = Bounds::new(10i128, 10, 2).unwrap();
        let FtrrResult::Value { value, bad, witness } = ftrr(&inst, &b).unwrap() else { panic!() };
        assert_eq!(value, target);
        // brute-force residue check
        let brute: Vec<usize> = (0..7)
            .filter(|&i| (7 * inst.pairs()[i].residue() + 5).rem_euclid(moduli[i]) != 0)
            .collect();
        assert_eq!(bad, vec![1, 4]);
        assert_eq!(bad, brute);
        assert_eq!(identify_bad_moduli(&inst, &witness.s), bad);
    }
}
