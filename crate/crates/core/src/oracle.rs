//! Brute-force reconstructions used to cross-check the fast algorithms on
//! small instances.

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::arith::{count_bad, Bounds, Instance, Rational};
use crate::contfrac::reconstruct_single;
use crate::error::{Error, Result};
use crate::int::{self, Int};

pub const SUBSET_BUDGET: u128 = 1_000_000;
pub const ENUMERATION_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleResult<T: Int> {
    Value(Rational<T>),
    /// Several distinct rationals qualify, in increasing order.
    Ambiguous(Vec<Rational<T>>),
    Failure,
}

impl<T: Int> OracleResult<T> {
    fn classify(mut found: Vec<Rational<T>>) -> Self {
        found.sort();
        found.dedup();
        match found.len() {
            0 => OracleResult::Failure,
            1 => OracleResult::Value(found.pop().unwrap()),
            _ => OracleResult::Ambiguous(found),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VoteEntry {
    /// Subsets whose exact reconstruction produced the candidate.
    pub votes: usize,
    /// Pairs of the whole instance the candidate is consistent with.
    pub consistent_pairs: usize,
}

/// Candidates produced by subset reconstructions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoteTally<T: Int> {
    pub candidates: BTreeMap<Rational<T>, VoteEntry>,
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// Exact (fault-free) reconstruction on every subset of `s - e` pairs.
pub fn vote_tally<T: Int>(inst: &Instance<T>, b: &Bounds<T>) -> Result<VoteTally<T>> {
    let s = inst.len();
    if b.max_bad >= s {
        return Err(Error::TooManyBadAllowed { max_bad: b.max_bad, pairs: s });
    }
    let subsets = binomial(s, b.max_bad);
    if subsets > SUBSET_BUDGET {
        return Err(Error::SubsetBudgetExceeded(subsets));
    }
    let mut tally = VoteTally { candidates: BTreeMap::new() };
    for subset in inst.pairs().iter().cloned().combinations(s - b.max_bad) {
        let sub = Instance::new(subset)?;
        let found = match reconstruct_single(sub.residue(), sub.modulus(), &b.num_bound, &b.den_bound, &T::one()) {
            Ok(found) => found,
            // the subset modulus is too small to pin down anything
            Err(Error::PreconditionViolated(_)) => continue,
            Err(e) => return Err(e),
        };
        let Some(sol) = found else { continue };
        if let Some(entry) = tally.candidates.get_mut(&sol.value) {
            entry.votes += 1;
            continue;
        }
        let consistent_pairs = s - count_bad(&sol.value, inst)?.len();
        tally.candidates.insert(sol.value, VoteEntry { votes: 1, consistent_pairs });
    }
    Ok(tally)
}

/// Voting reconstruction: a candidate qualifies when it is consistent with
/// at least `s - e` pairs.
pub fn vote_reconstruct<T: Int>(inst: &Instance<T>, b: &Bounds<T>) -> Result<OracleResult<T>> {
    let quorum = inst.len() - b.max_bad.min(inst.len());
    let tally = vote_tally(inst, b)?;
    let found = tally
        .candidates
        .into_iter()
        .filter(|(_, e)| e.consistent_pairs >= quorum)
        .map(|(r, _)| r)
        .collect();
    Ok(OracleResult::classify(found))
}

/// Every normalized `p/q` with `|p| <= P`, `1 <= q <= Q` and at most `e`
/// bad pairs.
pub fn exhaustive_candidates<T: Int>(inst: &Instance<T>, b: &Bounds<T>) -> Result<Vec<Rational<T>>> {
    let p_max = b.num_bound.to_u128().ok_or(Error::EnumerationBudgetExceeded(u128::MAX))?;
    let q_max = b.den_bound.to_u128().ok_or(Error::EnumerationBudgetExceeded(u128::MAX))?;
    let work = p_max.saturating_mul(q_max);
    if work > ENUMERATION_BUDGET {
        return Err(Error::EnumerationBudgetExceeded(work));
    }
    let mut found = Vec::new();
    let mut q = T::one();
    while q <= b.den_bound {
        let mut p = -b.num_bound.clone();
        while p <= b.num_bound {
            if p.gcd(&q).is_one() || (p.is_zero() && q.is_one()) {
                let r = Rational::new_raw(p.clone(), q.clone());
                if within_bad_cap(&r, inst, b.max_bad)? {
                    found.push(r);
                }
            }
            p = int::add(&p, &T::one())?;
        }
        q = int::add(&q, &T::one())?;
    }
    Ok(found)
}

fn within_bad_cap<T: Int>(r: &Rational<T>, inst: &Instance<T>, cap: usize) -> Result<bool> {
    let mut bad = 0;
    for pair in inst.pairs() {
        if !pair.is_good_for(r)? {
            bad += 1;
            if bad > cap {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn exhaustive_reconstruct<T: Int>(inst: &Instance<T>, b: &Bounds<T>) -> Result<OracleResult<T>> {
    Ok(OracleResult::classify(exhaustive_candidates(inst, b)?))
}
