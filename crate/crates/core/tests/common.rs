// Shared helpers for the integration tests. Each test target includes this
// file with `mod common;`.
#![allow(dead_code)]

use ratrecon::arith::{residues_of, Instance, Rational, ResiduePair};
use ratrecon::Int;
use ratrecon::primes::is_prime;

pub const SMALL_PRIMES: [i128; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

pub fn primes_between(lo: u64, hi: u64) -> Vec<i128> {
    (lo..hi).filter(|&n| is_prime(n)).map(|n| n as i128).collect()
}

/// Images of `r` modulo `moduli` with the pairs at `corrupt` shifted by a
/// nonzero offset (so they are certainly wrong).
pub fn corrupted_instance<T: Int>(r: &Rational<T>, moduli: &[T], corrupt: &[(usize, i128)]) -> Instance<T> {
    let mut pairs = residues_of(r, moduli).expect("denominator invertible");
    for &(i, offset) in corrupt {
        let m = moduli[i].clone();
        let m_small = m.to_i128().expect("small modulus");
        let shift = T::from_i128(1 + offset.rem_euclid(m_small - 1)).unwrap();
        pairs[i] = ResiduePair::new(pairs[i].residue().clone() + shift, m).unwrap();
    }
    Instance::new(pairs).unwrap()
}
