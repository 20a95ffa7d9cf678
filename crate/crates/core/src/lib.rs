//! Rational number reconstruction from residue-modulus pairs, some of
//! which may be wrong.
//!
//! * [`ftrr`](ftrr::ftrr): guaranteed reconstruction given bounds on the
//!   numerator, the denominator and the number of bad pairs.
//! * [`hrr`](hrr::hrr): heuristic reconstruction from the pairs alone. This
//!   is the recommended entry point when no bounds are known.
//! * [`etl`](etl::etl): lattice-based reconstruction, kept for comparison.
//! * [`oracle`]: brute-force voting and enumeration for small instances.
//!
//! All algorithms are generic over the integer type ([`Int`]). Use
//! [`BigInt`] in production; `i128` is handy for small, fast tests and
//! reports [`Error::Overflow`] instead of wrapping.

pub mod arith;
pub mod cli;
pub mod contfrac;
pub mod error;
pub mod etl;
pub mod euclid;
pub mod ftrr;
pub mod harness;
pub mod hrr;
pub mod int;
pub mod oracle;
pub mod primes;

pub use num_bigint::BigInt;

pub use arith::{count_bad, rational, residues_of, Bounds, Instance, Rational, ResiduePair};
pub use error::{Error, Result};
pub use int::Int;

pub type BigRational = Rational<BigInt>;
pub type BigResiduePair = ResiduePair<BigInt>;
pub type BigInstance = Instance<BigInt>;
pub type BigBounds = Bounds<BigInt>;

pub type SmallRational = Rational<i128>;
pub type SmallResiduePair = ResiduePair<i128>;
pub type SmallInstance = Instance<i128>;
pub type SmallBounds = Bounds<i128>;
