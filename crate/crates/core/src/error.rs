use thiserror::Error;

/// Errors raised by the reconstruction library.
///
/// Algorithm-level "no answer" outcomes (an FTRR failure, an unconvincing
/// HRR expansion) are values, not errors; see the per-module result types.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("no residue-modulus pairs given")]
    EmptyInput,
    #[error("modulus {0} is smaller than 2")]
    InvalidModulus(String),
    #[error("moduli {first} and {second} are not coprime")]
    DuplicateOrNonCoprimeModuli { first: String, second: String },
    #[error("denominator is not invertible modulo the modulus at index {index}")]
    NonInvertibleDenominator { index: usize },
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("allowed bad pairs ({max_bad}) must be fewer than the number of pairs ({pairs})")]
    TooManyBadAllowed { max_bad: usize, pairs: usize },
    #[error("continued fraction has no partial quotient beyond a_0")]
    NoPositiveQuotients,
    #[error("lattice basis vectors are linearly dependent")]
    DependentInput,
    #[error("subset enumeration would visit {0} subsets, over budget")]
    SubsetBudgetExceeded(u128),
    #[error("candidate enumeration would visit {0} rationals, over budget")]
    EnumerationBudgetExceeded(u128),
    #[error("no confirmed reconstruction within {0} pairs")]
    PrimeStreamExhausted(usize),
    #[error("integer overflow in fixed-width arithmetic")]
    Overflow,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
