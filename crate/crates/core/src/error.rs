use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid discriminant {0}: must be negative and congruent to 0 or 1 mod 4")]
    InvalidDiscriminant(BigInt),

    #[error("discriminant mismatch: {left} vs {right}")]
    DiscriminantMismatch { left: BigInt, right: BigInt },

    #[error("form {form} has discriminant {actual}, expected {expected}")]
    FormDiscriminant {
        form: String,
        actual: BigInt,
        expected: BigInt,
    },

    #[error("form ({a},{b},{c}) is not primitive")]
    NotPrimitive { a: BigInt, b: BigInt, c: BigInt },

    #[error("form ({a},{b},{c}) is not positive definite")]
    NotPositiveDefinite { a: BigInt, b: BigInt, c: BigInt },

    #[error("parity violated: ({p} + {q}*sqrt({d}))/2 is not an element of the order")]
    Parity { p: BigInt, q: BigInt, d: BigInt },

    #[error("invalid ideal [{a}, (-{b}+sqrt({d}))/2]: {reason}")]
    InvalidIdeal {
        a: BigInt,
        b: BigInt,
        d: BigInt,
        reason: &'static str,
    },

    #[error("generator tuple must have at least one coefficient")]
    EmptyTuple,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("not a submodule: target is not contained in the source module")]
    NotSubmodule,

    #[error(
        "pair is not concordant: gcd(a, a', (b+b')/2) = {0}; compose through the repaired route"
    )]
    NonConcordant(BigInt),

    #[error("discriminant {0} is too large to enumerate")]
    TooLarge(BigInt),

    #[error("parse error: {0}")]
    Parse(String),
}

pub(crate) fn check_same_d(left: &BigInt, right: &BigInt) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DiscriminantMismatch {
            left: left.clone(),
            right: right.clone(),
        })
    }
}
