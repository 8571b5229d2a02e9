use alloc::string::String;

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("valuation of zero is infinite")]
    ZeroValuation,
    #[error("{0} is not a prime")]
    NotPrime(BigInt),
    #[error("cannot factor zero")]
    FactorZero,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PellError {
    #[error("radicand {0} is a perfect square")]
    SquareRadicand(BigInt),
    #[error("radicand {0} must be at least 2")]
    RadicandTooSmall(BigInt),
    #[error("right-hand side must be nonzero")]
    ZeroRhs,
}

/// Input errors. `pos` is a byte offset into the source text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown predicate `{name}` at byte {pos}")]
    UnknownPredicate { name: String, pos: usize },
    #[error("predicate `{name}` declared twice (byte {pos})")]
    DuplicatePredicate { name: String, pos: usize },
    #[error("variable `{found}` at byte {pos}: sentences use the single variable `{expected}`")]
    MultipleVariables { expected: String, found: String, pos: usize },
    #[error("predicate `{name}` is not integer-valued")]
    NotIntegerValued { name: String },
    #[error("predicate `{name}` has degree {degree}; at most 3 is supported")]
    DegreeTooHigh { name: String, degree: usize },
    #[error("predicate `{name}` has a zero leading coefficient")]
    ZeroLeading { name: String },
    #[error("power exponent must be >= 2 (byte {pos})")]
    BadExponent { pos: usize },
    #[error("modulus must be >= 2 (byte {pos})")]
    BadModulus { pos: usize },
    #[error("term at byte {pos} is not linear in the variable")]
    NonLinear { pos: usize },
}

impl ParseError {
    /// Byte offset of the offending input, when there is one.
    pub fn pos(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownPredicate { pos, .. }
            | ParseError::DuplicatePredicate { pos, .. }
            | ParseError::MultipleVariables { pos, .. }
            | ParseError::BadExponent { pos }
            | ParseError::BadModulus { pos }
            | ParseError::NonLinear { pos } => Some(*pos),
            ParseError::NotIntegerValued { .. } | ParseError::DegreeTooHigh { .. } | ParseError::ZeroLeading { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DepressError {
    #[error("depression needs degree 2 or 3, got {0}")]
    Degree(usize),
    #[error("affine coefficient must be nonzero")]
    ZeroCoefficient,
}
