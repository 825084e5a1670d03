//! Exact arithmetic for multivariate Laurent polynomials.
//!
//! Models the equivariant K-theory of a point — the Laurent ring in the
//! torus characters — extended by residue variables, deformation parameters
//! (nonnegative exponents only), and cohomology variables. A [`Truncation`]
//! realizes the parameter-degree quotient in which formal series become
//! finite.

mod monomial;
mod poly;
mod rational;
mod vars;

pub use monomial::Monomial;
pub use poly::{BlockedAccumulator, LaurentPoly, ProductAccumulator, Truncation};
pub use rational::{binomial, factorial, Rational};
pub use vars::{VarId, VarRole, VarTable, VarTableBuilder, MAX_VARS};

use alloc::string::String;
use core::fmt;

/// Errors from ring operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingError {
    DuplicateVariable(String),
    TableTooLarge,
    UnknownVariable { var: String },
    NegativeExponent { var: String },
    NonUnitSubstitution,
    UnassignedVariable { var: String },
    EvalAtPole { var: String },
    DivisionByZero,
    InexactDivision,
    NonParameterTruncation { var: String },
}

impl fmt::Display for RingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingError::DuplicateVariable(name) => write!(f, "duplicate variable `{name}`"),
            RingError::TableTooLarge => write!(f, "variable table exceeds {MAX_VARS} variables"),
            RingError::UnknownVariable { var } => write!(f, "unknown variable `{var}`"),
            RingError::NegativeExponent { var } => {
                write!(f, "negative exponent on non-Laurent variable `{var}`")
            }
            RingError::NonUnitSubstitution => {
                write!(f, "substitution into a negative power requires a unit value")
            }
            RingError::UnassignedVariable { var } => {
                write!(f, "variable `{var}` has no assigned value")
            }
            RingError::EvalAtPole { var } => {
                write!(f, "evaluation at a pole: zero assigned to `{var}` with negative exponent")
            }
            RingError::DivisionByZero => write!(f, "division by zero"),
            RingError::InexactDivision => write!(f, "division leaves a nonzero remainder"),
            RingError::NonParameterTruncation { var } => {
                write!(f, "truncation variable `{var}` is not a parameter")
            }
        }
    }
}

impl core::error::Error for RingError {}
