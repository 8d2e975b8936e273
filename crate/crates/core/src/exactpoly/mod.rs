//! Exact multivariate polynomials over the rationals.

mod ideal;
mod monomial;
mod parser;
mod polynomial;
pub mod rational;
mod table;

pub use ideal::IdealBasis;
pub use monomial::Monomial;
pub use parser::{parse_polynomial, ParseError};
pub use polynomial::Polynomial;
pub use rational::Rational;
pub use table::{VariableTable, STANDARD_VARIABLES};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("invalid variable name `{0}`")]
    InvalidVariableName(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("polynomials use different variable tables")]
    TableMismatch,
    #[error("variable `{0}` has no value")]
    Unassigned(String),
    #[error("right-hand side of the square rewrite depends on `{0}`")]
    RhsDependsOnVariable(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
