//! Exact arithmetic over Q: rationals, sparse polynomials, polynomial
//! matrices, resultants and Gröbner bases.

pub mod groebner;
pub mod matrix;
pub mod poly;
pub mod rational;
pub mod resultant;

pub use groebner::{
    groebner_basis, ideal_membership, GroebnerBasis, GroebnerBudget, IdealPresentation, Membership, MonomialOrder,
};
pub use matrix::{PolyMatrix, QMatrix};
pub use poly::{Exponents, MultiPoly, VarContext};
pub use rational::{format_rational, parse_rational, rat, ratio, Rational};
pub use resultant::{discriminant, resultant, sylvester_matrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("variable contexts differ: {left:?} vs {right:?}")]
    ContextMismatch { left: Vec<String>, right: Vec<String> },
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("no value assigned to variable {0:?}")]
    IncompleteAssignment(String),
    #[error("duplicate variable {0:?}")]
    DuplicateVariable(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("Gröbner budget exhausted with {basis_size} basis elements and {pending_pairs} pending pairs")]
    ResourceExhausted { basis_size: usize, pending_pairs: usize },
}
