//! Exact rational and polynomial arithmetic.

pub mod elim;
pub mod poly;
pub mod rat;
pub mod unipoly;

pub use elim::{discriminant, gcd, resultant, square_free_part_in};
pub use poly::{Assignment, Monomial, Poly, Var};
pub use rat::{format_rat, parse_rat, Rat};
pub use unipoly::{clear_denominators, gcd_uni, square_free_part, UniPoly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("variable `{0}` has no assigned value")]
    UnassignedVariable(String),
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("exponent exceeds 2^31 - 1")]
    DegreeOverflow,
    #[error("malformed rational `{0}`")]
    BadRational(String),
}
