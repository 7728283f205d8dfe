//! Specification formulas, normal forms and formula-level transformations.

pub mod ast;
pub mod normal;
pub mod reduce;
pub mod relax;

pub use ast::{assignment, Atom, Formula, Rel, Spec};
pub use normal::{
    clause_formula, dnf_formula, hat_transform, nonstrict_polys, normalize, to_dnf, Clause,
    DEFAULT_DNF_BUDGET,
};
pub use reduce::{four_square_decompose, htp_reduce, lift_witness, ReducedAtom, ReductionResult};
pub use relax::delta_relax;

use crate::algebra::AlgebraError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("DNF exceeds the clause budget of {0}")]
    DnfBudgetExceeded(usize),
    #[error("variable `{0}` is already in use")]
    VariableClash(String),
    #[error("variable listed twice")]
    DuplicateVariable,
    #[error("variable `{0}` is neither an input nor an output")]
    UndeclaredVariable(String),
    #[error("four-square decomposition of a negative number")]
    NegativeInput,
    #[error("no four-square decomposition within the search bound")]
    NotFoundWithinBound,
    #[error("assignment does not satisfy the clause")]
    NotAWitness,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
