//! Exact evaluation of structuredness values.
//!
//! [`sigma_naive`] enumerates concrete cell assignments and serves as the
//! reference; [`sigma_fast`] and [`build_count_table`] work per signature
//! set and scale to large views.

mod count;
pub mod naive;
mod value;

use thiserror::Error;

use crate::rule::Var;

pub use count::{
    build_count_table, build_count_table_with, count_for_tau, count_rule_for_tau, sigma_fast, sigma_of_table,
    sigma_subset, CountEntry, CountOptions, CountTable, RoughAssignment,
};
pub use naive::{satisfies, sigma_naive, sigma_naive_with_limit, ConcreteMatrix, VariableAssignment};
pub use value::StructurednessValue;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable {0} is not bound")]
    Unbound(Var),
    #[error("variable {0} is bound outside the matrix")]
    OutOfRange(Var),
    #[error("{size} assignments exceed the enumeration limit of {limit}")]
    TooLarge { size: u128, limit: u128 },
    #[error("count table would exceed {limit} entries")]
    TooManyEntries { limit: usize },
    #[error("no signature sets selected")]
    EmptySelection,
    #[error("rough assignment has {found} pairs, rule has {expected} variables")]
    ArityMismatch { expected: usize, found: usize },
    #[error("signature or column index out of range")]
    IndexOutOfRange,
}
