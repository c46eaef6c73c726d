//! The structuredness rule language.
//!
//! A rule `antecedent -> consequent` is a pair of Boolean formulas over cell
//! variables. Atoms compare a cell's value (`val`), row (`subj`) or column
//! (`prop`) with a constant or with another variable's.

mod ast;
pub mod builtin;
mod parse;

pub use ast::{Atom, AtomError, Formula, Rule, RuleError, Term, Var};
pub use builtin::{builtin_rule, gadget_rule_r0, Builtin, BuiltinError};
pub use parse::{parse_formula, parse_rule, ParseError};
