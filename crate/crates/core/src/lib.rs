//! Structuredness measurement and sort refinement for RDF data.
//!
//! The crate works on the *property-structure view* of a dataset: a 0/1
//! matrix with one row per subject and one column per property, compressed
//! into signature sets (distinct row patterns with their multiplicities).
//!
//! On top of that view it provides:
//!
//! - a small rule language (`antecedent -> consequent`) for defining
//!   structuredness functions, with the coverage, similarity and dependency
//!   measures built in ([`rule`]);
//! - exact evaluation of a rule's structuredness value, both by brute-force
//!   enumeration of cell assignments and by signature-level counting
//!   ([`eval`]);
//! - the 0-1 integer program whose solutions are sort refinements, together
//!   with an exact branch-and-bound solver over signature placements
//!   ([`ilp`]);
//! - threshold / sort-count search drivers and the 3-colouring gadget used to
//!   test hardness instances ([`refine`]).
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! filesystem, the clock or a terminal lives in the companion `sortref` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dataset;
pub mod eval;
pub mod ilp;
pub mod partition;
pub mod refine;
pub mod rule;
pub mod threshold;
pub mod view;

pub use dataset::{Dataset, Triple, RDF_TYPE};
pub use eval::{build_count_table, sigma_fast, sigma_naive, sigma_subset, CountTable, StructurednessValue};
pub use ilp::{
    build_model, solve_native, verify_solution, Deadline, IlpModel, IlpSolution, NoDeadline, SolveOptions,
    SolveOutcome, SortRefinement,
};
pub use rule::{builtin_rule, gadget_rule_r0, parse_rule, Builtin, Formula, Rule};
pub use threshold::Threshold;
pub use view::{build_view, Signature, StructureView};

#[cfg(test)]
pub(crate) mod testutil;
