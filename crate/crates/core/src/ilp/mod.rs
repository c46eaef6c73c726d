//! The 0-1 program whose solutions are sort refinements, and an exact
//! native solver for it.

mod model;
mod solver;

pub use model::{
    add_symmetry_breaking, build_model, build_model_with, hash_coefficient, verify_solution, write_lp, Constraint,
    Family, IlpModel, IlpSolution, ModelError, Sense, VarKind, DEFAULT_EXPONENT_CAP, DEFAULT_SIZE_CAP,
};
pub use solver::{solve_native, Deadline, NoDeadline, PollBudget, SolveOptions, SolveOutcome, Sort, SortRefinement};
