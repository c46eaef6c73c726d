//! Threshold and sort-count search drivers, and the 3-colouring gadget.

mod gadget;
mod search;

pub use gadget::{
    build_coloring_gadget, decide_3colorable_via_refinement, gadget_view, GraphError, UndirectedGraph, GADGET_NS,
};
pub use search::{
    search_highest_theta, search_lowest_k, Direction, NoTimer, Outcome, Probe, ProbeTimer, SearchError, SearchMode,
    SearchReport,
};
