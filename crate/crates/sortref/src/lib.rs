//! File formats, IO and the command-line front end for `sortref-core`.

pub mod cache;
pub mod cli;
pub mod deptable;
pub mod graph;
pub mod ntriples;
pub mod render;
pub mod report;
pub mod timer;

pub use sortref_core as core;
