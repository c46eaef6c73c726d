//! Reduction from graph 3-colouring to sort refinement.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::dataset::{Dataset, Triple};
use crate::eval::{build_count_table, EvalError};
use crate::ilp::{solve_native, Deadline, SolveOptions, SolveOutcome};
use crate::rule::gadget_rule_r0;
use crate::threshold::Threshold;
use crate::view::{build_view, StructureView};

pub const GADGET_NS: &str = "urn:gadget:";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph needs at least one node")]
    NoNodes,
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("node {node} outside 1..={n}")]
    OutOfRange { node: usize, n: usize },
}

/// Simple undirected graph on nodes `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl UndirectedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoNodes);
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for node in [u, v] {
                if node == 0 || node > n {
                    return Err(GraphError::OutOfRange { node, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(UndirectedGraph { n, edges: set })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v)));
        Self::new(n, edges).expect("valid complete graph")
    }

    pub fn cycle(n: usize) -> Self {
        Self::new(n, (1..=n).map(|u| (u, u % n + 1))).expect("valid cycle")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|u| (u, u + 1))).expect("valid path")
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// Brute force over all 3^n colourings.
    pub fn is_3_colorable(&self) -> bool {
        let total = 3usize.pow(self.n as u32);
        (0..total).any(|code| {
            let colour = |node: usize| (code / 3usize.pow((node - 1) as u32)) % 3;
            self.edges.iter().all(|&(u, v)| colour(u) != colour(v))
        })
    }
}

fn iri(local: &str) -> String {
    format!("{GADGET_NS}{local}")
}

/// The gadget matrix row by row, columns in the order
/// `sp1, sp2, idp, L1..Ln, R1..Rn`.
pub fn gadget_matrix(g: &UndirectedGraph) -> Vec<Vec<bool>> {
    let n = g.n;
    let mut rows = Vec::with_capacity(4 * n);
    for (block, (sp1, sp2, idp)) in
        [(false, false, true), (false, true, true), (true, false, true), (true, true, false)].into_iter().enumerate()
    {
        for i in 1..=n {
            let mut row = alloc::vec![sp1, sp2, idp];
            row.extend((1..=n).map(|j| i == j));
            if block < 3 {
                row.extend((1..=n).map(|j| i == j));
            } else {
                row.extend((1..=n).map(|j| !g.adjacent(i, j)));
            }
            rows.push(row);
        }
    }
    rows
}

/// Column IRIs matching [`gadget_matrix`].
pub fn gadget_columns(n: usize) -> Vec<String> {
    let mut cols = alloc::vec![iri("sp1"), iri("sp2"), iri("idp")];
    cols.extend((1..=n).map(|j| iri(&format!("L{j}"))));
    cols.extend((1..=n).map(|j| iri(&format!("R{j}"))));
    cols
}

/// The dataset whose matrix is the gadget of `g`: subjects `r1..r4n`, one
/// triple with literal `"1"` per 1-cell.
pub fn build_coloring_gadget(g: &UndirectedGraph) -> Dataset {
    let cols = gadget_columns(g.n);
    let mut triples = Vec::new();
    for (r, row) in gadget_matrix(g).iter().enumerate() {
        let subject = iri(&format!("r{}", r + 1));
        for (c, &bit) in row.iter().enumerate() {
            if bit {
                triples.push(Triple::new(subject.clone(), cols[c].clone(), "\"1\"").expect("nonempty IRIs"));
            }
        }
    }
    Dataset::from_triples(triples)
}

pub fn gadget_view(g: &UndirectedGraph) -> StructureView {
    build_view(&build_coloring_gadget(g)).expect("gadget rows are nonempty")
}

/// Asks for a refinement of the gadget into at most 3 sorts with threshold
/// 1 under the gadget rule. `None` when the deadline expired.
pub fn decide_3colorable_via_refinement(
    g: &UndirectedGraph,
    opts: SolveOptions,
    deadline: &dyn Deadline,
) -> Result<Option<bool>, EvalError> {
    let view = gadget_view(g);
    let table = build_count_table(&view, &gadget_rule_r0(GADGET_NS))?;
    Ok(match solve_native(&view, &table, 3, &Threshold::one(), opts, deadline) {
        SolveOutcome::Feasible { .. } => Some(true),
        SolveOutcome::Infeasible => Some(false),
        SolveOutcome::Unknown => None,
    })
}
