//! Exact branch and bound over signature placements.
//!
//! Only the X variables are branched on. For a fixed placement, U is the
//! OR of the placed signatures' columns and T marks the table entries whose
//! signature sets and columns all lie in the sort, so each sort's threshold
//! sum is determined. The bound keeps, per sort, the sum over entries that
//! can still become active with negative contributions counted only once
//! they are certain.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{AddAssign, SubAssign};

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use super::model::{hash_coefficient, IlpSolution, DEFAULT_EXPONENT_CAP};
use crate::eval::{sigma_subset, CountTable, StructurednessValue};
use crate::threshold::Threshold;
use crate::view::StructureView;

/// Polled by the solver; once it reports expiry the solve ends as
/// [`SolveOutcome::Unknown`].
pub trait Deadline {
    fn expired(&self) -> bool;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoDeadline;

impl Deadline for NoDeadline {
    fn expired(&self) -> bool {
        false
    }
}

/// Expires after a fixed number of polls. Useful where no clock exists.
#[derive(Debug)]
pub struct PollBudget {
    left: core::cell::Cell<u64>,
}

impl PollBudget {
    pub fn new(polls: u64) -> Self {
        PollBudget { left: core::cell::Cell::new(polls) }
    }
}

impl Deadline for PollBudget {
    fn expired(&self) -> bool {
        let n = self.left.get();
        if n == 0 {
            return true;
        }
        self.left.set(n - 1);
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Place signatures only into already used sorts or the next fresh one.
    pub symmetry: bool,
    /// Exponent cap of the hash the witness is ordered by.
    pub exponent_cap: u32,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { symmetry: true, exponent_cap: DEFAULT_EXPONENT_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sort {
    /// Signature set indices, ascending.
    pub signatures: Vec<usize>,
    pub value: StructurednessValue,
}

/// Nonempty sorts of a feasible placement, ordered by their first
/// signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortRefinement {
    pub sorts: Vec<Sort>,
    pub threshold: Threshold,
}

impl SortRefinement {
    pub fn k_used(&self) -> usize {
        self.sorts.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Feasible { refinement: SortRefinement, solution: IlpSolution },
    Infeasible,
    Unknown,
}

impl SolveOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SolveOutcome::Feasible { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            SolveOutcome::Feasible { .. } => "feasible",
            SolveOutcome::Infeasible => "infeasible",
            SolveOutcome::Unknown => "unknown",
        }
    }
}

const POLL_EVERY: u64 = 1024;

trait Weight: Clone + Ord + Zero + for<'a> AddAssign<&'a Self> + for<'a> SubAssign<&'a Self> {}
impl Weight for i128 {}
impl Weight for BigInt {}

struct Search<W> {
    k: usize,
    symmetry: bool,
    /// `max(w, 0)` and `max(w, 0) − w` for the entry weights
    /// `w = θ2·both − θ1·ant`.
    positive: Vec<W>,
    negative: Vec<W>,
    by_set: Vec<Vec<usize>>,
    by_col: Vec<Vec<usize>>,
    supp: Vec<Vec<usize>>,

    place: Vec<usize>,
    unplaced_holders: Vec<usize>,
    col_count: Vec<Vec<usize>>,
    missing: Vec<Vec<usize>>,
    blocked: Vec<Vec<usize>>,
    /// Upper bound on each sort's final threshold sum.
    bound: Vec<W>,
    nodes: u64,
}

const UNPLACED: usize = usize::MAX;

impl<W: Weight> Search<W> {
    fn block(&mut self, j: usize, t: usize) {
        self.blocked[j][t] += 1;
        if self.blocked[j][t] == 1 {
            let p = self.positive[t].clone();
            self.bound[j] -= &p;
        }
    }

    fn unblock(&mut self, j: usize, t: usize) {
        self.blocked[j][t] -= 1;
        if self.blocked[j][t] == 0 {
            let p = self.positive[t].clone();
            self.bound[j] += &p;
        }
    }

    fn close_gap(&mut self, i: usize, t: usize) {
        self.missing[i][t] -= 1;
        if self.missing[i][t] == 0 {
            let n = self.negative[t].clone();
            self.bound[i] -= &n;
        }
    }

    fn open_gap(&mut self, i: usize, t: usize) {
        if self.missing[i][t] == 0 {
            let n = self.negative[t].clone();
            self.bound[i] += &n;
        }
        self.missing[i][t] += 1;
    }

    fn assign(&mut self, mu: usize, i: usize) {
        self.place[mu] = i;
        for idx in 0..self.by_set[mu].len() {
            let t = self.by_set[mu][idx];
            self.close_gap(i, t);
            for j in (0..self.k).filter(|&j| j != i) {
                self.block(j, t);
            }
        }
        for idx in 0..self.supp[mu].len() {
            let p = self.supp[mu][idx];
            self.unplaced_holders[p] -= 1;
            self.col_count[i][p] += 1;
            if self.col_count[i][p] == 1 {
                for n in 0..self.by_col[p].len() {
                    let t = self.by_col[p][n];
                    self.close_gap(i, t);
                }
            }
            if self.unplaced_holders[p] == 0 {
                for j in (0..self.k).filter(|&j| j != i) {
                    if self.col_count[j][p] == 0 {
                        for n in 0..self.by_col[p].len() {
                            let t = self.by_col[p][n];
                            self.block(j, t);
                        }
                    }
                }
            }
        }
    }

    fn unassign(&mut self, mu: usize, i: usize) {
        for idx in (0..self.supp[mu].len()).rev() {
            let p = self.supp[mu][idx];
            if self.unplaced_holders[p] == 0 {
                for j in (0..self.k).filter(|&j| j != i) {
                    if self.col_count[j][p] == 0 {
                        for n in 0..self.by_col[p].len() {
                            let t = self.by_col[p][n];
                            self.unblock(j, t);
                        }
                    }
                }
            }
            if self.col_count[i][p] == 1 {
                for n in 0..self.by_col[p].len() {
                    let t = self.by_col[p][n];
                    self.open_gap(i, t);
                }
            }
            self.col_count[i][p] -= 1;
            self.unplaced_holders[p] += 1;
        }
        for idx in (0..self.by_set[mu].len()).rev() {
            let t = self.by_set[mu][idx];
            for j in (0..self.k).filter(|&j| j != i) {
                self.unblock(j, t);
            }
            self.open_gap(i, t);
        }
        self.place[mu] = UNPLACED;
    }

    /// `Some(true)` on a feasible leaf, `Some(false)` when the subtree is
    /// exhausted, `None` when the deadline expired.
    fn dfs(&mut self, mu: usize, used: usize, deadline: &dyn Deadline) -> Option<bool> {
        self.nodes += 1;
        if self.nodes % POLL_EVERY == 1 && deadline.expired() {
            return None;
        }
        if self.bound.iter().any(|b| *b < W::zero()) {
            return Some(false);
        }
        if mu == self.place.len() {
            return Some(true);
        }
        let limit = if self.symmetry { (used + 1).min(self.k) } else { self.k };
        for i in 0..limit {
            self.assign(mu, i);
            let r = self.dfs(mu + 1, used.max(i + 1), deadline);
            if r != Some(false) {
                return r;
            }
            self.unassign(mu, i);
        }
        Some(false)
    }
}

fn weights(table: &CountTable, theta: &Threshold) -> Vec<BigInt> {
    let t1 = BigInt::from(theta.numer().clone());
    let t2 = BigInt::from(theta.denom().clone());
    table
        .entries()
        .iter()
        .map(|e| &t2 * BigInt::from(e.both.clone()) - &t1 * BigInt::from(e.antecedent.clone()))
        .collect()
}

/// Decides whether the signature sets of `view` can be split into at most
/// `k` sorts that each reach `theta`, and returns a witness if so.
pub fn solve_native(
    view: &StructureView,
    table: &CountTable,
    k: usize,
    theta: &Threshold,
    opts: SolveOptions,
    deadline: &dyn Deadline,
) -> SolveOutcome {
    assert!(k >= 1, "k must be at least 1");
    let w = weights(table, theta);
    let magnitude: BigInt = w.iter().map(|x| if x.sign() == num_bigint::Sign::Minus { -x } else { x.clone() }).sum();
    let placement = if magnitude.bits() < 126 {
        let small: Vec<i128> = w.iter().map(|x| x.to_i128().expect("checked magnitude")).collect();
        run(view, table, k, opts.symmetry, small, deadline)
    } else {
        run(view, table, k, opts.symmetry, w, deadline)
    };
    match placement {
        None => SolveOutcome::Unknown,
        Some(None) => SolveOutcome::Infeasible,
        Some(Some(place)) => witness(view, table, k, theta, &place, opts.exponent_cap),
    }
}

fn run<W: Weight>(
    view: &StructureView,
    table: &CountTable,
    k: usize,
    symmetry: bool,
    weight: Vec<W>,
    deadline: &dyn Deadline,
) -> Option<Option<Vec<usize>>> {
    let (l, p) = (view.signature_count(), view.property_count());
    let tau_sets: Vec<Vec<usize>> = table.entries().iter().map(|e| e.tau.sets()).collect();
    let tau_cols: Vec<Vec<usize>> = table.entries().iter().map(|e| e.tau.columns()).collect();
    let mut by_set = vec![Vec::new(); l];
    let mut by_col = vec![Vec::new(); p];
    for t in 0..tau_sets.len() {
        for &s in &tau_sets[t] {
            by_set[s].push(t);
        }
        for &c in &tau_cols[t] {
            by_col[c].push(t);
        }
    }
    let supp: Vec<Vec<usize>> = (0..l).map(|mu| view.set(mu).bits.ones().collect()).collect();
    let mut unplaced_holders = vec![0usize; p];
    for s in &supp {
        for &c in s {
            unplaced_holders[c] += 1;
        }
    }
    let positive: Vec<W> = weight.iter().map(|x| if *x > W::zero() { x.clone() } else { W::zero() }).collect();
    let negative: Vec<W> = weight
        .iter()
        .map(|x| {
            // negative[t] = max(w,0) − w ≥ 0, the drop once the entry is certain.
            let mut d = if *x > W::zero() { x.clone() } else { W::zero() };
            d -= x;
            d
        })
        .collect();
    let mut start = W::zero();
    for x in &positive {
        start += x;
    }
    let missing: Vec<usize> = (0..tau_sets.len()).map(|t| tau_sets[t].len() + tau_cols[t].len()).collect();
    let mut s = Search {
        k,
        symmetry,
        positive,
        negative,
        by_set,
        by_col,
        supp,
        place: vec![UNPLACED; l],
        unplaced_holders,
        col_count: vec![vec![0; p]; k],
        missing: vec![missing; k],
        blocked: vec![vec![0; table.len()]; k],
        bound: vec![start; k],
        nodes: 0,
    };
    match s.dfs(0, 0, deadline) {
        None => None,
        Some(false) => Some(None),
        Some(true) => Some(Some(s.place)),
    }
}

fn witness(
    view: &StructureView,
    table: &CountTable,
    k: usize,
    theta: &Threshold,
    place: &[usize],
    exponent_cap: u32,
) -> SolveOutcome {
    // Relabel sorts by ascending hash so the witness also satisfies the
    // symmetry constraints of the exported model.
    let mut hashes: Vec<(BigUint, usize)> = (0..k).map(|i| (BigUint::zero(), i)).collect();
    for (mu, &i) in place.iter().enumerate() {
        hashes[i].0 += hash_coefficient(mu, exponent_cap);
    }
    hashes.sort();
    let mut relabel = vec![0; k];
    for (new, &(_, old)) in hashes.iter().enumerate() {
        relabel[old] = new;
    }
    let place: Vec<usize> = place.iter().map(|&i| relabel[i]).collect();

    let (l, p, nt) = (view.signature_count(), view.property_count(), table.len());
    let mut values = vec![false; k * (l + p + nt)];
    let mut members = vec![Vec::new(); k];
    for (mu, &i) in place.iter().enumerate() {
        members[i].push(mu);
        values[i * l + mu] = true;
        for c in view.set(mu).bits.ones() {
            values[k * l + i * p + c] = true;
        }
    }
    for i in 0..k {
        for (t, e) in table.entries().iter().enumerate() {
            let active = e.tau.0.iter().all(|&(s, c)| place[s] == i && values[k * l + i * p + c]);
            values[k * (l + p) + i * nt + t] = active;
        }
    }

    let mut sorts: Vec<Sort> = members
        .into_iter()
        .filter(|m| !m.is_empty())
        .map(|signatures| {
            let value = sigma_subset(table, view, &signatures).expect("nonempty sort");
            Sort { signatures, value }
        })
        .collect();
    sorts.sort_by_key(|s| s.signatures[0]);
    SolveOutcome::Feasible {
        refinement: SortRefinement { sorts, threshold: theta.clone() },
        solution: IlpSolution { values },
    }
}
