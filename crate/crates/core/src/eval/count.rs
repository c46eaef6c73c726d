//! Signature-level counting of satisfying assignments.
//!
//! A rough assignment τ fixes, for every rule variable, a signature set and a
//! column. The concrete assignments compatible with τ differ only in which
//! subject of its signature set each variable lands on. Those choices are
//! counted by enumerating how the variables group into distinct subjects (a
//! set partition whose blocks stay inside one signature set), labelling each
//! block either with one of the subject constants of the rule or as "free",
//! and multiplying falling factorials over the free blocks.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use super::{EvalError, StructurednessValue};
use crate::partition::falling_factorial;
use crate::rule::{Atom, Formula, Rule, Var};
use crate::view::StructureView;

/// One `(signature set, column)` pair per rule variable, in rule variable
/// order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoughAssignment(pub Vec<(usize, usize)>);

impl RoughAssignment {
    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// Distinct signature sets mentioned, ascending.
    pub fn sets(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.0.iter().map(|&(s, _)| s).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Distinct columns mentioned, ascending.
    pub fn columns(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.0.iter().map(|&(_, c)| c).collect();
        c.sort_unstable();
        c.dedup();
        c
    }
}

impl fmt::Display for RoughAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, c) in &self.0 {
            write!(f, "({s}:{c})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountEntry {
    pub tau: RoughAssignment,
    pub antecedent: BigUint,
    pub both: BigUint,
}

/// Antecedent and antecedent-and-consequent counts for every rough
/// assignment with a nonzero antecedent count, sorted by τ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    arity: usize,
    signature_count: usize,
    property_count: usize,
    entries: Vec<CountEntry>,
}

impl CountTable {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn signature_count(&self) -> usize {
        self.signature_count
    }

    pub fn property_count(&self) -> usize {
        self.property_count
    }

    pub fn entries(&self) -> &[CountEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Debug dump: header line, then `tau\tcount_antecedent\tcount_both`.
    pub fn write_tsv(&self, out: &mut impl fmt::Write) -> fmt::Result {
        writeln!(out, "tau\tcount_antecedent\tcount_both")?;
        for e in &self.entries {
            writeln!(out, "{}\t{}\t{}", e.tau, e.antecedent, e.both)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    /// Largest number of table entries to store before giving up.
    pub max_entries: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { max_entries: 10_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LAtom {
    Val(usize, bool),
    /// Column index, `None` when the IRI is not a column.
    Prop(usize, Option<usize>),
    /// Pin index, `None` when the subject is not in the view.
    Subj(usize, Option<usize>),
    SameCell(usize, usize),
    SameVal(usize, usize),
    SameProp(usize, usize),
    SameSubj(usize, usize),
}

impl LAtom {
    fn vars(&self) -> (usize, Option<usize>) {
        match *self {
            LAtom::Val(v, _) | LAtom::Prop(v, _) | LAtom::Subj(v, _) => (v, None),
            LAtom::SameCell(a, b) | LAtom::SameVal(a, b) | LAtom::SameProp(a, b) | LAtom::SameSubj(a, b) => {
                (a, Some(b))
            }
        }
    }
}

enum LFormula {
    Atom(LAtom),
    Not(Box<LFormula>),
    And(Box<LFormula>, Box<LFormula>),
    Or(Box<LFormula>, Box<LFormula>),
}

/// Kleene three-valued evaluation; `None` is "not yet determined".
fn eval3<F: Fn(&LAtom) -> Option<bool>>(f: &LFormula, atom: &F) -> Option<bool> {
    match f {
        LFormula::Atom(a) => atom(a),
        LFormula::Not(x) => eval3(x, atom).map(|b| !b),
        LFormula::And(l, r) => match eval3(l, atom) {
            Some(false) => Some(false),
            lv => match (lv, eval3(r, atom)) {
                (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            },
        },
        LFormula::Or(l, r) => match eval3(l, atom) {
            Some(true) => Some(true),
            lv => match (lv, eval3(r, atom)) {
                (_, Some(true)) => Some(true),
                (Some(false), Some(false)) => Some(false),
                _ => None,
            },
        },
    }
}

/// A rule (or a single formula) with variables, columns and subject
/// constants resolved to indices of one view.
///
/// The antecedent is kept as its top-level conjuncts. A conjunct only
/// changes value when one of its variables changes, so each search step
/// re-checks just the conjuncts of the variable it assigns.
struct Lowered<'v> {
    view: &'v StructureView,
    n: usize,
    conjuncts: Vec<LFormula>,
    consequent: Option<LFormula>,
    /// Conjuncts mentioning each variable.
    mentions: Vec<Vec<usize>>,
    /// Conjuncts mentioning each variable and at least one other.
    shared: Vec<Vec<usize>>,
    /// `(set, column)` pairs each variable may take under its own
    /// single-variable conjuncts.
    domain: Vec<Vec<(usize, usize)>>,
    /// Signature set of each resolved subject constant.
    pins: Vec<usize>,
    /// Multiplicity minus the number of pins, per signature set.
    free_capacity: Vec<u64>,
    /// Sets holding a single subject, where same-set means same-subject.
    single: Vec<bool>,
    order: Vec<usize>,
}

struct Lowering<'v, 'a> {
    view: &'v StructureView,
    vars: &'a [Var],
    pin_index: BTreeMap<String, Option<usize>>,
    pins: Vec<usize>,
}

impl Lowering<'_, '_> {
    fn var(&self, v: &Var) -> Result<usize, EvalError> {
        self.vars.iter().position(|x| x == v).ok_or_else(|| EvalError::Unbound(v.clone()))
    }

    fn pin(&mut self, iri: &str) -> Option<usize> {
        if let Some(&p) = self.pin_index.get(iri) {
            return p;
        }
        let p = self.view.signature_of(iri).map(|set| {
            self.pins.push(set);
            self.pins.len() - 1
        });
        self.pin_index.insert(iri.into(), p);
        p
    }

    fn atom(&mut self, a: &Atom) -> Result<LAtom, EvalError> {
        Ok(match a {
            Atom::Val(c, b) => LAtom::Val(self.var(c)?, *b),
            Atom::Prop(c, u) => LAtom::Prop(self.var(c)?, self.view.column_index(u)),
            Atom::Subj(c, u) => {
                let v = self.var(c)?;
                LAtom::Subj(v, self.pin(u))
            }
            Atom::SameCell(a, b) => LAtom::SameCell(self.var(a)?, self.var(b)?),
            Atom::SameVal(a, b) => LAtom::SameVal(self.var(a)?, self.var(b)?),
            Atom::SameProp(a, b) => LAtom::SameProp(self.var(a)?, self.var(b)?),
            Atom::SameSubj(a, b) => LAtom::SameSubj(self.var(a)?, self.var(b)?),
        })
    }

    fn formula(&mut self, f: &Formula) -> Result<LFormula, EvalError> {
        Ok(match f {
            Formula::Atom(a) => LFormula::Atom(self.atom(a)?),
            Formula::Not(x) => LFormula::Not(Box::new(self.formula(x)?)),
            Formula::And(l, r) => LFormula::And(Box::new(self.formula(l)?), Box::new(self.formula(r)?)),
            Formula::Or(l, r) => LFormula::Or(Box::new(self.formula(l)?), Box::new(self.formula(r)?)),
        })
    }
}

fn collect_atoms(f: &LFormula, out: &mut Vec<LAtom>) {
    match f {
        LFormula::Atom(a) => out.push(*a),
        LFormula::Not(x) => collect_atoms(x, out),
        LFormula::And(l, r) | LFormula::Or(l, r) => {
            collect_atoms(l, out);
            collect_atoms(r, out);
        }
    }
}

fn flatten_and(f: LFormula, out: &mut Vec<LFormula>) {
    match f {
        LFormula::And(l, r) => {
            flatten_and(*l, out);
            flatten_and(*r, out);
        }
        other => out.push(other),
    }
}

fn formula_vars(f: &LFormula) -> Vec<usize> {
    let mut atoms = Vec::new();
    collect_atoms(f, &mut atoms);
    let mut vars: Vec<usize> = atoms
        .iter()
        .flat_map(|a| {
            let (x, y) = a.vars();
            [Some(x), y]
        })
        .flatten()
        .collect();
    vars.sort_unstable();
    vars.dedup();
    vars
}

/// Assignment order: repeatedly take the variable that completes the most
/// antecedent atoms, so that pruning kicks in early.
fn greedy_order(n: usize, conjuncts: &[LFormula]) -> Vec<usize> {
    let mut atoms = Vec::new();
    for c in conjuncts {
        collect_atoms(c, &mut atoms);
    }
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best = None;
        let mut best_score = 0usize;
        for v in (0..n).filter(|&v| !placed[v]) {
            let score = atoms
                .iter()
                .filter(|a| {
                    let (x, y) = a.vars();
                    let y = y.unwrap_or(x);
                    (x == v || y == v) && (x == v || placed[x]) && (y == v || placed[y])
                })
                .count();
            if best.is_none() || score > best_score {
                best = Some(v);
                best_score = score;
            }
        }
        let v = best.expect("unplaced variable remains");
        placed[v] = true;
        order.push(v);
    }
    order
}

impl<'v> Lowered<'v> {
    fn new(
        view: &'v StructureView,
        vars: &[Var],
        antecedent: &Formula,
        consequent: Option<&Formula>,
    ) -> Result<Self, EvalError> {
        let mut l = Lowering { view, vars, pin_index: BTreeMap::new(), pins: Vec::new() };
        let ante = l.formula(antecedent)?;
        let cons = consequent.map(|c| l.formula(c)).transpose()?;
        let mut free_capacity: Vec<u64> = view.sets().iter().map(|s| s.multiplicity).collect();
        for &set in &l.pins {
            free_capacity[set] -= 1;
        }
        let n = vars.len();
        let mut conjuncts = Vec::new();
        flatten_and(ante, &mut conjuncts);
        let mut mentions = vec![Vec::new(); n];
        let mut shared = vec![Vec::new(); n];
        for (i, c) in conjuncts.iter().enumerate() {
            let vs = formula_vars(c);
            for &v in &vs {
                mentions[v].push(i);
                if vs.len() > 1 {
                    shared[v].push(i);
                }
            }
        }
        let order = greedy_order(n, &conjuncts);
        let single = view.sets().iter().map(|s| s.multiplicity == 1).collect();
        let mut low = Lowered {
            view,
            n,
            conjuncts,
            consequent: cons,
            mentions,
            shared,
            domain: Vec::new(),
            pins: l.pins,
            free_capacity,
            single,
            order,
        };
        let mut tau = vec![None; n];
        for v in 0..n {
            let mut dom = Vec::new();
            for s in 0..view.signature_count() {
                for c in 0..view.property_count() {
                    tau[v] = Some((s, c));
                    let own = low.mentions[v].iter().filter(|i| !low.shared[v].contains(i));
                    if low.holds_possibly(own, &|a| low.tau_atom(&tau, a)) {
                        dom.push((s, c));
                    }
                }
            }
            tau[v] = None;
            low.domain.push(dom);
        }
        Ok(low)
    }

    /// No listed conjunct is already false.
    fn holds_possibly<'a, F: Fn(&LAtom) -> Option<bool>>(
        &self,
        mut which: impl Iterator<Item = &'a usize>,
        atom: &F,
    ) -> bool {
        which.all(|&i| eval3(&self.conjuncts[i], atom) != Some(false))
    }

    /// Atom value when only (part of) τ is known.
    fn tau_atom(&self, tau: &[Option<(usize, usize)>], a: &LAtom) -> Option<bool> {
        let view = self.view;
        match *a {
            LAtom::Val(v, b) => tau[v].map(|(s, c)| view.has(s, c) == b),
            LAtom::Prop(_, None) | LAtom::Subj(_, None) => Some(false),
            LAtom::Prop(v, Some(col)) => tau[v].map(|(_, c)| c == col),
            LAtom::Subj(v, Some(pin)) => match tau[v] {
                Some((s, _)) if s != self.pins[pin] => Some(false),
                Some((s, _)) if self.single[s] => Some(true),
                _ => None,
            },
            LAtom::SameCell(x, y) | LAtom::SameSubj(x, y) | LAtom::SameVal(x, y) | LAtom::SameProp(x, y) if x == y => {
                Some(true)
            }
            LAtom::SameCell(x, y) => match (tau[x], tau[y]) {
                (Some(p), Some(q)) if p != q => Some(false),
                (Some((s, _)), Some(_)) if self.single[s] => Some(true),
                _ => None,
            },
            LAtom::SameSubj(x, y) => match (tau[x], tau[y]) {
                (Some((s, _)), Some((t, _))) if s != t => Some(false),
                (Some((s, _)), Some(_)) if self.single[s] => Some(true),
                _ => None,
            },
            LAtom::SameVal(x, y) => match (tau[x], tau[y]) {
                (Some((s, c)), Some((t, d))) => Some(view.has(s, c) == view.has(t, d)),
                _ => None,
            },
            LAtom::SameProp(x, y) => match (tau[x], tau[y]) {
                (Some((_, c)), Some((_, d))) => Some(c == d),
                _ => None,
            },
        }
    }

    /// Atom value under a complete τ and a partial grouping of variables
    /// into subjects.
    fn block_atom(&self, tau: &[Option<(usize, usize)>], g: &Grouping, a: &LAtom) -> Option<bool> {
        match *a {
            LAtom::Subj(v, Some(pin)) => g.block[v].map(|b| g.label[b] == Some(pin)),
            LAtom::SameCell(x, y) if x != y => match (g.block[x], g.block[y]) {
                (Some(p), Some(q)) => Some(p == q && tau[x].unwrap().1 == tau[y].unwrap().1),
                _ => self.tau_atom(tau, a),
            },
            LAtom::SameSubj(x, y) if x != y => match (g.block[x], g.block[y]) {
                (Some(p), Some(q)) => Some(p == q),
                _ => self.tau_atom(tau, a),
            },
            _ => self.tau_atom(tau, a),
        }
    }

    /// `(count(φ1, τ), count(φ1 ∧ φ2, τ))`.
    fn count(&self, tau: &[Option<(usize, usize)>]) -> (BigUint, BigUint) {
        let mut g = Grouping {
            block: vec![None; self.n],
            set: Vec::new(),
            label: Vec::new(),
            pin_used: vec![false; self.pins.len()],
            free: BTreeMap::new(),
        };
        let mut acc = (BigUint::zero(), BigUint::zero());
        self.group(tau, 0, &mut g, &mut acc);
        acc
    }

    fn group(&self, tau: &[Option<(usize, usize)>], depth: usize, g: &mut Grouping, acc: &mut (BigUint, BigUint)) {
        if depth == self.n {
            let atom = |a: &LAtom| self.block_atom(tau, g, a);
            debug_assert!(self.conjuncts.iter().all(|c| eval3(c, &atom) == Some(true)));
            let mut weight = BigUint::from(1u32);
            for (&set, &k) in &g.free {
                weight *= falling_factorial(self.free_capacity[set], k);
            }
            if let Some(cons) = &self.consequent {
                if eval3(cons, &atom) == Some(true) {
                    acc.1 += &weight;
                }
            }
            acc.0 += weight;
            return;
        }
        let v = self.order[depth];
        let set = tau[v].expect("τ is complete").0;

        for b in 0..g.set.len() {
            if g.set[b] == set {
                g.block[v] = Some(b);
                self.descend(tau, depth, v, g, acc);
            }
        }

        let free_now = g.free.get(&set).copied().unwrap_or(0);
        if free_now < self.free_capacity[set] {
            g.open(v, set, None);
            *g.free.entry(set).or_insert(0) += 1;
            self.descend(tau, depth, v, g, acc);
            *g.free.get_mut(&set).unwrap() -= 1;
            if g.free[&set] == 0 {
                g.free.remove(&set);
            }
            g.close();
        }

        for pin in 0..self.pins.len() {
            if self.pins[pin] == set && !g.pin_used[pin] {
                g.pin_used[pin] = true;
                g.open(v, set, Some(pin));
                self.descend(tau, depth, v, g, acc);
                g.close();
                g.pin_used[pin] = false;
            }
        }
        g.block[v] = None;
    }

    /// Recurses after `v` got its block, unless a conjunct of `v` failed.
    fn descend(
        &self,
        tau: &[Option<(usize, usize)>],
        depth: usize,
        v: usize,
        g: &mut Grouping,
        acc: &mut (BigUint, BigUint),
    ) {
        if self.holds_possibly(self.mentions[v].iter(), &|a| self.block_atom(tau, g, a)) {
            self.group(tau, depth + 1, g, acc);
        }
    }
}

/// Variables grouped into distinct subjects.
struct Grouping {
    block: Vec<Option<usize>>,
    set: Vec<usize>,
    label: Vec<Option<usize>>,
    pin_used: Vec<bool>,
    /// Free blocks per signature set.
    free: BTreeMap<usize, u64>,
}

impl Grouping {
    fn open(&mut self, v: usize, set: usize, label: Option<usize>) {
        self.block[v] = Some(self.set.len());
        self.set.push(set);
        self.label.push(label);
    }

    fn close(&mut self) {
        self.set.pop();
        self.label.pop();
    }
}

fn check_tau(view: &StructureView, vars: &[Var], tau: &RoughAssignment) -> Result<(), EvalError> {
    if tau.arity() != vars.len() {
        return Err(EvalError::ArityMismatch { expected: vars.len(), found: tau.arity() });
    }
    for &(s, c) in &tau.0 {
        if s >= view.signature_count() || c >= view.property_count() {
            return Err(EvalError::IndexOutOfRange);
        }
    }
    Ok(())
}

/// `count(φ, τ)`: the number of assignments of `vars` to cells that follow
/// τ and satisfy `phi`. τ lists one pair per entry of `vars`.
pub fn count_for_tau(
    view: &StructureView,
    vars: &[Var],
    phi: &Formula,
    tau: &RoughAssignment,
) -> Result<BigUint, EvalError> {
    check_tau(view, vars, tau)?;
    let l = Lowered::new(view, vars, phi, None)?;
    let t: Vec<Option<(usize, usize)>> = tau.0.iter().copied().map(Some).collect();
    Ok(l.count(&t).0)
}

/// Both counts of a rule for one τ (indexed by the rule's variable order).
pub fn count_rule_for_tau(
    view: &StructureView,
    rule: &Rule,
    tau: &RoughAssignment,
) -> Result<(BigUint, BigUint), EvalError> {
    check_tau(view, rule.vars(), tau)?;
    let l = Lowered::new(view, rule.vars(), rule.antecedent(), Some(rule.consequent()))?;
    let t: Vec<Option<(usize, usize)>> = tau.0.iter().copied().map(Some).collect();
    Ok(l.count(&t))
}

/// Counts for every τ with a nonzero antecedent count.
pub fn build_count_table(view: &StructureView, rule: &Rule) -> Result<CountTable, EvalError> {
    build_count_table_with(view, rule, CountOptions::default())
}

pub fn build_count_table_with(view: &StructureView, rule: &Rule, opts: CountOptions) -> Result<CountTable, EvalError> {
    let l = Lowered::new(view, rule.vars(), rule.antecedent(), Some(rule.consequent()))?;
    let mut tau = vec![None; l.n];
    let mut entries = Vec::new();
    search_tau(&l, 0, &mut tau, &mut entries, opts.max_entries)?;
    entries.sort_by(|a, b| a.tau.cmp(&b.tau));
    Ok(CountTable {
        arity: l.n,
        signature_count: view.signature_count(),
        property_count: view.property_count(),
        entries,
    })
}

fn search_tau(
    l: &Lowered<'_>,
    depth: usize,
    tau: &mut Vec<Option<(usize, usize)>>,
    out: &mut Vec<CountEntry>,
    max_entries: usize,
) -> Result<(), EvalError> {
    if depth == l.n {
        let (antecedent, both) = l.count(tau);
        if !antecedent.is_zero() {
            if out.len() == max_entries {
                return Err(EvalError::TooManyEntries { limit: max_entries });
            }
            out.push(CountEntry { tau: RoughAssignment(tau.iter().map(|x| x.unwrap()).collect()), antecedent, both });
        }
        return Ok(());
    }
    let v = l.order[depth];
    for &pair in &l.domain[v] {
        tau[v] = Some(pair);
        if l.holds_possibly(l.shared[v].iter(), &|a| l.tau_atom(tau, a)) {
            search_tau(l, depth + 1, tau, out, max_entries)?;
        }
    }
    tau[v] = None;
    Ok(())
}

fn sum_entries<'a>(entries: impl Iterator<Item = &'a CountEntry>) -> StructurednessValue {
    let mut fav = BigUint::zero();
    let mut total = BigUint::zero();
    for e in entries {
        fav += &e.both;
        total += &e.antecedent;
    }
    StructurednessValue::new(fav, total)
}

/// σ_r of the whole view through the count table.
pub fn sigma_fast(view: &StructureView, rule: &Rule) -> Result<StructurednessValue, EvalError> {
    Ok(sigma_of_table(&build_count_table(view, rule)?))
}

pub fn sigma_of_table(table: &CountTable) -> StructurednessValue {
    sum_entries(table.entries.iter())
}

/// σ_r of the sub-dataset made of the chosen signature sets, read off the
/// table of the full view. An entry counts when all its signature sets are
/// chosen and all its columns are used by some chosen set.
pub fn sigma_subset(
    table: &CountTable,
    view: &StructureView,
    chosen: &[usize],
) -> Result<StructurednessValue, EvalError> {
    if chosen.is_empty() {
        return Err(EvalError::EmptySelection);
    }
    if chosen.iter().any(|&s| s >= view.signature_count()) {
        return Err(EvalError::IndexOutOfRange);
    }
    let mut in_sort = vec![false; view.signature_count()];
    for &s in chosen {
        in_sort[s] = true;
    }
    let mut used = vec![false; view.property_count()];
    for c in view.support_of(chosen) {
        used[c] = true;
    }
    Ok(sum_entries(table.entries.iter().filter(|e| e.tau.0.iter().all(|&(s, c)| in_sort[s] && used[c]))))
}
