//! Helpers shared by the integration tests: fixtures, seeded generators and
//! brute-force oracles that do not go through the signature-level code.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use sortref_core::partition::{blocks_of, SetPartitions};
use sortref_core::refine::UndirectedGraph;
use sortref_core::rule::{Atom, Var};
use sortref_core::view::SignatureSet;
use sortref_core::{build_view, sigma_naive, Dataset, Formula, Rule, Signature, StructureView, Threshold, Triple};

pub const NS: &str = "http://example.org/";

pub fn iri(local: &str) -> String {
    format!("{NS}{local}")
}

/// N-Triples text with one subject per row, holding the listed properties.
pub fn ntriples(rows: &[Vec<&str>]) -> String {
    let mut out = String::new();
    for (i, props) in rows.iter().enumerate() {
        for p in props {
            out.push_str(&format!("<{}> <{}> \"v\" .\n", iri(&format!("s{}", i + 1)), iri(p)));
        }
    }
    out
}

/// All `n` subjects have `p`.
pub fn uniform_rows(n: usize) -> String {
    ntriples(&vec![vec!["p"]; n])
}

/// `s1` has `p` and `q`, the others only `p`.
pub fn one_wide_row(n: usize) -> String {
    let mut rows = vec![vec!["p", "q"]];
    rows.extend(vec![vec!["p"]; n - 1]);
    ntriples(&rows)
}

/// `s<i>` has only `p<i>`.
pub fn diagonal_rows(n: usize) -> String {
    let names: Vec<String> = (1..=n).map(|i| format!("p{i}")).collect();
    ntriples(&names.iter().map(|p| vec![p.as_str()]).collect::<Vec<_>>())
}

pub fn view_of(nt: &str) -> StructureView {
    build_view(&sortref::ntriples::parse_str(nt).unwrap()).unwrap()
}

/// View from `(bits, multiplicity)` rows over columns `p0..`.
pub fn view_from_sets(rows: &[(&str, u64)]) -> StructureView {
    let width = rows[0].0.len();
    let props = (0..width).map(|j| iri(&format!("p{j}"))).collect();
    let sets = rows
        .iter()
        .enumerate()
        .map(|(i, (b, m))| SignatureSet {
            bits: Signature::parse_bits(b).unwrap(),
            multiplicity: *m,
            sample: iri(&format!("s{i}")),
        })
        .collect();
    StructureView::from_parts(props, sets).unwrap()
}

/// A random dataset with up to `max_subjects` subjects over up to
/// `max_props` properties; every subject has at least one property.
pub fn random_dataset(rng: &mut impl Rng, max_subjects: usize, max_props: usize) -> Dataset {
    let subjects = rng.gen_range(1..=max_subjects);
    let props = rng.gen_range(1..=max_props);
    let mut triples = Vec::new();
    for s in 0..subjects {
        let mut row: Vec<bool> = (0..props).map(|_| rng.gen_bool(0.5)).collect();
        if !row.iter().any(|&b| b) {
            row[rng.gen_range(0..props)] = true;
        }
        for (p, _) in row.iter().enumerate().filter(|(_, &b)| b) {
            triples.push(Triple::new(iri(&format!("s{s}")), iri(&format!("p{p}")), "\"v\"").unwrap());
        }
    }
    triples.shuffle(rng);
    Dataset::from_triples(triples)
}

pub fn random_view(rng: &mut impl Rng, max_subjects: usize, max_props: usize) -> StructureView {
    build_view(&random_dataset(rng, max_subjects, max_props)).unwrap()
}

/// A view with 1..=`max_sigs` distinct signatures over 1..=`max_props`
/// columns and multiplicities 1..=3.
pub fn random_signature_view(rng: &mut impl Rng, max_sigs: usize, max_props: usize) -> StructureView {
    let props = rng.gen_range(1..=max_props);
    let possible = (1u32 << props) - 1;
    let want = rng.gen_range(1..=max_sigs.min(possible as usize));
    let mut codes: Vec<u32> = (1..=possible).collect();
    codes.shuffle(rng);
    codes.truncate(want);
    let bits: Vec<String> =
        codes.iter().map(|c| (0..props).map(|j| if c >> j & 1 == 1 { '1' } else { '0' }).collect()).collect();
    let rows: Vec<(&str, u64)> = bits.iter().map(|b| (b.as_str(), rng.gen_range(1..=3))).collect();
    view_from_sets(&rows)
}

fn random_atom(rng: &mut impl Rng, vars: &[Var], consts: &[String]) -> Atom {
    let pick = |rng: &mut dyn rand::RngCore| vars[rng.gen_range(0..vars.len())].clone();
    let c = consts[rng.gen_range(0..consts.len())].clone();
    match rng.gen_range(0..8) {
        0 => Atom::Val(pick(rng), rng.gen_bool(0.5)),
        1 => Atom::Prop(pick(rng), c),
        2 => Atom::Subj(pick(rng), c),
        3 => Atom::SameCell(pick(rng), pick(rng)),
        4 => Atom::SameVal(pick(rng), pick(rng)),
        5 => Atom::SameProp(pick(rng), pick(rng)),
        6 => Atom::SameSubj(pick(rng), pick(rng)),
        _ => Atom::Val(pick(rng), true),
    }
}

fn random_formula(rng: &mut impl Rng, vars: &[Var], consts: &[String], depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.35) {
        return Formula::atom(random_atom(rng, vars, consts));
    }
    match rng.gen_range(0..3) {
        0 => Formula::not(random_formula(rng, vars, consts, depth - 1)),
        1 => Formula::and(random_formula(rng, vars, consts, depth - 1), random_formula(rng, vars, consts, depth - 1)),
        _ => Formula::or(random_formula(rng, vars, consts, depth - 1), random_formula(rng, vars, consts, depth - 1)),
    }
}

/// A random rule over at most `max_vars` variables. Constants are drawn
/// from `consts`.
pub fn random_rule(rng: &mut impl Rng, max_vars: usize, consts: &[String]) -> Rule {
    let n = rng.gen_range(1..=max_vars);
    let vars: Vec<Var> = (0..n).map(|i| Var::new(format!("c{i}"))).collect();
    let ante = random_formula(rng, &vars, consts, 3);
    let used = ante.vars();
    let cons = random_formula(rng, &used, consts, 3);
    Rule::new("random", ante, cons).unwrap()
}

/// Constants for random rules: the first few columns and samples of the
/// view, plus one IRI the view does not mention.
pub fn rule_constants(view: &StructureView) -> Vec<String> {
    let mut c: Vec<String> = view.properties().iter().take(3).cloned().collect();
    c.extend(view.sets().iter().take(2).map(|s| s.sample.clone()));
    c.push(iri("absent"));
    c
}

/// Brute force over signature partitions with at most `k` blocks, each block
/// checked by enumerating cell assignments of the restricted view.
pub fn exhaustive_feasible(view: &StructureView, rule: &Rule, k: usize, theta: &Threshold) -> bool {
    SetPartitions::with_max_blocks(view.signature_count(), k).any(|labels| {
        blocks_of(&labels).iter().all(|b| sigma_naive(&view.restrict(b).unwrap(), rule).unwrap().meets(theta))
    })
}

/// Smallest k with an exhaustive refinement, if any.
pub fn exhaustive_min_k(view: &StructureView, rule: &Rule, theta: &Threshold) -> Option<usize> {
    (1..=view.signature_count()).find(|&k| exhaustive_feasible(view, rule, k, theta))
}

/// 3^n enumeration of colourings.
pub fn brute_force_3_colorable(n: usize, edges: &[(usize, usize)]) -> bool {
    let total = 3usize.pow(n as u32);
    (0..total).any(|mut code| {
        let mut colour = vec![0; n + 1];
        for c in colour.iter_mut().skip(1) {
            *c = code % 3;
            code /= 3;
        }
        edges.iter().all(|&(u, v)| colour[u] != colour[v])
    })
}

pub fn random_graph(rng: &mut impl Rng, max_nodes: usize) -> (usize, Vec<(usize, usize)>) {
    let n = rng.gen_range(1..=max_nodes);
    let p = rng.gen_range(0.2..0.9);
    let mut edges = Vec::new();
    for u in 1..=n {
        for v in u + 1..=n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    (n, edges)
}

pub fn graph(n: usize, edges: &[(usize, usize)]) -> UndirectedGraph {
    UndirectedGraph::new(n, edges.iter().copied()).unwrap()
}

/// σ of every nonempty union of signature sets, indexed by bitmask, computed
/// by cell enumeration on the restricted view.
pub struct SubsetValues {
    values: Vec<Option<sortref_core::StructurednessValue>>,
    l: usize,
}

impl SubsetValues {
    pub fn new(view: &StructureView, rule: &Rule) -> Self {
        let l = view.signature_count();
        assert!(l <= 12, "too many signatures for subset enumeration");
        let mut values = vec![None; 1 << l];
        for (mask, slot) in values.iter_mut().enumerate().skip(1) {
            let chosen: Vec<usize> = (0..l).filter(|i| mask >> i & 1 == 1).collect();
            *slot = Some(sigma_naive(&view.restrict(&chosen).unwrap(), rule).unwrap());
        }
        SubsetValues { values, l }
    }

    pub fn value(&self, chosen: &[usize]) -> &sortref_core::StructurednessValue {
        let mask: usize = chosen.iter().map(|i| 1 << i).sum();
        self.values[mask].as_ref().unwrap()
    }

    pub fn feasible(&self, k: usize, theta: &Threshold) -> bool {
        SetPartitions::with_max_blocks(self.l, k)
            .any(|labels| blocks_of(&labels).iter().all(|b| self.value(b).meets(theta)))
    }

    pub fn min_k(&self, theta: &Threshold) -> Option<usize> {
        (1..=self.l).find(|&k| self.feasible(k, theta))
    }
}
