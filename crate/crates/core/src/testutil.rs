//! Fixtures and generators shared by the unit tests.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use proptest::prelude::*;

use crate::dataset::{Dataset, Triple};
use crate::rule::{Atom, Formula, Rule, Var};
use crate::view::{build_view, StructureView};

/// Fixture IRIs are bare local names.
pub fn iri(local: &str) -> String {
    local.into()
}

/// One subject per row, `s<i>` for row `i` (1-based), with the listed
/// property local names.
pub fn dataset_from_rows(rows: &[&[&str]]) -> Dataset {
    let mut triples = Vec::new();
    for (i, props) in rows.iter().enumerate() {
        for p in *props {
            triples.push(Triple::new(iri(&format!("s{}", i + 1)), iri(p), "o").unwrap());
        }
    }
    Dataset::from_triples(triples)
}

/// `n` subjects, all with the single property `p`.
pub fn uniform_rows(n: usize) -> Dataset {
    let rows: Vec<&[&str]> = (0..n).map(|_| &["p"][..]).collect();
    dataset_from_rows(&rows)
}

/// `s1` has `p` and `q`; `s2..sn` have only `p`.
pub fn one_wide_row(n: usize) -> Dataset {
    let mut rows: Vec<&[&str]> = alloc::vec![&["p", "q"][..]];
    rows.extend((1..n).map(|_| &["p"][..]));
    dataset_from_rows(&rows)
}

/// Diagonal: `s<i>` has only `p<i>`.
pub fn diagonal_rows(n: usize) -> Dataset {
    let names: Vec<String> = (1..=n).map(|i| format!("p{i}")).collect();
    let mut triples = Vec::new();
    for (i, p) in names.iter().enumerate() {
        triples.push(Triple::new(iri(&format!("s{}", i + 1)), iri(p), "o").unwrap());
    }
    Dataset::from_triples(triples)
}

/// Dataset with subjects `s0..` and properties `p0..` from a 0/1 matrix.
/// All-zero rows produce no triples.
pub fn dataset_from_matrix(rows: &[Vec<bool>]) -> Dataset {
    let mut triples = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        for (j, &b) in row.iter().enumerate() {
            if b {
                triples.push(Triple::new(iri(&format!("s{i}")), iri(&format!("p{j}")), "o").unwrap());
            }
        }
    }
    Dataset::from_triples(triples)
}

pub fn view_from_matrix(rows: &[Vec<bool>]) -> StructureView {
    build_view(&dataset_from_matrix(rows)).unwrap()
}

/// Matrices with 1..=`max_rows` rows and 1..=`max_cols` columns where every
/// row has at least one 1.
pub fn arb_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Vec<Vec<bool>>> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        proptest::collection::vec(
            proptest::collection::vec(any::<bool>(), c).prop_filter("row has a 1", |row| row.iter().any(|&b| b)),
            r,
        )
    })
}

fn constant_iris() -> Vec<String> {
    let mut out: Vec<String> = (0..4).map(|j| iri(&format!("p{j}"))).collect();
    out.extend((0..3).map(|i| iri(&format!("s{i}"))));
    out.push(iri("absent"));
    out
}

pub fn arb_atom(vars: Vec<Var>) -> impl Strategy<Value = Atom> {
    let v = proptest::sample::select(vars);
    let u = proptest::sample::select(constant_iris());
    prop_oneof![
        (v.clone(), any::<bool>()).prop_map(|(c, b)| Atom::Val(c, b)),
        (v.clone(), u.clone()).prop_map(|(c, u)| Atom::Prop(c, u)),
        (v.clone(), u).prop_map(|(c, u)| Atom::Subj(c, u)),
        (v.clone(), v.clone()).prop_map(|(a, b)| Atom::SameCell(a, b)),
        (v.clone(), v.clone()).prop_map(|(a, b)| Atom::SameVal(a, b)),
        (v.clone(), v.clone()).prop_map(|(a, b)| Atom::SameProp(a, b)),
        (v.clone(), v).prop_map(|(a, b)| Atom::SameSubj(a, b)),
    ]
}

pub fn arb_formula(vars: Vec<Var>) -> impl Strategy<Value = Formula> {
    arb_atom(vars).prop_map(Formula::Atom).prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Formula::or(l, r)),
        ]
    })
}

/// Rules over up to `max_vars` variables.
pub fn arb_rule(max_vars: usize) -> impl Strategy<Value = Rule> {
    (1..=max_vars)
        .prop_flat_map(|n| {
            let vars: Vec<Var> = (0..n).map(|i| Var::new(format!("c{i}"))).collect();
            arb_formula(vars)
        })
        .prop_flat_map(|ante| {
            let vars = ante.vars();
            (Just(ante), arb_formula(vars))
        })
        .prop_map(|(a, c)| Rule::new("random", a, c).unwrap())
}
