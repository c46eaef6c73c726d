//! The standard structuredness rules and the 3-colouring gadget rule.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use super::ast::{Atom, Formula, Rule, Var};

/// A built-in rule. Dependency variants take the two property IRIs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Builtin {
    /// Coverage: fraction of cells holding a 1.
    Cov,
    /// Similarity: given a subject with property p, probability that another
    /// subject also has p.
    Sim,
    /// Probability that a subject with `p1` also has `p2`.
    Dep(String, String),
    /// Probability that a subject with `p1` or `p2` has both.
    SymDep(String, String),
    /// Probability that a subject satisfies "has `p1` implies has `p2`".
    DepDisj(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuiltinError {
    #[error("dependency rule needs two distinct properties, got {0} twice")]
    SameProperty(String),
}

impl Builtin {
    /// Short label used in reports (`cov`, `sim`, `dep`, `symdep`, `depdisj`).
    pub fn label(&self) -> &'static str {
        match self {
            Builtin::Cov => "cov",
            Builtin::Sim => "sim",
            Builtin::Dep(..) => "dep",
            Builtin::SymDep(..) => "symdep",
            Builtin::DepDisj(..) => "depdisj",
        }
    }
}

fn var(n: &str) -> Var {
    Var::new(n)
}

fn val(c: &str, b: bool) -> Formula {
    Formula::atom(Atom::Val(var(c), b))
}

fn prop(c: &str, iri: &str) -> Formula {
    Formula::atom(Atom::Prop(var(c), iri.into()))
}

fn same_subj(a: &str, b: &str) -> Formula {
    Formula::atom(Atom::SameSubj(var(a), var(b)))
}

fn same_prop(a: &str, b: &str) -> Formula {
    Formula::atom(Atom::SameProp(var(a), var(b)))
}

fn same_cell(a: &str, b: &str) -> Formula {
    Formula::atom(Atom::SameCell(var(a), var(b)))
}

fn conj(parts: Vec<Formula>) -> Formula {
    Formula::all(parts).expect("non-empty conjunction")
}

/// `subj($c1)=subj($c2) && prop($c1)=<p1> && prop($c2)=<p2>`: the common
/// prefix of the dependency rules. Allows `p1 == p2`.
pub fn same_subject_pair(p1: &str, p2: &str) -> Formula {
    conj(vec![same_subj("c1", "c2"), prop("c1", p1), prop("c2", p2)])
}

/// The dependency rule without the distinct-property check, for callers
/// that need the diagonal of a dependency table.
pub fn dep_rule_unchecked(p1: &str, p2: &str) -> Rule {
    Rule::new("dep", Formula::and(same_subject_pair(p1, p2), val("c1", true)), val("c2", true))
        .expect("dependency rule is well formed")
}

/// Returns the rule encoding `kind`.
pub fn builtin_rule(kind: &Builtin) -> Result<Rule, BuiltinError> {
    let check = |p1: &String, p2: &String| {
        if p1 == p2 {
            Err(BuiltinError::SameProperty(p1.clone()))
        } else {
            Ok(())
        }
    };
    let (antecedent, consequent) = match kind {
        Builtin::Cov => (same_cell("c", "c"), val("c", true)),
        Builtin::Sim => {
            (conj(vec![Formula::not(same_cell("c1", "c2")), same_prop("c1", "c2"), val("c1", true)]), val("c2", true))
        }
        Builtin::Dep(p1, p2) => {
            check(p1, p2)?;
            return Ok(dep_rule_unchecked(p1, p2));
        }
        Builtin::SymDep(p1, p2) => {
            check(p1, p2)?;
            (
                Formula::and(same_subject_pair(p1, p2), Formula::or(val("c1", true), val("c2", true))),
                Formula::and(val("c1", true), val("c2", true)),
            )
        }
        Builtin::DepDisj(p1, p2) => {
            check(p1, p2)?;
            (same_subject_pair(p1, p2), Formula::or(val("c1", false), val("c2", true)))
        }
    };
    Ok(Rule::new(kind.label(), antecedent, consequent).expect("built-in rules are well formed"))
}

/// The fixed 11-variable rule of the 3-colouring reduction. `ns` is the
/// namespace of the `sp1`, `sp2` and `idp` columns (for example
/// `urn:gadget:`).
pub fn gadget_rule_r0(ns: &str) -> Rule {
    let iri = |local: &str| {
        let mut s = String::from(ns);
        s.push_str(local);
        s
    };
    let (sp1, sp2, idp) = (iri("sp1"), iri("sp2"), iri("idp"));
    let not = Formula::not;

    let mut parts = Vec::new();
    for c in ["c1", "c2", "uniform", "wide", "e", "f1", "f2"] {
        parts.push(not(prop(c, &sp1)));
        parts.push(not(prop(c, &sp2)));
    }
    parts.extend([
        prop("x", &idp),
        val("x", true),
        not(same_cell("c1", "x")),
        same_subj("c1", "x"),
        val("c1", true),
        not(same_cell("c2", "x")),
        same_subj("c2", "x"),
        val("c2", true),
        not(same_cell("c1", "c2")),
        prop("y", &idp),
        val("y", false),
        same_subj("uniform", "y"),
        same_prop("uniform", "c1"),
        same_subj("wide", "y"),
        same_prop("wide", "c2"),
        prop("z", &idp),
        same_subj("z", "e"),
        same_prop("e", "c1"),
        not(same_cell("e", "c1")),
        val("e", true),
        prop("u", &idp),
        val("u", false),
        same_subj("u", "f1"),
        same_prop("f1", "c1"),
        same_subj("u", "f2"),
        same_prop("f2", "c2"),
        val("f1", true),
        val("f2", true),
    ]);
    let consequent = Formula::and(Formula::or(val("uniform", true), val("wide", true)), val("z", false));
    Rule::new("r0", conj(parts), consequent).expect("r0 is well formed")
}
