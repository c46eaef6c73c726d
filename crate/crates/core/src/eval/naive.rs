//! Reference semantics: satisfaction over concrete cells and brute-force σ.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;

use super::{EvalError, StructurednessValue};
use crate::rule::{Atom, Formula, Rule, Var};
use crate::view::StructureView;

/// Default bound on `(|S|·|P|)^n` for [`sigma_naive`].
pub const NAIVE_LIMIT: u128 = 100_000_000;

/// A subject of the expanded matrix. Subjects the view does not know by
/// name (cache-restored views only know samples) stay anonymous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteSubject {
    pub iri: Option<String>,
    pub set: usize,
}

/// The subject × property matrix with every signature set expanded to its
/// individual subjects.
#[derive(Debug, Clone)]
pub struct ConcreteMatrix<'a> {
    view: &'a StructureView,
    subjects: Vec<ConcreteSubject>,
}

impl<'a> ConcreteMatrix<'a> {
    pub fn expand(view: &'a StructureView) -> Self {
        let mut subjects = Vec::with_capacity(view.total_subjects() as usize);
        for set in 0..view.signature_count() {
            let known = view.known_subjects(set);
            let anonymous = view.set(set).multiplicity as usize - known.len();
            subjects.extend(known.into_iter().map(|s| ConcreteSubject { iri: Some(s.into()), set }));
            subjects.extend((0..anonymous).map(|_| ConcreteSubject { iri: None, set }));
        }
        ConcreteMatrix { view, subjects }
    }

    pub fn subjects(&self) -> &[ConcreteSubject] {
        &self.subjects
    }

    pub fn subject_count(&self) -> usize {
        self.subjects.len()
    }

    pub fn property_count(&self) -> usize {
        self.view.property_count()
    }

    pub fn subject_index(&self, iri: &str) -> Option<usize> {
        self.subjects.iter().position(|s| s.iri.as_deref() == Some(iri))
    }

    pub fn cell(&self, subject: usize, property: usize) -> bool {
        self.view.has(self.subjects[subject].set, property)
    }
}

/// A partial map from variables to cells `(subject, property)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VariableAssignment(BTreeMap<Var, (usize, usize)>);

impl VariableAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, v: Var, subject: usize, property: usize) -> &mut Self {
        self.0.insert(v, (subject, property));
        self
    }

    pub fn get(&self, v: &Var) -> Option<(usize, usize)> {
        self.0.get(v).copied()
    }
}

/// `(M, ρ) ⊨ φ`.
pub fn satisfies(m: &ConcreteMatrix<'_>, rho: &VariableAssignment, phi: &Formula) -> Result<bool, EvalError> {
    let lookup = |v: &Var| -> Result<(usize, usize), EvalError> {
        let (s, p) = rho.get(v).ok_or_else(|| EvalError::Unbound(v.clone()))?;
        if s >= m.subject_count() || p >= m.property_count() {
            return Err(EvalError::OutOfRange(v.clone()));
        }
        Ok((s, p))
    };
    holds(m, &lookup, phi)
}

fn holds<F>(m: &ConcreteMatrix<'_>, cell: &F, phi: &Formula) -> Result<bool, EvalError>
where
    F: Fn(&Var) -> Result<(usize, usize), EvalError>,
{
    Ok(match phi {
        Formula::Atom(a) => atom_holds(m, cell, a)?,
        Formula::Not(f) => !holds(m, cell, f)?,
        Formula::And(l, r) => holds(m, cell, l)? && holds(m, cell, r)?,
        Formula::Or(l, r) => holds(m, cell, l)? || holds(m, cell, r)?,
    })
}

fn atom_holds<F>(m: &ConcreteMatrix<'_>, cell: &F, a: &Atom) -> Result<bool, EvalError>
where
    F: Fn(&Var) -> Result<(usize, usize), EvalError>,
{
    let props = m.view.properties();
    Ok(match a {
        Atom::Val(c, b) => {
            let (s, p) = cell(c)?;
            m.cell(s, p) == *b
        }
        Atom::Prop(c, u) => props[cell(c)?.1] == *u,
        Atom::Subj(c, u) => m.subjects[cell(c)?.0].iri.as_deref() == Some(u.as_str()),
        Atom::SameCell(a, b) => cell(a)? == cell(b)?,
        Atom::SameVal(a, b) => {
            let ((s1, p1), (s2, p2)) = (cell(a)?, cell(b)?);
            m.cell(s1, p1) == m.cell(s2, p2)
        }
        Atom::SameProp(a, b) => cell(a)?.1 == cell(b)?.1,
        Atom::SameSubj(a, b) => cell(a)?.0 == cell(b)?.0,
    })
}

/// σ_r by enumerating every assignment of the rule's variables to cells.
pub fn sigma_naive(view: &StructureView, rule: &Rule) -> Result<StructurednessValue, EvalError> {
    sigma_naive_with_limit(view, rule, NAIVE_LIMIT)
}

pub fn sigma_naive_with_limit(
    view: &StructureView,
    rule: &Rule,
    limit: u128,
) -> Result<StructurednessValue, EvalError> {
    let m = ConcreteMatrix::expand(view);
    let cells = m.subject_count() * m.property_count();
    let n = rule.arity();
    let mut space: u128 = 1;
    for _ in 0..n {
        space = space.saturating_mul(cells as u128);
    }
    if space > limit {
        return Err(EvalError::TooLarge { size: space, limit });
    }

    let vars = rule.vars();
    let mut odometer = vec![0usize; n];
    let mut total = BigUint::default();
    let mut favorable = BigUint::default();
    let pcount = m.property_count();
    loop {
        let lookup = |v: &Var| -> Result<(usize, usize), EvalError> {
            let i = vars.iter().position(|x| x == v).ok_or_else(|| EvalError::Unbound(v.clone()))?;
            Ok((odometer[i] / pcount, odometer[i] % pcount))
        };
        if holds(&m, &lookup, rule.antecedent())? {
            total += 1u32;
            if holds(&m, &lookup, rule.consequent())? {
                favorable += 1u32;
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(StructurednessValue::new(favorable, total));
            }
            odometer[i] += 1;
            if odometer[i] < cells {
                break;
            }
            odometer[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::{builtin_rule, parse_formula, parse_rule, Builtin};
    use crate::testutil::{uniform_rows, one_wide_row, diagonal_rows, iri};
    use crate::threshold::Rational;
    use crate::view::build_view;

    fn sv(f: u32, t: u32) -> StructurednessValue {
        StructurednessValue::new(f.into(), t.into())
    }

    #[test]
    fn cell_clauses_on_fig1b() {
        let v = build_view(&one_wide_row(3)).unwrap();
        let m = ConcreteMatrix::expand(&v);
        let s1 = m.subject_index(&iri("s1")).unwrap();
        let (p, q) = (v.column_index(&iri("p")).unwrap(), v.column_index(&iri("q")).unwrap());
        let mut rho = VariableAssignment::new();
        rho.bind(Var::new("c"), s1, q);
        let f = |s: &str| parse_formula(s).unwrap();
        assert!(satisfies(&m, &rho, &f("val($c)=1")).unwrap());
        let q_atom = alloc::format!("prop($c)=<{}>", iri("q"));
        assert!(satisfies(&m, &rho, &f(&q_atom)).unwrap());

        let mut rho = VariableAssignment::new();
        rho.bind(Var::new("c1"), s1, p).bind(Var::new("c2"), s1, q);
        assert!(satisfies(&m, &rho, &f("subj($c1)=subj($c2)")).unwrap());
        assert!(!satisfies(&m, &rho, &f("$c1=$c2")).unwrap());
        assert!(!satisfies(&m, &rho, &f("val($c1)=val($c2) && prop($c1)=prop($c2)")).unwrap());
    }

    #[test]
    fn unbound_variable_is_an_error() {
        let v = build_view(&uniform_rows(2)).unwrap();
        let m = ConcreteMatrix::expand(&v);
        let r = satisfies(&m, &VariableAssignment::new(), &parse_formula("val($x)=1").unwrap());
        assert_eq!(r, Err(EvalError::Unbound(Var::new("x"))));
    }

    #[test]
    fn figure_values() {
        let cov = builtin_rule(&Builtin::Cov).unwrap();
        let sim = builtin_rule(&Builtin::Sim).unwrap();
        assert_eq!(sigma_naive(&build_view(&uniform_rows(3)).unwrap(), &cov).unwrap(), sv(3, 3));
        assert_eq!(sigma_naive(&build_view(&one_wide_row(3)).unwrap(), &cov).unwrap(), sv(4, 6));
        assert_eq!(sigma_naive(&build_view(&one_wide_row(3)).unwrap(), &sim).unwrap(), sv(6, 8));
        let diagonal = build_view(&diagonal_rows(3)).unwrap();
        assert_eq!(sigma_naive(&diagonal, &sim).unwrap().value(), Rational::from_integer(0u32.into()));
        assert_eq!(sigma_naive(&diagonal, &cov).unwrap(), sv(3, 9));
    }

    #[test]
    fn subject_constants_see_names() {
        let v = build_view(&one_wide_row(3)).unwrap();
        let text = alloc::format!("subj($c)=<{}> -> val($c)=1", iri("s2"));
        let r = parse_rule(&text).unwrap();
        // s2 has p but not q.
        assert_eq!(sigma_naive(&v, &r).unwrap(), sv(1, 2));
    }

    #[test]
    fn guard_refuses_large_spaces() {
        let v = build_view(&one_wide_row(3)).unwrap();
        let sim = builtin_rule(&Builtin::Sim).unwrap();
        assert!(matches!(sigma_naive_with_limit(&v, &sim, 35), Err(EvalError::TooLarge { size: 36, limit: 35 })));
    }
}
