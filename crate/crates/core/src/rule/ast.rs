use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// A cell variable. Stored without the leading `$`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "${}", self.0)
    }
}

/// A term of the language. Only some pairs of terms form an atom; see
/// [`Atom::from_terms`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Zero,
    One,
    Iri(String),
    Var(Var),
    Val(Var),
    Subj(Var),
    Prop(Var),
}

/// The eight atomic formulas.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    /// `val(c) = 0` or `val(c) = 1`.
    Val(Var, bool),
    /// `prop(c) = u`.
    Prop(Var, String),
    /// `subj(c) = u`.
    Subj(Var, String),
    /// `c1 = c2`: same cell.
    SameCell(Var, Var),
    SameVal(Var, Var),
    SameProp(Var, Var),
    SameSubj(Var, Var),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{lhs} = {rhs}` is not an atomic formula")]
pub struct AtomError {
    pub lhs: String,
    pub rhs: String,
}

impl Atom {
    /// Builds the atom `lhs = rhs`, accepting either orientation of the
    /// asymmetric forms (`1 = val($c)` is the same atom as `val($c) = 1`).
    pub fn from_terms(lhs: Term, rhs: Term) -> Result<Atom, AtomError> {
        use Term::*;
        Ok(match (lhs, rhs) {
            (Val(c), Zero) | (Zero, Val(c)) => Atom::Val(c, false),
            (Val(c), One) | (One, Val(c)) => Atom::Val(c, true),
            (Prop(c), Iri(u)) | (Iri(u), Prop(c)) => Atom::Prop(c, u),
            (Subj(c), Iri(u)) | (Iri(u), Subj(c)) => Atom::Subj(c, u),
            (Var(a), Var(b)) => Atom::SameCell(a, b),
            (Val(a), Val(b)) => Atom::SameVal(a, b),
            (Prop(a), Prop(b)) => Atom::SameProp(a, b),
            (Subj(a), Subj(b)) => Atom::SameSubj(a, b),
            (l, r) => {
                return Err(AtomError {
                    lhs: alloc::format!("{}", TermDisplay(&l)),
                    rhs: alloc::format!("{}", TermDisplay(&r)),
                })
            }
        })
    }

    /// Variables of the atom, in textual order (may repeat).
    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        let (a, b) = match self {
            Atom::Val(c, _) | Atom::Prop(c, _) | Atom::Subj(c, _) => (c, None),
            Atom::SameCell(a, b) | Atom::SameVal(a, b) | Atom::SameProp(a, b) | Atom::SameSubj(a, b) => (a, Some(b)),
        };
        core::iter::once(a).chain(b)
    }
}

struct TermDisplay<'a>(&'a Term);

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Term::Zero => f.write_str("0"),
            Term::One => f.write_str("1"),
            Term::Iri(u) => write!(f, "<{u}>"),
            Term::Var(c) => write!(f, "{c}"),
            Term::Val(c) => write!(f, "val({c})"),
            Term::Subj(c) => write!(f, "subj({c})"),
            Term::Prop(c) => write!(f, "prop({c})"),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, "=")
    }
}

impl Atom {
    fn write(&self, f: &mut fmt::Formatter<'_>, eq: &str) -> fmt::Result {
        match self {
            Atom::Val(c, b) => write!(f, "val({c}) {eq} {}", u8::from(*b)),
            Atom::Prop(c, u) => write!(f, "prop({c}) {eq} <{u}>"),
            Atom::Subj(c, u) => write!(f, "subj({c}) {eq} <{u}>"),
            Atom::SameCell(a, b) => write!(f, "{a} {eq} {b}"),
            Atom::SameVal(a, b) => write!(f, "val({a}) {eq} val({b})"),
            Atom::SameProp(a, b) => write!(f, "prop({a}) {eq} prop({b})"),
            Atom::SameSubj(a, b) => write!(f, "subj({a}) {eq} subj({b})"),
        }
    }
}

/// Boolean combination of atoms. `And`/`Or` are binary and the parser
/// associates them to the left.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Self {
        Formula::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    /// Left-nested conjunction of a non-empty list.
    pub fn all(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    /// Distinct variables in order of first occurrence.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Formula::Atom(a) => {
                for v in a.vars() {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            }
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Visits every atom, left to right.
    pub fn for_each_atom<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            Formula::Atom(a) => f(a),
            Formula::Not(x) => x.for_each_atom(f),
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.for_each_atom(f);
                r.for_each_atom(f);
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Or(..) => 0,
            Formula::And(..) => 1,
            Formula::Not(_) | Formula::Atom(_) => 2,
        }
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom(a) => a.write(f, "!="),
                other => {
                    f.write_str("!")?;
                    other.write_operand(f, other.prec() < 2)
                }
            },
            Formula::And(l, r) => {
                l.write_operand(f, l.prec() < 1)?;
                f.write_str(" && ")?;
                r.write_operand(f, r.prec() <= 1)
            }
            Formula::Or(l, r) => {
                l.write_operand(f, false)?;
                f.write_str(" || ")?;
                r.write_operand(f, r.prec() == 0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("consequent uses variable not in antecedent: {0}")]
    ConsequentVar(Var),
}

/// A structuredness rule `antecedent -> consequent`.
///
/// The consequent may only mention variables of the antecedent. The name is
/// a label for reports and plays no part in evaluation or equality.
#[derive(Debug, Clone)]
pub struct Rule {
    name: String,
    antecedent: Formula,
    consequent: Formula,
    vars: Vec<Var>,
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.antecedent == other.antecedent && self.consequent == other.consequent
    }
}

impl Eq for Rule {}

impl Rule {
    pub fn new(name: impl Into<String>, antecedent: Formula, consequent: Formula) -> Result<Rule, RuleError> {
        let vars = antecedent.vars();
        for v in consequent.vars() {
            if !vars.contains(&v) {
                return Err(RuleError::ConsequentVar(v));
            }
        }
        Ok(Rule { name: name.into(), antecedent, consequent, vars })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Rule {
        self.name = name.into();
        self
    }

    pub fn antecedent(&self) -> &Formula {
        &self.antecedent
    }

    pub fn consequent(&self) -> &Formula {
        &self.consequent
    }

    /// Variables of the antecedent in order of first occurrence. Rough
    /// assignments and count tables index variables by this order.
    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, v: &Var) -> Option<usize> {
        self.vars.iter().position(|x| x == v)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.antecedent, self.consequent)
    }
}
