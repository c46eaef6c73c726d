use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use thiserror::Error;

use crate::eval::CountTable;
use crate::threshold::Threshold;
use crate::view::StructureView;

/// Default bound on `k · |table|`, the number of T variables.
pub const DEFAULT_SIZE_CAP: usize = 50_000_000;
/// Default cap on the exponents of the hash constraints.
pub const DEFAULT_EXPONENT_CAP: u32 = 63;

/// A binary variable. Sorts are numbered from 0 here and from 1 in names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    /// Signature set `sig` is placed in sort `sort`.
    X { sort: usize, sig: usize },
    /// Sort `sort` uses column `prop`.
    U { sort: usize, prop: usize },
    /// Count-table entry `tau` is active in sort `sort`.
    T { sort: usize, tau: usize },
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VarKind::X { sort, sig } => write!(f, "X_{}_{}", sort + 1, sig),
            VarKind::U { sort, prop } => write!(f, "U_{}_{}", sort + 1, prop),
            VarKind::T { sort, tau } => write!(f, "T_{}_t{}", sort + 1, tau),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `Σ_i X(i,μ) = 1`.
    Assign,
    /// `X(i,μ) − U(i,p) ≤ 0` for `p ∈ supp(μ)`.
    UseLower,
    /// `U(i,p) − Σ X(i,μ) ≤ 0` over `μ` with `p ∈ supp(μ)`.
    UseUpper,
    /// `Σ (X + U) − T ≤ 2n − 1`.
    LinkUpper,
    /// `2n·T − Σ (X + U) ≤ 0`.
    LinkLower,
    /// `Σ_τ (θ2·both − θ1·ant)·T(i,τ) ≥ 0`.
    Threshold,
    /// `hash(i) − hash(i+1) ≤ 0`.
    Symmetry,
}

/// `Σ coef·var  sense  rhs`, terms sorted by variable index, no zero
/// coefficients, no repeated variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub family: Family,
    pub terms: Vec<(usize, BigInt)>,
    pub sense: Sense,
    pub rhs: BigInt,
}

impl Constraint {
    fn new(name: String, family: Family, raw: Vec<(usize, BigInt)>, sense: Sense, rhs: BigInt) -> Self {
        let mut terms: Vec<(usize, BigInt)> = Vec::with_capacity(raw.len());
        let mut raw = raw;
        raw.sort_by_key(|t| t.0);
        for (v, c) in raw {
            match terms.last_mut() {
                Some((last, acc)) if *last == v => *acc += c,
                _ => terms.push((v, c)),
            }
        }
        terms.retain(|(_, c)| !c.is_zero());
        Constraint { name, family, terms, sense, rhs }
    }

    pub fn holds(&self, values: &[bool]) -> bool {
        let lhs: BigInt = self.terms.iter().filter(|(v, _)| values[*v]).map(|(_, c)| c).sum();
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("k must be at least 1")]
    ZeroSorts,
    #[error("model needs {needed} T variables, above the cap of {cap}")]
    TooLarge { needed: usize, cap: usize },
    #[error("count table does not belong to this view")]
    TableMismatch,
}

/// The 0-1 feasibility program for a view, count table, `k` and `θ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpModel {
    pub k: usize,
    pub theta: Threshold,
    pub rule_name: String,
    signatures: usize,
    properties: usize,
    taus: usize,
    constraints: Vec<Constraint>,
}

impl IlpModel {
    pub fn signature_count(&self) -> usize {
        self.signatures
    }

    pub fn property_count(&self) -> usize {
        self.properties
    }

    pub fn tau_count(&self) -> usize {
        self.taus
    }

    pub fn x(&self, sort: usize, sig: usize) -> usize {
        sort * self.signatures + sig
    }

    pub fn u(&self, sort: usize, prop: usize) -> usize {
        self.k * self.signatures + sort * self.properties + prop
    }

    pub fn t(&self, sort: usize, tau: usize) -> usize {
        self.k * (self.signatures + self.properties) + sort * self.taus + tau
    }

    pub fn var_count(&self) -> usize {
        self.k * (self.signatures + self.properties + self.taus)
    }

    pub fn var_kind(&self, index: usize) -> VarKind {
        let xs = self.k * self.signatures;
        let us = self.k * self.properties;
        if index < xs {
            VarKind::X { sort: index / self.signatures, sig: index % self.signatures }
        } else if index < xs + us {
            let i = index - xs;
            VarKind::U { sort: i / self.properties, prop: i % self.properties }
        } else {
            let i = index - xs - us;
            VarKind::T { sort: i / self.taus, tau: i % self.taus }
        }
    }

    pub fn var_name(&self, index: usize) -> String {
        alloc::format!("{}", self.var_kind(index))
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn count_family(&self, family: Family) -> usize {
        self.constraints.iter().filter(|c| c.family == family).count()
    }
}

/// Builds the model with the default size cap.
pub fn build_model(
    view: &StructureView,
    table: &CountTable,
    k: usize,
    theta: &Threshold,
) -> Result<IlpModel, ModelError> {
    build_model_with(view, table, k, theta, DEFAULT_SIZE_CAP, "rule")
}

pub fn build_model_with(
    view: &StructureView,
    table: &CountTable,
    k: usize,
    theta: &Threshold,
    size_cap: usize,
    rule_name: &str,
) -> Result<IlpModel, ModelError> {
    if k == 0 {
        return Err(ModelError::ZeroSorts);
    }
    if table.signature_count() != view.signature_count() || table.property_count() != view.property_count() {
        return Err(ModelError::TableMismatch);
    }
    let needed = k.saturating_mul(table.len());
    if needed > size_cap {
        return Err(ModelError::TooLarge { needed, cap: size_cap });
    }
    let mut m = IlpModel {
        k,
        theta: theta.clone(),
        rule_name: rule_name.into(),
        signatures: view.signature_count(),
        properties: view.property_count(),
        taus: table.len(),
        constraints: Vec::new(),
    };
    let one = BigInt::one;
    let mut cs = Vec::new();

    for mu in 0..m.signatures {
        let terms = (0..k).map(|i| (m.x(i, mu), one())).collect();
        cs.push(Constraint::new(alloc::format!("assign_{mu}"), Family::Assign, terms, Sense::Eq, one()));
    }

    for i in 0..k {
        for p in 0..m.properties {
            let holders: Vec<usize> = (0..m.signatures).filter(|&mu| view.has(mu, p)).collect();
            for &mu in &holders {
                cs.push(Constraint::new(
                    alloc::format!("use_{}_{}_{}", i + 1, p, mu),
                    Family::UseLower,
                    vec![(m.x(i, mu), one()), (m.u(i, p), -one())],
                    Sense::Le,
                    BigInt::zero(),
                ));
            }
            let mut terms = vec![(m.u(i, p), one())];
            terms.extend(holders.iter().map(|&mu| (m.x(i, mu), -one())));
            cs.push(Constraint::new(
                alloc::format!("used_{}_{}", i + 1, p),
                Family::UseUpper,
                terms,
                Sense::Le,
                BigInt::zero(),
            ));
        }
    }

    let n = BigInt::from(table.arity());
    let two_n = &n + &n;
    for i in 0..k {
        for (t, e) in table.entries().iter().enumerate() {
            let pairs: Vec<(usize, BigInt)> =
                e.tau.0.iter().flat_map(|&(mu, p)| [(m.x(i, mu), one()), (m.u(i, p), one())]).collect();
            let mut upper = pairs.clone();
            upper.push((m.t(i, t), -one()));
            cs.push(Constraint::new(
                alloc::format!("link_{}_t{}", i + 1, t),
                Family::LinkUpper,
                upper,
                Sense::Le,
                &two_n - 1,
            ));
            let mut lower: Vec<(usize, BigInt)> = pairs.into_iter().map(|(v, c)| (v, -c)).collect();
            lower.push((m.t(i, t), two_n.clone()));
            cs.push(Constraint::new(
                alloc::format!("active_{}_t{}", i + 1, t),
                Family::LinkLower,
                lower,
                Sense::Le,
                BigInt::zero(),
            ));
        }
    }

    let (t1, t2) = (BigInt::from(theta.numer().clone()), BigInt::from(theta.denom().clone()));
    for i in 0..k {
        let terms = table
            .entries()
            .iter()
            .enumerate()
            .map(|(t, e)| {
                let w = &t2 * BigInt::from(e.both.clone()) - &t1 * BigInt::from(e.antecedent.clone());
                (m.t(i, t), w)
            })
            .collect();
        cs.push(Constraint::new(
            alloc::format!("theta_{}", i + 1),
            Family::Threshold,
            terms,
            Sense::Ge,
            BigInt::zero(),
        ));
    }
    m.constraints = cs;
    Ok(m)
}

/// `2^(j mod cap)`.
pub fn hash_coefficient(j: usize, exponent_cap: u32) -> BigUint {
    BigUint::one() << (j % exponent_cap.max(1) as usize)
}

/// Appends `hash(i) ≤ hash(i+1)` for consecutive sorts, where
/// `hash(i) = Σ_j 2^(j mod cap) X(i,μ_j)` over signatures in canonical order.
pub fn add_symmetry_breaking(mut m: IlpModel, exponent_cap: u32) -> IlpModel {
    for i in 0..m.k.saturating_sub(1) {
        let mut terms = Vec::with_capacity(2 * m.signatures);
        for j in 0..m.signatures {
            let c = BigInt::from(hash_coefficient(j, exponent_cap));
            terms.push((m.x(i, j), c.clone()));
            terms.push((m.x(i + 1, j), -c));
        }
        let name = alloc::format!("hash_{}", i + 1);
        m.constraints.push(Constraint::new(name, Family::Symmetry, terms, Sense::Le, BigInt::zero()));
    }
    m
}

/// A 0/1 value per model variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpSolution {
    pub values: Vec<bool>,
}

impl IlpSolution {
    pub fn zeros(m: &IlpModel) -> Self {
        IlpSolution { values: vec![false; m.var_count()] }
    }
}

/// Checks every constraint of `m` against `sol`.
pub fn verify_solution(m: &IlpModel, sol: &IlpSolution) -> bool {
    sol.values.len() == m.var_count() && m.constraints.iter().all(|c| c.holds(&sol.values))
}

/// Writes the model in CPLEX LP format.
pub fn write_lp(m: &IlpModel, out: &mut impl fmt::Write) -> fmt::Result {
    writeln!(out, "\\ rule {} k={} theta={}", m.rule_name, m.k, m.theta)?;
    writeln!(out, "Minimize")?;
    writeln!(out, " obj: 0 {}", m.var_name(0))?;
    writeln!(out, "Subject To")?;
    for c in &m.constraints {
        write!(out, " {}:", c.name)?;
        if c.terms.is_empty() {
            write!(out, " 0 {}", m.var_name(0))?;
        }
        for (n, (v, coef)) in c.terms.iter().enumerate() {
            if n > 0 && n % 8 == 0 {
                write!(out, "\n   ")?;
            }
            let sign = if coef.sign() == num_bigint::Sign::Minus { '-' } else { '+' };
            let mag = coef.magnitude();
            if n == 0 && sign == '+' {
                write!(out, " ")?;
            } else {
                write!(out, " {sign} ")?;
            }
            if mag.is_one() {
                write!(out, "{}", m.var_name(*v))?;
            } else {
                write!(out, "{mag} {}", m.var_name(*v))?;
            }
        }
        let op = match c.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        writeln!(out, " {op} {}", c.rhs)?;
    }
    writeln!(out, "Binary")?;
    for v in 0..m.var_count() {
        writeln!(out, " {}", m.var_name(v))?;
    }
    writeln!(out, "End")
}
