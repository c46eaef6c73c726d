//! Pairwise dependency tables and the symmetric-dependency ranking.

use std::fmt::Write;

use sortref_core::eval::EvalError;
use sortref_core::rule::builtin::dep_rule_unchecked;
use sortref_core::{builtin_rule, sigma_fast, Builtin, StructureView, StructurednessValue};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DepTableError {
    #[error("unknown property `{0}`")]
    Unknown(String),
    #[error("property name `{name}` is ambiguous: {candidates}")]
    Ambiguous { name: String, candidates: String },
    #[error("need at least one property")]
    Empty,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Local name of an IRI: the part after the last `#`, `/` or `:`.
pub fn local_name(iri: &str) -> &str {
    iri.rsplit(['#', '/', ':']).next().unwrap_or(iri)
}

/// Resolves a property given as `<iri>`, a full column IRI or a unique local
/// name. A bracketed IRI is accepted even when no subject holds it.
pub fn resolve_property(view: &StructureView, name: &str) -> Result<String, DepTableError> {
    if let Some(iri) = name.strip_prefix('<').and_then(|s| s.strip_suffix('>')) {
        return Ok(iri.to_string());
    }
    if view.column_index(name).is_some() {
        return Ok(name.to_string());
    }
    let hits: Vec<&String> = view.properties().iter().filter(|p| local_name(p) == name).collect();
    match hits.as_slice() {
        [one] => Ok((*one).clone()),
        [] => Err(DepTableError::Unknown(name.to_string())),
        many => Err(DepTableError::Ambiguous {
            name: name.to_string(),
            candidates: many.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "),
        }),
    }
}

#[derive(Debug, Clone)]
pub struct DependencyTable {
    pub properties: Vec<String>,
    /// `dep[i][j]` is the value of the dependency rule from `properties[i]`
    /// to `properties[j]`.
    pub dep: Vec<Vec<StructurednessValue>>,
    /// Unordered pairs `(i, j)`, `i < j`, by descending value; ties keep
    /// pair order.
    pub symdep: Vec<(usize, usize, StructurednessValue)>,
}

pub fn dependency_table(view: &StructureView, properties: Vec<String>) -> Result<DependencyTable, DepTableError> {
    if properties.is_empty() {
        return Err(DepTableError::Empty);
    }
    let mut dep = Vec::with_capacity(properties.len());
    for p1 in &properties {
        let row =
            properties.iter().map(|p2| sigma_fast(view, &dep_rule_unchecked(p1, p2))).collect::<Result<Vec<_>, _>>()?;
        dep.push(row);
    }
    let mut symdep = Vec::new();
    for i in 0..properties.len() {
        for j in i + 1..properties.len() {
            if properties[i] == properties[j] {
                continue;
            }
            let rule = builtin_rule(&Builtin::SymDep(properties[i].clone(), properties[j].clone()))
                .expect("distinct properties");
            symdep.push((i, j, sigma_fast(view, &rule)?));
        }
    }
    symdep.sort_by_key(|e| std::cmp::Reverse(e.2.value()));
    Ok(DependencyTable { properties, dep, symdep })
}

impl DependencyTable {
    pub fn to_text(&self) -> String {
        let names: Vec<&str> = self.properties.iter().map(|p| local_name(p)).collect();
        let mut out = String::new();
        writeln!(out, "dep\t{}", names.join("\t")).unwrap();
        for (i, row) in self.dep.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}\t{}", names[i], cells.join("\t")).unwrap();
        }
        writeln!(out).unwrap();
        writeln!(out, "rank\tsymdep\tvalue").unwrap();
        for (rank, (i, j, v)) in self.symdep.iter().enumerate() {
            writeln!(out, "{}\t{} {}\t{}", rank + 1, names[*i], names[*j], v).unwrap();
        }
        out
    }
}
