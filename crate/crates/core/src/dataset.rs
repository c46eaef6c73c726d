//! Triples, datasets and sort filtering.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

/// The `rdf:type` predicate. It never becomes a column of a structure view.
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

/// A single `(subject, predicate, object)` statement.
///
/// Subjects and predicates are stored without angle brackets; blank-node
/// subjects keep their `_:` label. Objects are opaque: an IRI or the raw
/// literal token exactly as it appeared in the input.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub object: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TripleError {
    #[error("empty subject")]
    EmptySubject,
    #[error("empty predicate")]
    EmptyPredicate,
}

impl Triple {
    pub fn new(
        subject: impl Into<String>,
        predicate: impl Into<String>,
        object: impl Into<String>,
    ) -> Result<Self, TripleError> {
        let subject = subject.into();
        let predicate = predicate.into();
        if subject.is_empty() {
            return Err(TripleError::EmptySubject);
        }
        if predicate.is_empty() {
            return Err(TripleError::EmptyPredicate);
        }
        Ok(Triple { subject, predicate, object: object.into() })
    }

    pub fn is_type(&self) -> bool {
        self.predicate == RDF_TYPE
    }
}

/// A deduplicated set of triples with its subject and property sets.
///
/// Triples keep first-occurrence order; `subjects()` and `properties()` are
/// sorted so that everything derived from them is independent of input order.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    triples: Vec<Triple>,
    lines: Vec<Option<usize>>,
    seen: BTreeSet<Triple>,
    subjects: BTreeSet<String>,
    properties: BTreeSet<String>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a dataset from triples, dropping duplicates.
    pub fn from_triples<I: IntoIterator<Item = Triple>>(triples: I) -> Self {
        let mut d = Dataset::new();
        for t in triples {
            d.insert(t, None);
        }
        d
    }

    /// Inserts a triple, remembering the source line it came from. Returns
    /// `false` when the triple was already present.
    pub fn insert(&mut self, triple: Triple, line: Option<usize>) -> bool {
        if self.seen.contains(&triple) {
            return false;
        }
        self.subjects.insert(triple.subject.clone());
        self.properties.insert(triple.predicate.clone());
        self.seen.insert(triple.clone());
        self.triples.push(triple);
        self.lines.push(line);
        true
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    /// Source line of the `i`-th triple, when it was parsed from text.
    pub fn line_of(&self, i: usize) -> Option<usize> {
        self.lines.get(i).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.seen.contains(t)
    }

    pub fn subjects(&self) -> impl Iterator<Item = &str> {
        self.subjects.iter().map(String::as_str)
    }

    pub fn properties(&self) -> impl Iterator<Item = &str> {
        self.properties.iter().map(String::as_str)
    }

    pub fn subject_count(&self) -> usize {
        self.subjects.len()
    }

    pub fn property_count(&self) -> usize {
        self.properties.len()
    }

    /// The subgraph of triples whose subject is declared `rdf:type sort`.
    ///
    /// Type triples of the selected subjects are kept.
    pub fn filter_by_sort(&self, sort: &str) -> Dataset {
        let typed: BTreeSet<&str> =
            self.triples.iter().filter(|t| t.is_type() && t.object == sort).map(|t| t.subject.as_str()).collect();
        let mut out = Dataset::new();
        for (i, t) in self.triples.iter().enumerate() {
            if typed.contains(t.subject.as_str()) {
                out.insert(t.clone(), self.line_of(i));
            }
        }
        out
    }

    /// Property sets per subject, ignoring `rdf:type`. Subjects that only
    /// carry type triples map to an empty set.
    pub fn property_sets(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut out: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for t in &self.triples {
            let e = out.entry(t.subject.as_str()).or_default();
            if !t.is_type() {
                e.insert(t.predicate.as_str());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn t(s: &str, p: &str, o: &str) -> Triple {
        Triple::new(s, p, o).unwrap()
    }

    #[test]
    fn dedup_and_index() {
        let d = Dataset::from_triples(vec![t("s1", "p", "o"), t("s2", "p", "o"), t("s1", "p", "o")]);
        assert_eq!(d.len(), 2);
        assert_eq!(d.subjects().collect::<Vec<_>>(), ["s1", "s2"]);
        assert_eq!(d.properties().collect::<Vec<_>>(), ["p"]);
    }

    #[test]
    fn empty_parts_rejected() {
        assert_eq!(Triple::new("", "p", "o"), Err(TripleError::EmptySubject));
        assert_eq!(Triple::new("s", "", "o"), Err(TripleError::EmptyPredicate));
    }

    #[test]
    fn filter_keeps_typed_subjects() {
        let d = Dataset::from_triples(vec![t("a", RDF_TYPE, "T"), t("a", "p", "o"), t("b", "q", "o")]);
        let f = d.filter_by_sort("T");
        assert_eq!(f.triples(), &[t("a", RDF_TYPE, "T"), t("a", "p", "o")]);
        assert!(d.filter_by_sort("Absent").is_empty());
    }

    #[test]
    fn filter_identity_when_all_typed() {
        let d = Dataset::from_triples(vec![
            t("a", RDF_TYPE, "T"),
            t("a", "p", "o"),
            t("b", RDF_TYPE, "T"),
            t("b", "q", "o"),
        ]);
        assert_eq!(d.filter_by_sort("T").triples(), d.triples());
    }

    #[test]
    fn property_sets_skip_type() {
        let d = Dataset::from_triples(vec![t("a", RDF_TYPE, "T"), t("b", "p", "o")]);
        let sets = d.property_sets();
        assert!(sets["a"].is_empty());
        assert_eq!(sets["b"].iter().copied().collect::<Vec<_>>(), ["p"]);
    }
}
