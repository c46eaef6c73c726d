//! The signature-compressed property-structure view.
//!
//! Rows of the subject × property matrix are grouped by their 0/1 pattern
//! (the subject's *signature*). The view keeps one entry per distinct pattern
//! together with the number of subjects sharing it and one sample subject.
//!
//! Entries are kept in canonical order: descending multiplicity, ties broken
//! by the bit pattern read left to right with `0 < 1`. Every index into
//! [`StructureView::sets`] used elsewhere in the crate refers to that order.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use thiserror::Error;

use crate::dataset::Dataset;

/// A fixed-width bit vector over the view's columns.
///
/// Bit `i` is stored most-significant-first in word `i / 64`, so comparing
/// the word vectors compares the bit strings lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    words: Vec<u64>,
    len: usize,
}

impl Signature {
    pub fn zeros(len: usize) -> Self {
        Signature { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut s = Signature::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                s.set(i);
            }
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] & (1u64 << (63 - i % 64)) != 0
    }

    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] |= 1u64 << (63 - i % 64);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of the set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// Keeps only the listed columns, in the given order.
    pub fn project(&self, columns: &[usize]) -> Signature {
        let mut out = Signature::zeros(columns.len());
        for (j, &c) in columns.iter().enumerate() {
            if self.get(c) {
                out.set(j);
            }
        }
        out
    }

    /// Parses a `0`/`1` string, first character = first column.
    pub fn parse_bits(s: &str) -> Option<Signature> {
        let mut out = Signature::zeros(s.len());
        for (i, ch) in s.bytes().enumerate() {
            match ch {
                b'0' => {}
                b'1' => out.set(i),
                _ => return None,
            }
        }
        Some(out)
    }
}

impl Ord for Signature {
    fn cmp(&self, other: &Self) -> Ordering {
        self.words.cmp(&other.words).then(self.len.cmp(&other.len))
    }
}

impl PartialOrd for Signature {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// One row pattern of the view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureSet {
    pub bits: Signature,
    pub multiplicity: u64,
    pub sample: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ViewError {
    #[error("dataset has no subject with a non-type property")]
    NoSubjects,
    #[error("view has no columns")]
    NoColumns,
    #[error("signature {index} has width {found}, expected {expected}")]
    Width { index: usize, found: usize, expected: usize },
    #[error("signature {index} has no set bit")]
    EmptySignature { index: usize },
    #[error("signature {index} has multiplicity 0")]
    ZeroMultiplicity { index: usize },
    #[error("signature {index} duplicates an earlier signature")]
    Duplicate { index: usize },
    #[error("duplicate column {0}")]
    DuplicateColumn(String),
    #[error("empty signature selection")]
    EmptySelection,
    #[error("signature index {0} out of range")]
    IndexOutOfRange(usize),
}

/// Signature-compressed subject × property matrix.
///
/// Besides the column list and the signature sets, the view remembers which
/// signature each known subject has. A view built from a dataset knows every
/// subject; a view restored from a cache only knows the sample subjects.
/// Equality compares columns and signature sets only.
#[derive(Debug, Clone)]
pub struct StructureView {
    properties: Vec<String>,
    sets: Vec<SignatureSet>,
    total: u64,
    subjects: BTreeMap<String, usize>,
}

impl PartialEq for StructureView {
    fn eq(&self, other: &Self) -> bool {
        self.properties == other.properties && self.sets == other.sets
    }
}

impl Eq for StructureView {}

/// Builds the view of `d`, excluding `rdf:type` from the columns.
///
/// Subjects that only carry type triples have an empty signature and are
/// left out; use [`build_view_reporting`] to find out which ones.
pub fn build_view(d: &Dataset) -> Result<StructureView, ViewError> {
    build_view_reporting(d).map(|(v, _)| v)
}

/// Like [`build_view`], also returning the subjects that were skipped
/// because they have no non-type property.
pub fn build_view_reporting(d: &Dataset) -> Result<(StructureView, Vec<String>), ViewError> {
    let sets = d.property_sets();
    let columns: BTreeSet<&str> = sets.values().flat_map(|s| s.iter().copied()).collect();
    if columns.is_empty() {
        return Err(ViewError::NoSubjects);
    }
    let properties: Vec<String> = columns.iter().map(|p| p.to_string()).collect();
    let col_of: BTreeMap<&str, usize> = columns.iter().enumerate().map(|(i, p)| (*p, i)).collect();

    let mut skipped = Vec::new();
    // Subjects iterate in sorted order, so the first member seen is the sample.
    let mut groups: BTreeMap<Signature, (u64, String, Vec<String>)> = BTreeMap::new();
    for (subject, props) in &sets {
        if props.is_empty() {
            skipped.push(subject.to_string());
            continue;
        }
        let mut bits = Signature::zeros(properties.len());
        for p in props {
            bits.set(col_of[p]);
        }
        let e = groups.entry(bits).or_insert_with(|| (0, subject.to_string(), Vec::new()));
        e.0 += 1;
        e.2.push(subject.to_string());
    }

    let mut members = Vec::with_capacity(groups.len());
    let mut entries = Vec::with_capacity(groups.len());
    for (bits, (multiplicity, sample, who)) in groups {
        entries.push(SignatureSet { bits, multiplicity, sample });
        members.push(who);
    }
    let order = canonical_order(&entries);
    let mut subjects = BTreeMap::new();
    let mut sorted = Vec::with_capacity(entries.len());
    for (new_idx, &old) in order.iter().enumerate() {
        for s in core::mem::take(&mut members[old]) {
            subjects.insert(s, new_idx);
        }
        sorted.push(entries[old].clone());
    }
    let total = sorted.iter().map(|s| s.multiplicity).sum();
    Ok((StructureView { properties, sets: sorted, total, subjects }, skipped))
}

fn canonical_cmp(a: &SignatureSet, b: &SignatureSet) -> Ordering {
    b.multiplicity.cmp(&a.multiplicity).then_with(|| a.bits.cmp(&b.bits))
}

fn canonical_order(entries: &[SignatureSet]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&i, &j| canonical_cmp(&entries[i], &entries[j]));
    order
}

impl StructureView {
    /// Assembles a view from explicit parts, validating every invariant and
    /// putting the signatures in canonical order.
    pub fn from_parts(properties: Vec<String>, sets: Vec<SignatureSet>) -> Result<StructureView, ViewError> {
        if properties.is_empty() {
            return Err(ViewError::NoColumns);
        }
        let mut names = BTreeSet::new();
        for p in &properties {
            if !names.insert(p.as_str()) {
                return Err(ViewError::DuplicateColumn(p.clone()));
            }
        }
        if sets.is_empty() {
            return Err(ViewError::NoSubjects);
        }
        let mut seen = BTreeSet::new();
        for (index, s) in sets.iter().enumerate() {
            if s.bits.len() != properties.len() {
                return Err(ViewError::Width { index, found: s.bits.len(), expected: properties.len() });
            }
            if s.bits.count_ones() == 0 {
                return Err(ViewError::EmptySignature { index });
            }
            if s.multiplicity == 0 {
                return Err(ViewError::ZeroMultiplicity { index });
            }
            if !seen.insert(&s.bits) {
                return Err(ViewError::Duplicate { index });
            }
        }
        let order = canonical_order(&sets);
        let sorted: Vec<SignatureSet> = order.iter().map(|&i| sets[i].clone()).collect();
        let subjects = sorted.iter().enumerate().map(|(i, s)| (s.sample.clone(), i)).collect();
        let total = sorted.iter().map(|s| s.multiplicity).sum();
        Ok(StructureView { properties, sets: sorted, total, subjects })
    }

    /// Column IRIs, in column order.
    pub fn properties(&self) -> &[String] {
        &self.properties
    }

    pub fn sets(&self) -> &[SignatureSet] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> &SignatureSet {
        &self.sets[i]
    }

    pub fn signature_count(&self) -> usize {
        self.sets.len()
    }

    pub fn property_count(&self) -> usize {
        self.properties.len()
    }

    pub fn total_subjects(&self) -> u64 {
        self.total
    }

    /// Whether subjects of signature `set` have property `col`.
    pub fn has(&self, set: usize, col: usize) -> bool {
        self.sets[set].bits.get(col)
    }

    pub fn column_index(&self, iri: &str) -> Option<usize> {
        self.properties.iter().position(|p| p == iri)
    }

    /// Signature index of a known subject.
    pub fn signature_of(&self, subject: &str) -> Option<usize> {
        self.subjects.get(subject).copied()
    }

    /// Known subjects of signature `set`, sorted. May be fewer than its
    /// multiplicity when the view came from a cache.
    pub fn known_subjects(&self, set: usize) -> Vec<&str> {
        self.subjects.iter().filter(|(_, &i)| i == set).map(|(s, _)| s.as_str()).collect()
    }

    /// Columns used by at least one of the chosen signatures, ascending.
    pub fn support_of(&self, chosen: &[usize]) -> Vec<usize> {
        (0..self.properties.len()).filter(|&c| chosen.iter().any(|&s| self.sets[s].bits.get(c))).collect()
    }

    /// The view of the sub-dataset made of the subjects of the chosen
    /// signatures. Columns no chosen subject uses disappear.
    pub fn restrict(&self, chosen: &[usize]) -> Result<StructureView, ViewError> {
        if chosen.is_empty() {
            return Err(ViewError::EmptySelection);
        }
        if let Some(&bad) = chosen.iter().find(|&&i| i >= self.sets.len()) {
            return Err(ViewError::IndexOutOfRange(bad));
        }
        let mut picked: Vec<usize> = chosen.to_vec();
        picked.sort_unstable();
        picked.dedup();
        let columns = self.support_of(&picked);
        let properties = columns.iter().map(|&c| self.properties[c].clone()).collect();
        let entries: Vec<SignatureSet> = picked
            .iter()
            .map(|&i| SignatureSet {
                bits: self.sets[i].bits.project(&columns),
                multiplicity: self.sets[i].multiplicity,
                sample: self.sets[i].sample.clone(),
            })
            .collect();
        let order = canonical_order(&entries);
        let mut remap = BTreeMap::new();
        for (new_idx, &pos) in order.iter().enumerate() {
            remap.insert(picked[pos], new_idx);
        }
        let sets = order.iter().map(|&i| entries[i].clone()).collect::<Vec<_>>();
        let subjects = self.subjects.iter().filter_map(|(s, i)| remap.get(i).map(|&j| (s.clone(), j))).collect();
        let total = sets.iter().map(|s| s.multiplicity).sum();
        Ok(StructureView { properties, sets, total, subjects })
    }

    /// Expands the view back into a 0/1 matrix, one row per subject, with
    /// signature sets in canonical order.
    pub fn matrix_rows(&self) -> impl Iterator<Item = &Signature> {
        self.sets.iter().flat_map(|s| core::iter::repeat_n(&s.bits, s.multiplicity as usize))
    }
}
