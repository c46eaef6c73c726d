//! Plain-text signature cache (`SIGV1`).
//!
//! ```text
//! SIGV1 <n_props> <n_sigs>
//! <prop_1>\t<prop_2>\t...
//! <bits>\t<multiplicity>\t<sample>
//! ```
//!
//! The first bit of each bitstring is the first column.

use std::io::{self, BufRead, Write};

use sortref_core::view::{SignatureSet, ViewError};
use sortref_core::{Signature, StructureView};
use thiserror::Error;

pub const MAGIC: &str = "SIGV1";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("unsupported cache version `{0}`, expected {MAGIC}")]
    Version(String),
    #[error("malformed cache at line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("invalid view in cache: {0}")]
    View(#[from] ViewError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn malformed(line: usize, msg: impl Into<String>) -> CacheError {
    CacheError::Malformed { line, msg: msg.into() }
}

pub fn save_view(view: &StructureView, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{MAGIC} {} {}", view.property_count(), view.signature_count())?;
    writeln!(out, "{}", view.properties().join("\t"))?;
    for s in view.sets() {
        writeln!(out, "{}\t{}\t{}", s.bits, s.multiplicity, s.sample)?;
    }
    Ok(())
}

pub fn load_view(input: impl BufRead) -> Result<StructureView, CacheError> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?.ok_or_else(|| malformed(1, "empty file"))?;
    let mut head = header.split(' ');
    let magic = head.next().unwrap_or_default();
    if magic != MAGIC {
        return Err(if magic.starts_with("SIGV") {
            CacheError::Version(magic.to_string())
        } else {
            malformed(1, "missing SIGV header")
        });
    }
    let mut count = |what: &str| -> Result<usize, CacheError> {
        head.next().and_then(|t| t.parse().ok()).ok_or_else(|| malformed(1, format!("bad {what} count")))
    };
    let n_props = count("property")?;
    let n_sigs = count("signature")?;
    if head.next().is_some() {
        return Err(malformed(1, "trailing fields in header"));
    }

    let props_line = lines.next().transpose()?.ok_or_else(|| malformed(2, "missing property line"))?;
    let properties: Vec<String> =
        if props_line.is_empty() { Vec::new() } else { props_line.split('\t').map(String::from).collect() };
    if properties.len() != n_props {
        return Err(malformed(2, format!("{} properties, header says {n_props}", properties.len())));
    }

    let mut sets = Vec::with_capacity(n_sigs);
    for i in 0..n_sigs {
        let line_no = i + 3;
        let line = lines
            .next()
            .transpose()?
            .ok_or_else(|| malformed(line_no, format!("truncated: {i} of {n_sigs} signatures")))?;
        let fields: Vec<&str> = line.split('\t').collect();
        let [bits, mult, sample] = fields[..] else {
            return Err(malformed(line_no, "expected bits, multiplicity and sample"));
        };
        let bits = Signature::parse_bits(bits).ok_or_else(|| malformed(line_no, "bad bitstring"))?;
        let multiplicity = mult.parse().map_err(|_| malformed(line_no, "bad multiplicity"))?;
        if sample.is_empty() {
            return Err(malformed(line_no, "empty sample subject"));
        }
        sets.push(SignatureSet { bits, multiplicity, sample: sample.to_string() });
    }
    if let Some(extra) = lines.next().transpose()? {
        if !extra.is_empty() {
            return Err(malformed(n_sigs + 3, "trailing data"));
        }
    }
    Ok(StructureView::from_parts(properties, sets)?)
}
