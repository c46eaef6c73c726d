//! Line-based N-Triples subset: `<s> <p> <o|"literal"> .` with blank nodes,
//! `#` comments and blank lines.

use std::io::{self, BufRead, Write};

use sortref_core::{Dataset, Triple};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NtError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn skip_ws(&mut self) {
        let r = self.rest();
        self.pos += r.len() - r.trim_start_matches([' ', '\t']).len();
    }

    fn iri(&mut self) -> Result<&'a str, String> {
        let r = self.rest();
        let body = r.strip_prefix('<').ok_or("expected `<`")?;
        let end = body.find('>').ok_or("unterminated IRI")?;
        let iri = &body[..end];
        if iri.is_empty() {
            return Err("empty IRI".into());
        }
        if iri.contains(|c: char| c.is_whitespace() || c == '<') {
            return Err(format!("invalid character in IRI `{iri}`"));
        }
        self.pos += end + 2;
        Ok(iri)
    }

    fn blank(&mut self) -> Result<&'a str, String> {
        let r = self.rest();
        let end = r.find([' ', '\t']).unwrap_or(r.len());
        let label = &r[..end];
        if label.len() <= 2 {
            return Err("empty blank node label".into());
        }
        self.pos += end;
        Ok(label)
    }

    fn node(&mut self) -> Result<&'a str, String> {
        if self.rest().starts_with("_:") {
            self.blank()
        } else {
            self.iri()
        }
    }

    fn literal(&mut self) -> Result<(), String> {
        let r = self.rest();
        let mut escaped = false;
        let mut end = None;
        for (i, c) in r.char_indices().skip(1) {
            match c {
                _ if escaped => escaped = false,
                '\\' => escaped = true,
                '"' => {
                    end = Some(i);
                    break;
                }
                _ => {}
            }
        }
        let mut len = end.ok_or("unterminated literal")? + 1;
        let tail = &r[len..];
        if let Some(lang) = tail.strip_prefix('@') {
            let n = lang.find(|c: char| !(c.is_ascii_alphanumeric() || c == '-')).unwrap_or(lang.len());
            if n == 0 {
                return Err("empty language tag".into());
            }
            len += 1 + n;
        } else if tail.starts_with("^^") {
            self.pos += len + 2;
            self.iri().map_err(|e| format!("datatype: {e}"))?;
            return Ok(());
        }
        self.pos += len;
        Ok(())
    }
}

fn parse_line(line: &str) -> Result<Option<Triple>, String> {
    let mut c = Cursor { s: line, pos: 0 };
    c.skip_ws();
    if c.rest().is_empty() || c.rest().starts_with('#') {
        return Ok(None);
    }
    let subject = c.node().map_err(|e| format!("subject: {e}"))?;
    c.skip_ws();
    let predicate = c.iri().map_err(|e| format!("predicate: {e}"))?;
    c.skip_ws();
    let start = c.pos;
    let object = if c.rest().starts_with('"') {
        c.literal().map_err(|e| format!("object: {e}"))?;
        &line[start..c.pos]
    } else {
        c.node().map_err(|e| format!("object: {e}"))?
    };
    c.skip_ws();
    let r = c.rest();
    let after = r.strip_prefix('.').ok_or("expected `.` after object")?;
    let after = after.trim_start_matches([' ', '\t']);
    if !(after.is_empty() || after.starts_with('#')) {
        return Err(format!("unexpected text after `.`: `{after}`"));
    }
    Triple::new(subject, predicate, object).map(Some).map_err(|e| e.to_string())
}

/// Reads a dataset, dropping duplicate triples. Errors carry 1-based line
/// numbers.
pub fn parse_ntriples(input: impl BufRead) -> Result<Dataset, NtError> {
    let mut d = Dataset::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        match parse_line(line) {
            Ok(Some(t)) => {
                d.insert(t, Some(i + 1));
            }
            Ok(None) => {}
            Err(msg) => return Err(NtError::Syntax { line: i + 1, msg }),
        }
    }
    Ok(d)
}

pub fn parse_str(s: &str) -> Result<Dataset, NtError> {
    parse_ntriples(s.as_bytes())
}

fn write_node(out: &mut impl Write, node: &str) -> io::Result<()> {
    if node.starts_with("_:") || node.starts_with('"') {
        write!(out, "{node}")
    } else {
        write!(out, "<{node}>")
    }
}

/// Writes every triple on its own line, in dataset order.
pub fn write_ntriples(d: &Dataset, mut out: impl Write) -> io::Result<()> {
    for t in d.triples() {
        write_node(&mut out, &t.subject)?;
        write!(out, " <{}> ", t.predicate)?;
        write_node(&mut out, &t.object)?;
        writeln!(out, " .")?;
    }
    Ok(())
}
