//! Edge-list graph files: a node count on the first content line, then one
//! `u v` pair per line (1-based). `#` starts a comment.

use std::io::{self, BufRead};

use sortref_core::refine::{GraphError, UndirectedGraph};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphFileError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
    #[error("missing node count")]
    MissingHeader,
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn parse_graph(input: impl BufRead) -> Result<UndirectedGraph, GraphFileError> {
    let mut n = None;
    let mut edges = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let content = line.split('#').next().unwrap_or_default().trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let syntax = |msg: &str| GraphFileError::Syntax { line: line_no, msg: msg.to_string() };
        let num = |s: &str| s.parse::<usize>().map_err(|_| syntax(&format!("`{s}` is not a node number")));
        match (n, fields.as_slice()) {
            (None, [count]) => n = Some(num(count)?),
            (None, _) => return Err(syntax("expected the node count")),
            (Some(_), [u, v]) => {
                let e = (num(u)?, num(v)?);
                // Validate edge by edge so the error points at the line.
                UndirectedGraph::new(n.unwrap(), [e])
                    .map_err(|source| GraphFileError::Graph { line: line_no, source })?;
                edges.push(e);
            }
            (Some(_), _) => return Err(syntax("expected `u v`")),
        }
    }
    let n = n.ok_or(GraphFileError::MissingHeader)?;
    UndirectedGraph::new(n, edges).map_err(|source| GraphFileError::Graph { line: 1, source })
}
