//! Graph input: JSON (`{"n", "edges"}`) and DIMACS `.col`.

use std::path::Path;

use super::graph::Graph;
use crate::error::{Error, Result};

/// Parses DIMACS edge format (`p edge n m` then `e u v`, 1-based).
pub fn parse_dimacs(text: &str) -> Result<Graph> {
    let mut n = None;
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let mut parts = line.split_whitespace();
        match parts.next() {
            None | Some("c") => {}
            Some("p") => {
                let _fmt = parts.next();
                let v = parts.next().and_then(|s| s.parse::<usize>().ok());
                n = Some(v.ok_or_else(|| Error::Parse(format!("line {}: bad problem line", lineno + 1)))?);
            }
            Some("e") => {
                let a = parts.next().and_then(|s| s.parse::<usize>().ok());
                let b = parts.next().and_then(|s| s.parse::<usize>().ok());
                match (a, b) {
                    (Some(a), Some(b)) if a >= 1 && b >= 1 => edges.push((a - 1, b - 1)),
                    _ => return Err(Error::Parse(format!("line {}: bad edge line", lineno + 1))),
                }
            }
            Some(other) => return Err(Error::Parse(format!("line {}: unknown record '{other}'", lineno + 1))),
        }
    }
    let n = n.ok_or_else(|| Error::Parse("missing problem line".into()))?;
    // DIMACS files often list both orientations; from_edges is idempotent on those.
    Graph::from_edges(n, edges)
}

pub fn parse_graph_json(text: &str) -> Result<Graph> {
    Ok(serde_json::from_str(text)?)
}

/// Reads a graph file, choosing the format from the extension (`.col` → DIMACS).
pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "col") {
        parse_dimacs(&text)
    } else {
        parse_graph_json(&text)
    }
}
