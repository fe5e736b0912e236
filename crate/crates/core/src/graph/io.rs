//! Plain-text graph format.
//!
//! ```text
//! n m
//! u v        (m lines, 0-based ids)
//! # label u <string>
//! ```
//!
//! Other lines beginning with `#` are comments. Blank lines are ignored.

use std::fmt::Write as _;

use super::{Graph, GraphError};

const LABEL_PREFIX: &str = "# label ";

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize, GraphError> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("{what}: expected a non-negative integer, got {tok:?}")))
}

pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut labels = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim_end_matches('\r');
        if let Some(rest) = line.strip_prefix(LABEL_PREFIX) {
            let (id, label) = rest
                .split_once(' ')
                .ok_or_else(|| parse_err(lineno, "label line needs a vertex id and a label"))?;
            labels.push((parse_usize(id, lineno, "label vertex")?, label.to_string()));
            continue;
        }
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(lineno, format!("expected two integers, got {line:?}")));
        }
        match header {
            None => {
                header = Some((
                    parse_usize(toks[0], lineno, "vertex count")?,
                    parse_usize(toks[1], lineno, "edge count")?,
                ))
            }
            Some((n, _)) => {
                let u = parse_usize(toks[0], lineno, "edge endpoint")?;
                let v = parse_usize(toks[1], lineno, "edge endpoint")?;
                for w in [u, v] {
                    if w >= n {
                        return Err(parse_err(lineno, format!("endpoint {w} out of range for {n} vertices")));
                    }
                }
                if u == v {
                    return Err(parse_err(lineno, format!("self-loop at {u}")));
                }
                edges.push((u, v));
            }
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(1, "missing header line \"n m\""))?;
    if edges.len() != m {
        return Err(parse_err(
            text.lines().count(),
            format!("header announces {m} edges, found {}", edges.len()),
        ));
    }
    Graph::new(n, edges)?.with_labels(labels)
}

pub fn serialize_graph(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.vertex_count(), g.edge_count());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    for (v, l) in g.labels() {
        let _ = writeln!(out, "{LABEL_PREFIX}{v} {l}");
    }
    out
}
