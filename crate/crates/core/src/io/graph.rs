//! Graph snapshots as Graphviz DOT and as plain edge lists.
//!
//! Both formats start with `//` (DOT) or `#` (edge list) comment lines
//! carrying the master seed and effective configuration. Nodes and edges are
//! written in ascending id order, so identical graphs give identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{AgentId, SocialGraph};

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn comment_block(prefix: &str, header: &[String]) -> String {
    let mut out = String::new();
    for line in header {
        for part in line.lines() {
            let _ = writeln!(out, "{prefix} {part}");
        }
    }
    out
}

/// Render an undirected DOT graph; node attributes carry fitness to 6 decimals,
/// edge attributes carry `q`.
pub fn dot_string(graph: &SocialGraph, fitness: &[f64], header: &[String]) -> String {
    let mut out = comment_block("//", header);
    out.push_str("graph social {\n  node [shape=circle];\n");
    for (i, f) in fitness.iter().enumerate().take(graph.node_count()) {
        let _ = writeln!(out, "  {i} [fitness=\"{f:.6}\", label=\"{i}\\n{f:.6}\"];");
    }
    for (a, b, q) in graph.sorted_edge_list() {
        let _ = writeln!(out, "  {a} -- {b} [q=\"{q:.6}\"];");
    }
    out.push_str("}\n");
    out
}

pub fn export_dot(graph: &SocialGraph, fitness: &[f64], path: impl AsRef<Path>, header: &[String]) -> Result<()> {
    if fitness.len() != graph.node_count() {
        return Err(Error::InvalidArgument(format!(
            "{} fitness values for {} nodes",
            fitness.len(),
            graph.node_count()
        )));
    }
    write_file(path.as_ref(), &dot_string(graph, fitness, header))
}

/// Parsed snapshot: node count and `(i, j, q)` edges.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub nodes: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl Snapshot {
    pub fn to_graph(&self) -> Result<SocialGraph> {
        let mut g = SocialGraph::new(self.nodes)?;
        for &(a, b, q) in &self.edges {
            g.add_edge(AgentId(a), AgentId(b), q)?;
        }
        Ok(g)
    }
}

fn quoted_attr(stmt: &str, name: &str) -> Option<f64> {
    let start = stmt.find(&format!("{name}=\""))? + name.len() + 2;
    let end = start + stmt[start..].find('"')?;
    stmt[start..end].parse().ok()
}

/// Read back DOT produced by [`dot_string`].
pub fn parse_dot(text: &str) -> Result<Snapshot> {
    let bad = |line: usize, msg: &str| Error::Parse {
        path: "<dot>".into(),
        line,
        column: 1,
        message: msg.to_string(),
    };
    let mut nodes = 0;
    let mut edges = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with("//") || line.starts_with("graph ") || line == "}" || line.starts_with("node ") {
            continue;
        }
        let stmt = line.trim_end_matches(';');
        let head = stmt.split('[').next().unwrap_or("").trim();
        if let Some((a, b)) = head.split_once("--") {
            let a: usize = a.trim().parse().map_err(|_| bad(no + 1, "bad edge endpoint"))?;
            let b: usize = b.trim().parse().map_err(|_| bad(no + 1, "bad edge endpoint"))?;
            let q = quoted_attr(stmt, "q").ok_or_else(|| bad(no + 1, "edge without q"))?;
            edges.push((a, b, q));
        } else {
            let i: usize = head.parse().map_err(|_| bad(no + 1, "unrecognised statement"))?;
            nodes = nodes.max(i + 1);
        }
    }
    Ok(Snapshot { nodes, edges })
}

/// `# n <nodes>` followed by one `i j q` line per edge.
pub fn edge_list_string(graph: &SocialGraph, header: &[String]) -> String {
    let mut out = comment_block("#", header);
    let _ = writeln!(out, "# n {}", graph.node_count());
    for (a, b, q) in graph.sorted_edge_list() {
        let _ = writeln!(out, "{a} {b} {q}");
    }
    out
}

pub fn export_edge_list(graph: &SocialGraph, path: impl AsRef<Path>, header: &[String]) -> Result<()> {
    write_file(path.as_ref(), &edge_list_string(graph, header))
}

/// Read back an edge list. Without a `# n` line the node count is one more
/// than the largest id seen.
pub fn parse_edge_list(text: &str) -> Result<Snapshot> {
    let mut declared = None;
    let mut edges = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(n) = rest.trim().strip_prefix("n ") {
                declared = n.trim().parse().ok();
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed = match fields.as_slice() {
            [a, b, q] => a.parse().ok().zip(b.parse().ok()).zip(q.parse().ok()),
            _ => None,
        };
        let ((a, b), q): ((usize, usize), f64) = parsed.ok_or_else(|| Error::Parse {
            path: "<edge list>".into(),
            line: no + 1,
            column: 1,
            message: "expected `i j q`".into(),
        })?;
        edges.push((a, b, q));
    }
    let seen = edges.iter().map(|&(a, b, _)| a.max(b) + 1).max().unwrap_or(0);
    Ok(Snapshot { nodes: declared.unwrap_or(seen).max(seen), edges })
}
