//! Text formats: graph files (`n m` then `u v w` lines) and MST dumps.

use std::fmt::Write as _;

use crate::error::GraphError;
use crate::graph::{Edge, WeightedGraph};

/// Parses a graph file. Ports follow line order. The graph must be connected.
pub fn parse_graph(text: &str) -> Result<WeightedGraph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(GraphError::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let head = numbers(hline, header, 2)?;
    let (n, m) = (head[0] as usize, head[1] as usize);
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let f = numbers(line, l, 3)?;
        let to_node = |x: u64| {
            u32::try_from(x).map_err(|_| GraphError::Parse {
                line,
                msg: format!("node {x} too large"),
            })
        };
        edges.push(Edge {
            u: to_node(f[0])?,
            v: to_node(f[1])?,
            w: f[2],
        });
    }
    if edges.len() != m {
        return Err(GraphError::Parse {
            line: hline,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    WeightedGraph::connected(n, edges)
}

fn numbers(line: usize, l: &str, want: usize) -> Result<Vec<u64>, GraphError> {
    let f: Vec<u64> = l
        .split_whitespace()
        .map(|t| t.parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|e| GraphError::Parse {
            line,
            msg: e.to_string(),
        })?;
    if f.len() != want {
        return Err(GraphError::Parse {
            line,
            msg: format!("expected {want} fields, found {}", f.len()),
        });
    }
    Ok(f)
}

pub fn write_graph(g: &WeightedGraph) -> String {
    let mut s = format!("{} {}\n", g.n(), g.m());
    for e in g.edges() {
        let _ = writeln!(s, "{} {} {}", e.u, e.v, e.w);
    }
    s
}

/// One `u v w` line per edge, sorted by weight.
pub fn dump_edges(g: &WeightedGraph, edges: &[usize]) -> String {
    let mut sorted: Vec<Edge> = edges.iter().map(|&i| g.edge(i)).collect();
    sorted.sort_by_key(|e| e.w);
    let mut s = String::new();
    for e in sorted {
        let (a, b) = e.key();
        let _ = writeln!(s, "{a} {b} {}", e.w);
    }
    s
}
