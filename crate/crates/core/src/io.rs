//! Text formats for graphs, vertex labels and matrices.
//!
//! Graphs:
//!
//! ```text
//! vertices 3
//! 0: 1 2
//! 1: 0
//! 2: 0
//! ```
//!
//! or an edge list (`<u> <v>` per line, optional `vertices <n>` header).
//! Matrices use a coordinate format with a `matrix <rows> <cols> <nnz>` header
//! and `<row> <col> <value>` lines, values printed with 17 significant digits
//! so that reading back is bit-exact. Lines starting with `#` are comments in
//! every format.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, VertexLabel};
use crate::operator::SparseOperator;

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        reason: format!("expected {what}, found `{tok}`"),
    })
}

fn parse_vertex_header(rest: &str, line: usize) -> Result<usize> {
    let mut toks = rest.split_whitespace();
    let n = toks.next().ok_or(Error::Parse {
        line,
        reason: "missing vertex count".into(),
    })?;
    let n = parse_num(n, line, "vertex count")?;
    if let Some(extra) = toks.next() {
        return Err(Error::Parse {
            line,
            reason: format!("unexpected token `{extra}` after vertex count"),
        });
    }
    Ok(n)
}

fn graph_error_at(line: usize) -> impl Fn(Error) -> Error {
    move |e| Error::Parse {
        line,
        reason: e.to_string(),
    }
}

pub fn write_adjacency(g: &Graph) -> String {
    let mut out = format!("vertices {}\n", g.vertex_count());
    for v in 0..g.vertex_count() {
        write!(out, "{v}:").unwrap();
        for w in g.neighbors(v) {
            write!(out, " {w}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("vertices {}\n", g.vertex_count());
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

/// Reads either graph format, detected from the first data line after the
/// header.
pub fn read_graph(text: &str) -> Result<Graph> {
    let is_adjacency = data_lines(text)
        .find(|(_, l)| !l.starts_with("vertices"))
        .is_some_and(|(_, l)| l.contains(':'));
    if is_adjacency {
        read_adjacency(text)
    } else {
        read_edge_list(text)
    }
}

pub fn read_adjacency(text: &str) -> Result<Graph> {
    let mut lines = data_lines(text);
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        reason: "empty input".into(),
    })?;
    let rest = header.strip_prefix("vertices").ok_or(Error::Parse {
        line: hline,
        reason: "expected `vertices <n>` header".into(),
    })?;
    let n = parse_vertex_header(rest, hline)?;
    let mut adjacency: Vec<Option<Vec<usize>>> = vec![None; n];
    let mut last_line = hline;
    for (line, l) in lines {
        last_line = line;
        let (head, tail) = l.split_once(':').ok_or(Error::Parse {
            line,
            reason: "expected `<vertex>: <neighbors>`".into(),
        })?;
        let v: usize = parse_num(head.trim(), line, "vertex index")?;
        if v >= n {
            return Err(Error::Parse {
                line,
                reason: format!("vertex {v} out of range for {n} vertices"),
            });
        }
        let nbrs = tail
            .split_whitespace()
            .map(|t| parse_num(t, line, "neighbor index"))
            .collect::<Result<Vec<usize>>>()?;
        if nbrs.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::Parse {
                line,
                reason: "neighbors must be strictly increasing".into(),
            });
        }
        if adjacency[v].replace(nbrs).is_some() {
            return Err(Error::Parse {
                line,
                reason: format!("vertex {v} listed twice"),
            });
        }
    }
    let adjacency = adjacency
        .into_iter()
        .enumerate()
        .map(|(v, a)| {
            a.ok_or(Error::Parse {
                line: last_line,
                reason: format!("vertex {v} has no adjacency line"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Graph::from_adjacency(adjacency).map_err(graph_error_at(last_line))
}

pub fn read_edge_list(text: &str) -> Result<Graph> {
    let mut declared = None;
    let mut edges: Vec<Edge> = Vec::new();
    let mut last_line = 0;
    for (line, l) in data_lines(text) {
        last_line = line;
        if let Some(rest) = l.strip_prefix("vertices") {
            if declared.is_some() || !edges.is_empty() {
                return Err(Error::Parse {
                    line,
                    reason: "`vertices` header must come first".into(),
                });
            }
            declared = Some(parse_vertex_header(rest, line)?);
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::Parse {
                line,
                reason: "expected `<u> <v>`".into(),
            });
        }
        let u = parse_num(toks[0], line, "vertex index")?;
        let v = parse_num(toks[1], line, "vertex index")?;
        edges.push((u, v));
    }
    let n = declared.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
    Graph::from_edges(n, &edges).map_err(graph_error_at(last_line))
}

/// `vertex,component,level,boundary` with empty fields for missing values.
pub fn write_labels_csv(g: &Graph) -> String {
    let mut out = String::from("vertex,component,level,boundary\n");
    for (v, l) in g.labels().iter().enumerate() {
        let opt = |x: Option<usize>| x.map(|x| x.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{v},{},{},{}",
            opt(l.component),
            opt(l.level),
            l.boundary
        )
        .unwrap();
    }
    out
}

pub fn read_labels_csv(text: &str) -> Result<Vec<VertexLabel>> {
    let mut out = Vec::new();
    for (line, l) in data_lines(text).skip(1) {
        let fields: Vec<&str> = l.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line,
                reason: "expected 4 comma-separated fields".into(),
            });
        }
        let v: usize = parse_num(fields[0], line, "vertex index")?;
        if v != out.len() {
            return Err(Error::Parse {
                line,
                reason: format!("expected vertex {}, found {v}", out.len()),
            });
        }
        let opt = |s: &str| -> Result<Option<usize>> {
            if s.is_empty() {
                Ok(None)
            } else {
                parse_num(s, line, "integer").map(Some)
            }
        };
        out.push(VertexLabel {
            component: opt(fields[1])?,
            level: opt(fields[2])?,
            boundary: parse_num(fields[3], line, "boolean")?,
        });
    }
    Ok(out)
}

pub fn write_matrix(m: &SparseOperator) -> String {
    let mut out = format!("matrix {} {} {}\n", m.rows(), m.cols(), m.nnz());
    for (r, c, v) in m.entries() {
        writeln!(out, "{r} {c} {v:.16e}").unwrap();
    }
    out
}

pub fn read_matrix(text: &str) -> Result<SparseOperator> {
    let mut lines = data_lines(text);
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        reason: "empty input".into(),
    })?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "matrix" {
        return Err(Error::Parse {
            line: hline,
            reason: "expected `matrix <rows> <cols> <nnz>` header".into(),
        });
    }
    let rows: usize = parse_num(toks[1], hline, "row count")?;
    let cols: usize = parse_num(toks[2], hline, "column count")?;
    let nnz: usize = parse_num(toks[3], hline, "nonzero count")?;
    let mut triplets = Vec::with_capacity(nnz);
    let mut seen = std::collections::HashSet::new();
    for (line, l) in lines {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 3 {
            return Err(Error::Parse {
                line,
                reason: "expected `<row> <col> <value>`".into(),
            });
        }
        let r: usize = parse_num(t[0], line, "row index")?;
        let c: usize = parse_num(t[1], line, "column index")?;
        let v: f64 = parse_num(t[2], line, "value")?;
        if r >= rows || c >= cols {
            return Err(Error::Parse {
                line,
                reason: format!("entry ({r}, {c}) outside a {rows}x{cols} matrix"),
            });
        }
        if !seen.insert((r, c)) {
            return Err(Error::Parse {
                line,
                reason: format!("entry ({r}, {c}) repeated"),
            });
        }
        triplets.push((r, c, v));
    }
    if triplets.len() != nnz {
        return Err(Error::Parse {
            line: hline,
            reason: format!("header declares {nnz} entries, found {}", triplets.len()),
        });
    }
    SparseOperator::from_triplets(rows, cols, triplets)
}
