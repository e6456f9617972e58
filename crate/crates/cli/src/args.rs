//! Argument types shared by the subcommands.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use aulf_core::io::{read_graph, read_labels_csv, read_matrix};
use aulf_core::{Graph, SparseOperator};
use clap::ValueEnum;
use serde::Serialize;

use crate::error::CliError;

/// Comma-separated integers; `a..b` is an inclusive range and `a..b:s` a
/// range with step `s`. Serializes as the text it was parsed from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct List(pub Vec<usize>, String);

impl Serialize for List {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.1)
    }
}

impl FromStr for List {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let int = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{t}` is not a non-negative integer"))
        };
        let mut out = Vec::new();
        for item in s.split(',').filter(|t| !t.trim().is_empty()) {
            if let Some((lo, rest)) = item.split_once("..") {
                let (hi, step) = match rest.split_once(':') {
                    Some((hi, step)) => (int(hi)?, int(step)?),
                    None => (int(rest)?, 1),
                };
                let lo = int(lo)?;
                if step == 0 || hi < lo {
                    return Err(format!("bad range `{item}`"));
                }
                out.extend((lo..=hi).step_by(step));
            } else {
                out.push(int(item)?);
            }
        }
        if out.is_empty() {
            return Err("empty list".into());
        }
        Ok(List(out, s.to_string()))
    }
}

impl fmt::Display for List {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFormat {
    Adjacency,
    Edges,
}

/// Zips two lists, broadcasting a single-entry list.
pub fn pair_lists(k: &List, l: &List) -> Result<Vec<(usize, usize)>, CliError> {
    match (k.0.len(), l.0.len()) {
        (a, b) if a == b => Ok(k.0.iter().copied().zip(l.0.iter().copied()).collect()),
        (1, _) => Ok(l.0.iter().map(|&l| (k.0[0], l)).collect()),
        (_, 1) => Ok(k.0.iter().map(|&k| (k, l.0[0])).collect()),
        (a, b) => Err(CliError::Usage(format!(
            "--k has {a} entries and --l has {b}; give equal lengths or a single value"
        ))),
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn labels_path(graph: &Path) -> PathBuf {
    let mut s = graph.as_os_str().to_owned();
    s.push(".labels.csv");
    PathBuf::from(s)
}

/// Reads a graph file, attaching `<path>.labels.csv` when it exists.
pub fn load_graph(path: &Path) -> Result<Graph, CliError> {
    let g = read_graph(&read_text(path)?)?;
    let lp = labels_path(path);
    if lp.exists() {
        let labels = read_labels_csv(&read_text(&lp)?)?;
        return Ok(g.with_labels(labels)?);
    }
    Ok(g)
}

pub fn load_matrix(path: &Path) -> Result<SparseOperator, CliError> {
    Ok(read_matrix(&read_text(path)?)?)
}
