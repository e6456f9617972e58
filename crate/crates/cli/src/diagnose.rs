use std::path::PathBuf;

use aulf_core::approx::bipartite_lower_bound;
use aulf_core::diagnostics::{
    column_residual, greedy_truncation, report_csv, t1_lower_bound, ObstructionWitness,
};
use aulf_core::graph::{complete_bipartite, complete_graph, rooted_tree, star_graph};
use aulf_core::operator::normalized_laplacian;
use aulf_core::{Graph, TreeSpec};
use clap::{Args, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{load_graph, pair_lists, Format, List};
use crate::error::CliError;
use crate::output::{fields, write_out, Emitter};

#[derive(Args)]
pub struct DiagnoseArgs {
    #[command(subcommand)]
    family: Family,
}

#[derive(Args, Serialize)]
struct Common {
    /// Column budgets of the competing band-sparse operators.
    #[arg(long)]
    r: List,
    /// Report output (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Also check each bound against a greedy truncation of the member's
    /// Laplacian and write `vertex,r,bound,column_residual,holds` here.
    #[arg(long)]
    sandwich: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Family {
    /// Stars K_{1,l}; the witness is each center.
    Star {
        #[arg(long)]
        l: List,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Complete graphs K_n; the witness is each member's first vertex.
    Complete {
        #[arg(long)]
        sizes: List,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Complete bipartite K_{k,l}; the witness is a vertex of the k-side.
    Bipartite {
        #[arg(long)]
        k: List,
        #[arg(long)]
        l: List,
        /// Degree threshold; defaults to each member's k.
        #[arg(long)]
        threshold: Option<usize>,
        /// Band grid for the block lower bound `k,l,d,bound` file.
        #[arg(long, requires = "block_bounds")]
        d: Option<List>,
        #[arg(long)]
        block_bounds: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Rooted tree; the witness is the first vertex of each level.
    Tree {
        #[arg(long)]
        kappa: List,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Any graph file and vertex list.
    Graph {
        #[arg(long)]
        input: PathBuf,
        /// Vertices to report; all when absent.
        #[arg(long)]
        vertices: Option<List>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
}

/// A family member: its graph, the witness vertex and the threshold.
struct Member {
    graph: Graph,
    vertex: usize,
    k: usize,
}

/// Witnesses with vertex indices shifted to the disjoint union of members.
fn report(members: &[Member], r_grid: &[usize]) -> Result<Vec<ObstructionWitness>, CliError> {
    let mut rows = Vec::new();
    let mut offset = 0;
    for m in members {
        for &r in r_grid {
            let mut w = t1_lower_bound(&m.graph, m.vertex, m.k, r)?;
            w.vertex += offset;
            rows.push(w);
        }
        offset += m.graph.vertex_count();
    }
    Ok(rows)
}

fn sandwich(members: &[Member], r_grid: &[usize]) -> Result<String, CliError> {
    let mut out = String::from("vertex,r,bound,column_residual,holds\n");
    let mut offset = 0;
    for m in members {
        let l = normalized_laplacian(&m.graph)?;
        for &r in r_grid {
            let w = t1_lower_bound(&m.graph, m.vertex, m.k, r)?;
            let x = greedy_truncation(&l, r)?;
            let res = column_residual(&l, &x, m.vertex)?;
            out.push_str(&format!(
                "{},{},{:.17e},{:.17e},{}\n",
                m.vertex + offset,
                r,
                w.bound,
                res,
                w.bound <= res + 1e-12
            ));
        }
        offset += m.graph.vertex_count();
    }
    Ok(out)
}

fn witness_json(w: &ObstructionWitness) -> Value {
    let mut v = serde_json::to_value(w).expect("witness serializes");
    let obj = v.as_object_mut().expect("witness is an object");
    obj.insert("ratio".into(), w.ratio().into());
    obj.insert("ratio_k".into(), w.ratio_k().into());
    v
}

pub fn run(args: DiagnoseArgs, mut emitter: Emitter) -> Result<(), CliError> {
    let mut block_file = None;
    let (members, common) = match args.family {
        Family::Star { l, k, common } => {
            emitter.configure("star", &json!({ "l": l, "k": k, "common": common }));
            let members =
                l.0.iter()
                    .map(|&l| {
                        Ok(Member {
                            graph: star_graph(l)?,
                            vertex: 0,
                            k,
                        })
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
            (members, common)
        }
        Family::Complete { sizes, k, common } => {
            emitter.configure(
                "complete",
                &json!({ "sizes": sizes, "k": k, "common": common }),
            );
            let members = sizes
                .0
                .iter()
                .map(|&n| {
                    Ok(Member {
                        graph: complete_graph(n)?,
                        vertex: 0,
                        k,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            (members, common)
        }
        Family::Bipartite {
            k,
            l,
            threshold,
            d,
            block_bounds,
            common,
        } => {
            emitter.configure(
                "bipartite",
                &json!({
                    "k": k, "l": l, "threshold": threshold, "d": d,
                    "block_bounds": block_bounds, "common": common,
                }),
            );
            let pairs = pair_lists(&k, &l)?;
            if let Some(path) = block_bounds {
                let grid = d.map(|d| d.0).unwrap_or_else(|| common.r.0.clone());
                let mut body = String::from("k,l,d,bound\n");
                for &(k, l) in &pairs {
                    for &d in &grid {
                        body.push_str(&format!(
                            "{k},{l},{d},{:.17e}\n",
                            bipartite_lower_bound(k, l, d)?
                        ));
                    }
                }
                block_file = Some((path, body));
            }
            let members = pairs
                .into_iter()
                .map(|(k, l)| {
                    Ok(Member {
                        graph: complete_bipartite(k, l)?,
                        vertex: 0,
                        k: threshold.unwrap_or(k),
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            (members, common)
        }
        Family::Tree {
            kappa,
            depth,
            k,
            common,
        } => {
            emitter.configure(
                "tree",
                &json!({ "kappa": kappa, "depth": depth, "k": k, "common": common }),
            );
            let spec = TreeSpec::new(kappa.0, depth)?;
            let t = rooted_tree(&spec)?;
            let mut starts = vec![0];
            for size in spec.level_sizes() {
                starts.push(starts.last().unwrap() + size);
            }
            starts.pop();
            report_single(t, starts, k, common, &emitter)?;
            return Ok(());
        }
        Family::Graph {
            input,
            vertices,
            k,
            common,
        } => {
            emitter.configure(
                "graph",
                &json!({ "input": input, "vertices": vertices, "k": k, "common": common }),
            );
            let g = load_graph(&input)?;
            let vs = vertices.map_or_else(|| (0..g.vertex_count()).collect(), |v| v.0);
            report_single(g, vs, k, common, &emitter)?;
            return Ok(());
        }
    };
    let rows = report(&members, &common.r.0)?;
    if let Some((path, body)) = block_file {
        write_out(Some(&path), &emitter.text(&body))?;
    }
    if let Some(path) = &common.sandwich {
        write_out(Some(path), &emitter.text(&sandwich(&members, &common.r.0)?))?;
    }
    write_report(&rows, &common, &emitter)
}

/// Reports for several vertices of one graph.
fn report_single(
    g: Graph,
    vertices: Vec<usize>,
    k: usize,
    common: Common,
    emitter: &Emitter,
) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for &v in &vertices {
        for &r in &common.r.0 {
            rows.push(t1_lower_bound(&g, v, k, r)?);
        }
    }
    if let Some(path) = &common.sandwich {
        // One graph: check every requested vertex against the same truncation.
        let l = normalized_laplacian(&g)?;
        let mut body = String::from("vertex,r,bound,column_residual,holds\n");
        for &r in &common.r.0 {
            let x = greedy_truncation(&l, r)?;
            for &v in &vertices {
                let w = t1_lower_bound(&g, v, k, r)?;
                let res = column_residual(&l, &x, v)?;
                body.push_str(&format!(
                    "{v},{r},{:.17e},{:.17e},{}\n",
                    w.bound,
                    res,
                    w.bound <= res + 1e-12
                ));
            }
        }
        write_out(Some(path), &emitter.text(&body))?;
    }
    write_report(&rows, &common, emitter)
}

fn write_report(
    rows: &[ObstructionWitness],
    common: &Common,
    emitter: &Emitter,
) -> Result<(), CliError> {
    let content = match common.format {
        Format::Csv => emitter.text(&report_csv(rows)),
        Format::Json => emitter.json(fields([(
            "witnesses",
            Value::Array(rows.iter().map(witness_json).collect()),
        )])),
    };
    write_out(common.out.as_deref(), &content)
}
