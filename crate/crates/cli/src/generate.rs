use std::path::PathBuf;

use aulf_core::graph::{
    chain_connectors, complement, complete_bipartite, complete_graph, disjoint_union,
    plan_edge_addition, random_regular, random_regular_bipartite, rooted_tree, star_graph,
    ConnectorChoice,
};
use aulf_core::io::{write_adjacency, write_edge_list, write_labels_csv, write_matrix};
use aulf_core::operator::{
    adjacency_matrix, combinatorial_laplacian, normalized_adjacency, normalized_laplacian,
};
use aulf_core::{Graph, TreeSpec};
use clap::{Args, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::args::{labels_path, load_graph, pair_lists, GraphFormat, List};
use crate::error::CliError;
use crate::output::{fields, write_out, Emitter};

#[derive(Args)]
pub struct GenerateArgs {
    #[command(subcommand)]
    family: Family,
}

#[derive(Args, Serialize)]
pub struct GraphOut {
    /// Graph file to write (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Label CSV; defaults to `<out>.labels.csv` when the graph has labels.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = GraphFormat::Adjacency)]
    graph_format: GraphFormat,
}

#[derive(Subcommand)]
enum Family {
    /// Disjoint union of complete graphs K_n.
    Complete {
        #[arg(long)]
        sizes: List,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Disjoint union of complete bipartite graphs K_{k,l}, pairing the lists.
    Bipartite {
        #[arg(long)]
        k: List,
        #[arg(long)]
        l: List,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Disjoint union of stars K_{1,l}.
    Star {
        #[arg(long)]
        l: List,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Random d-regular graph.
    Regular {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Random d-regular bipartite graph with parts of size m.
    RegularBipartite {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Rooted tree where level-n vertices have kappa[n] children.
    Tree {
        #[arg(long)]
        kappa: List,
        #[arg(long)]
        depth: usize,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Disjoint union of graph files.
    Union {
        #[arg(long, value_delimiter = ',', required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Complement of a graph file.
    Complement {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: GraphOut,
    },
    /// Chain the components of a graph into one, in admissible phases.
    Connect {
        #[arg(long)]
        input: PathBuf,
        /// `entry:exit` per component, comma separated; lowest index by default.
        #[arg(long)]
        connectors: Option<String>,
        /// Phase plan JSON (stdout when absent).
        #[arg(long)]
        plan: Option<PathBuf>,
        /// Write the graph after this many phases instead of the final one.
        #[arg(long)]
        stage: Option<usize>,
        #[command(flatten)]
        out: GraphOut,
    },
    /// A matrix built from a graph file.
    Operator {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = OperatorKind::NormalizedLaplacian)]
        operator: OperatorKind,
        /// Matrix file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum OperatorKind {
    NormalizedLaplacian,
    NormalizedAdjacency,
    Adjacency,
    CombinatorialLaplacian,
}

fn union_of(parts: Vec<Graph>) -> Result<Graph, CliError> {
    Ok(disjoint_union(&parts)?)
}

fn write_graph(g: &Graph, out: &GraphOut, emitter: &Emitter) -> Result<(), CliError> {
    let body = match out.graph_format {
        GraphFormat::Adjacency => write_adjacency(g),
        GraphFormat::Edges => write_edge_list(g),
    };
    write_out(out.out.as_deref(), &emitter.text(&body))?;
    let labels = out.labels.clone().or_else(|| {
        out.out
            .as_deref()
            .filter(|_| g.has_labels())
            .map(labels_path)
    });
    if let Some(path) = labels {
        write_out(Some(&path), &emitter.text(&write_labels_csv(g)))?;
    }
    Ok(())
}

fn parse_connectors(s: &str) -> Result<ConnectorChoice, CliError> {
    let mut ends = Vec::new();
    for item in s.split(',') {
        let (a, b) = item
            .split_once(':')
            .ok_or_else(|| CliError::Usage(format!("connector `{item}` is not entry:exit")))?;
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("connector `{item}`: bad vertex `{t}`")))
        };
        ends.push((num(a)?, num(b)?));
    }
    Ok(ConnectorChoice::Explicit(ends))
}

pub fn run(args: GenerateArgs, mut emitter: Emitter) -> Result<(), CliError> {
    match args.family {
        Family::Complete { sizes, out } => {
            emitter.configure("complete", &json!({ "sizes": sizes, "out": out }));
            let parts = sizes
                .0
                .iter()
                .map(|&n| complete_graph(n))
                .collect::<Result<_, _>>()?;
            write_graph(&union_of(parts)?, &out, &emitter)
        }
        Family::Bipartite { k, l, out } => {
            emitter.configure("bipartite", &json!({ "k": k, "l": l, "out": out }));
            let parts = pair_lists(&k, &l)?
                .into_iter()
                .map(|(k, l)| complete_bipartite(k, l))
                .collect::<Result<_, _>>()?;
            write_graph(&union_of(parts)?, &out, &emitter)
        }
        Family::Star { l, out } => {
            emitter.configure("star", &json!({ "l": l, "out": out }));
            let parts =
                l.0.iter()
                    .map(|&l| star_graph(l))
                    .collect::<Result<_, _>>()?;
            write_graph(&union_of(parts)?, &out, &emitter)
        }
        Family::Regular { n, d, seed, out } => {
            emitter.configure(
                "regular",
                &json!({ "n": n, "d": d, "seed": seed, "out": out }),
            );
            write_graph(&random_regular(n, d, seed)?, &out, &emitter)
        }
        Family::RegularBipartite { m, d, seed, out } => {
            emitter.configure(
                "regular-bipartite",
                &json!({ "m": m, "d": d, "seed": seed, "out": out }),
            );
            write_graph(&random_regular_bipartite(m, d, seed)?, &out, &emitter)
        }
        Family::Tree { kappa, depth, out } => {
            emitter.configure(
                "tree",
                &json!({ "kappa": kappa, "depth": depth, "out": out }),
            );
            let spec = TreeSpec::new(kappa.0, depth)?;
            write_graph(&rooted_tree(&spec)?, &out, &emitter)
        }
        Family::Union { inputs, out } => {
            emitter.configure("union", &json!({ "inputs": inputs, "out": out }));
            let parts = inputs
                .iter()
                .map(|p| load_graph(p))
                .collect::<Result<_, _>>()?;
            write_graph(&union_of(parts)?, &out, &emitter)
        }
        Family::Complement { input, out } => {
            emitter.configure("complement", &json!({ "input": input, "out": out }));
            write_graph(&complement(&load_graph(&input)?), &out, &emitter)
        }
        Family::Connect {
            input,
            connectors,
            plan,
            stage,
            out,
        } => {
            emitter.configure(
                "connect",
                &json!({
                    "input": input, "connectors": connectors, "plan": plan,
                    "stage": stage, "out": out,
                }),
            );
            let g = load_graph(&input)?;
            let choice = match &connectors {
                Some(s) => parse_connectors(s)?,
                None => ConnectorChoice::LowestIndex,
            };
            let edges = chain_connectors(&g, &choice)?;
            let phase_plan = plan_edge_addition(&g, &edges)?;
            let mut stages = phase_plan.stages()?;
            let result = stages.pop().expect("stages include the base graph");
            let selected = match stage {
                Some(i) if i < stages.len() => &stages[i],
                Some(i) if i > phase_plan.phases.len() => {
                    return Err(CliError::Usage(format!(
                        "--stage {i} exceeds the {} phases of the plan",
                        phase_plan.phases.len()
                    )))
                }
                _ => &result,
            };
            let doc = emitter.json(fields([
                ("components", json!(g.components().len())),
                ("connectors", json!(edges)),
                ("phase_count", json!(phase_plan.phases.len())),
                ("phases", json!(phase_plan.phases)),
                ("connected", json!(result.is_connected())),
            ]));
            write_out(plan.as_deref(), &doc)?;
            if out.out.is_some() {
                write_graph(selected, &out, &emitter)?;
            }
            Ok(())
        }
        Family::Operator {
            input,
            operator,
            out,
        } => {
            emitter.configure(
                "operator",
                &json!({ "input": input, "operator": operator, "out": out }),
            );
            let g = load_graph(&input)?;
            let m = match operator {
                OperatorKind::NormalizedLaplacian => normalized_laplacian(&g)?,
                OperatorKind::NormalizedAdjacency => normalized_adjacency(&g)?,
                OperatorKind::Adjacency => adjacency_matrix(&g),
                OperatorKind::CombinatorialLaplacian => combinatorial_laplacian(&g),
            };
            write_out(out.as_deref(), &emitter.text(&write_matrix(&m)))
        }
    }
}
