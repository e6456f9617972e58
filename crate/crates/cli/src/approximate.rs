use std::path::PathBuf;

use aulf_core::approx::{
    approximate_edge_addition, bipartite_stack_approx, complete_family_projection,
    edge_addition_split, expander_projection, regular_complement_decomposition,
    tree_truncation_approx, Expander, ProjectionSchedule,
};
use aulf_core::certificate::CSV_HEADER;
use aulf_core::graph::{random_regular, rooted_tree};
use aulf_core::io::write_matrix;
use aulf_core::{ApproximationCertificate, TreeSpec};
use clap::{Args, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{load_graph, Format, List};
use crate::error::CliError;
use crate::output::{fields, write_out, Emitter};

/// Slack when comparing the measured error with the certified bound.
const SLACK: f64 = 1e-9;

#[derive(Args)]
pub struct ApproximateArgs {
    #[command(subcommand)]
    method: MethodArgs,
}

#[derive(Args, Serialize)]
struct Common {
    /// Seed for random constructions and for the error measurement.
    #[arg(long)]
    seed: u64,
    /// Certificate output (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Also write the (first) approximant in the coordinate matrix format.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct Schedule {
    /// Even degree of the random expanders.
    #[arg(long, default_value_t = 6)]
    degree: usize,
    /// Blocks smaller than this are represented exactly.
    #[arg(long, default_value_t = 8)]
    cutoff: usize,
}

impl Schedule {
    fn with_seed(&self, seed: u64) -> ProjectionSchedule {
        ProjectionSchedule {
            degree: self.degree,
            seed,
            cutoff: self.cutoff,
        }
    }
}

#[derive(Subcommand)]
enum MethodArgs {
    /// Approximate L' - L for a supergraph obtained by admissible edge addition.
    EdgeAddition {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        supergraph: PathBuf,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Powers of an expander walk against the projection onto constants.
    ExpanderProjection {
        /// Single expander size (with --degree and --power).
        #[arg(long, conflicts_with = "sizes", required_unless_present = "sizes")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        power: Option<usize>,
        /// Family of complete-graph sizes (with --eps).
        #[arg(long, requires = "eps")]
        sizes: Option<List>,
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        schedule: Schedule,
        #[command(flatten)]
        common: Common,
    },
    /// Stacked projections against the off-diagonal block of K_{k,l}.
    BipartiteStack {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        schedule: Schedule,
        #[command(flatten)]
        common: Common,
    },
    /// Regular graph through the complete graph and its complement.
    RegularComplement {
        /// Graph file; otherwise a random regular graph from --n and --d.
        #[arg(long, conflicts_with_all = ["n", "d"])]
        graph: Option<PathBuf>,
        #[arg(long, requires = "d")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        d: Option<usize>,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        schedule: Schedule,
        #[command(flatten)]
        common: Common,
    },
    /// Column truncation of the adjacency operator of a rooted tree.
    TreeTruncation {
        #[arg(long)]
        kappa: List,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        common: Common,
    },
}

struct Outcome {
    certificates: Vec<(ApproximationCertificate, Value)>,
    common: Common,
}

fn measured(
    cert: ApproximationCertificate,
    seed: u64,
    extra: Value,
) -> Result<(ApproximationCertificate, Value), CliError> {
    Ok((cert.with_measurement(seed)?, extra))
}

pub fn run(args: ApproximateArgs, mut emitter: Emitter) -> Result<(), CliError> {
    let outcome = match args.method {
        MethodArgs::EdgeAddition {
            graph,
            supergraph,
            eps,
            common,
        } => {
            emitter.configure(
                "edge-addition",
                &json!({ "graph": graph, "supergraph": supergraph, "eps": eps, "common": common }),
            );
            let g = load_graph(&graph)?;
            let gp = load_graph(&supergraph)?;
            let split = edge_addition_split(&g, &gp)?;
            let cert = approximate_edge_addition(&split, &g, &gp, eps)?;
            let extra = json!({ "v1": split.v1 });
            Outcome {
                certificates: vec![measured(cert, common.seed, extra)?],
                common,
            }
        }
        MethodArgs::ExpanderProjection {
            n,
            power,
            sizes,
            eps,
            schedule,
            common,
        } => {
            emitter.configure(
                "expander-projection",
                &json!({
                    "n": n, "power": power, "sizes": sizes, "eps": eps,
                    "schedule": schedule, "common": common,
                }),
            );
            let certificates = match (n, sizes) {
                (Some(n), _) => {
                    let power = power.ok_or_else(|| CliError::Usage("--n needs --power".into()))?;
                    let e = Expander::new(n, schedule.degree, common.seed)?;
                    let extra = json!({ "lambda": e.spec.lambda });
                    vec![measured(
                        expander_projection(&e, power)?,
                        common.seed,
                        extra,
                    )?]
                }
                (None, Some(sizes)) => {
                    let eps = eps.ok_or_else(|| CliError::Usage("--sizes needs --eps".into()))?;
                    let fam = complete_family_projection(
                        &sizes.0,
                        eps,
                        &schedule.with_seed(common.seed),
                    )?;
                    let extra = json!({
                        "uniform_band": fam.uniform_band,
                        "block_bounds": fam.blocks.iter().map(|b| b.bound).collect::<Vec<_>>(),
                    });
                    let mut out = vec![measured(fam.projection, common.seed, extra.clone())?];
                    if let Some(lap) = fam.laplacian {
                        out.push(measured(lap, common.seed, extra)?);
                    }
                    out
                }
                (None, None) => return Err(CliError::Usage("give --n or --sizes".into())),
            };
            Outcome {
                certificates,
                common,
            }
        }
        MethodArgs::BipartiteStack {
            k,
            l,
            eps,
            schedule,
            common,
        } => {
            emitter.configure(
                "bipartite-stack",
                &json!({ "k": k, "l": l, "eps": eps, "schedule": schedule, "common": common }),
            );
            let cert = bipartite_stack_approx(k, l, eps, &schedule.with_seed(common.seed))?;
            Outcome {
                certificates: vec![measured(cert, common.seed, Value::Null)?],
                common,
            }
        }
        MethodArgs::RegularComplement {
            graph,
            n,
            d,
            eps,
            schedule,
            common,
        } => {
            emitter.configure(
                "regular-complement",
                &json!({
                    "graph": graph, "n": n, "d": d, "eps": eps,
                    "schedule": schedule, "common": common,
                }),
            );
            let g = match (graph, n, d) {
                (Some(path), _, _) => load_graph(&path)?,
                (None, Some(n), Some(d)) => random_regular(n, d, common.seed)?,
                _ => return Err(CliError::Usage("give --graph or both --n and --d".into())),
            };
            let (report, cert) =
                regular_complement_decomposition(&g, eps, &schedule.with_seed(common.seed))?;
            let extra = json!({ "identity": report });
            Outcome {
                certificates: vec![measured(cert, common.seed, extra)?],
                common,
            }
        }
        MethodArgs::TreeTruncation {
            kappa,
            depth,
            eps,
            common,
        } => {
            emitter.configure(
                "tree-truncation",
                &json!({ "kappa": kappa, "depth": depth, "eps": eps, "common": common }),
            );
            let spec = TreeSpec::new(kappa.0, depth)?;
            let t = rooted_tree(&spec)?;
            let tr = tree_truncation_approx(&t, &spec, eps)?;
            let extra = json!({
                "dropped_sup": tr.dropped_sup,
                "levels": tr.levels(&spec),
            });
            Outcome {
                certificates: vec![measured(tr.certificate, common.seed, extra)?],
                common,
            }
        }
    };
    emit(outcome, &emitter)
}

fn emit(outcome: Outcome, emitter: &Emitter) -> Result<(), CliError> {
    let common = &outcome.common;
    let mut unconverged = Vec::new();
    let content = match common.format {
        Format::Json => {
            let docs: Vec<Value> = outcome
                .certificates
                .iter()
                .map(|(cert, extra)| {
                    let mut doc = serde_json::to_value(cert.record()).expect("record serializes");
                    let obj = doc.as_object_mut().expect("record is an object");
                    obj.insert("consistent".into(), cert.is_consistent(SLACK).into());
                    let m = cert.measured.as_ref().expect("measured");
                    obj.insert("converged".into(), m.converged.into());
                    obj.insert("measured_iterations".into(), m.iterations.into());
                    if !extra.is_null() {
                        obj.insert("details".into(), extra.clone());
                    }
                    doc
                })
                .collect();
            emitter.json(fields([("certificates", Value::Array(docs))]))
        }
        Format::Csv => {
            let mut body = format!("{CSV_HEADER}\n");
            for (cert, _) in &outcome.certificates {
                body.push_str(&cert.record().csv_row());
                body.push('\n');
            }
            emitter.text(&body)
        }
    };
    for (cert, _) in &outcome.certificates {
        if !cert.measured.as_ref().is_some_and(|m| m.converged) {
            unconverged.push(cert.method.to_string());
        }
    }
    write_out(common.out.as_deref(), &content)?;
    if let Some(path) = &common.matrix {
        let (cert, _) = &outcome.certificates[0];
        write_out(Some(path), &emitter.text(&write_matrix(&cert.approximant)))?;
    }
    if let Some((cert, _)) = outcome
        .certificates
        .iter()
        .find(|(c, _)| !c.is_consistent(SLACK))
    {
        eprintln!(
            "aulf: warning: measured error {:e} exceeds the certified bound {:e} ({})",
            cert.measured.as_ref().map_or(f64::NAN, |m| m.lower),
            cert.bound,
            cert.method
        );
    }
    if !unconverged.is_empty() {
        return Err(CliError::NotConverged(format!(
            "norm estimate did not converge for {}",
            unconverged.join(", ")
        )));
    }
    Ok(())
}
