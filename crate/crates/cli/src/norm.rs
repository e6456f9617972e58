use std::path::PathBuf;

use aulf_core::operator_norm;
use aulf_core::spectral::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use clap::Args;
use serde::Serialize;
use serde_json::json;

use crate::args::{load_matrix, Format};
use crate::error::CliError;
use crate::output::{fields, write_out, Emitter};

/// Witness entries listed in the summary.
const TOP: usize = 5;

#[derive(Args, Serialize)]
pub struct NormArgs {
    /// Matrix in the coordinate format.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

pub fn run(args: NormArgs, mut emitter: Emitter) -> Result<(), CliError> {
    emitter.configure("norm", &args);
    let m = load_matrix(&args.input)?;
    let est = operator_norm(&m, args.tol, args.max_iter, args.seed)?;
    let mut top: Vec<(usize, f64)> = est.witness.iter().copied().enumerate().collect();
    top.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
    top.truncate(TOP);
    let content = match args.format {
        Format::Csv => {
            let summary: Vec<String> = top.iter().map(|(i, v)| format!("{i}:{v:.6e}")).collect();
            emitter.text(&format!(
                "rows,cols,lower,upper,iterations,converged,witness_top\n{},{},{:.17e},{:.17e},{},{},{}\n",
                m.rows(),
                m.cols(),
                est.lower,
                est.upper,
                est.iterations,
                est.converged,
                summary.join(" ")
            ))
        }
        Format::Json => emitter.json(fields([
            ("rows", json!(m.rows())),
            ("cols", json!(m.cols())),
            ("lower", json!(est.lower)),
            ("upper", json!(est.upper)),
            ("iterations", json!(est.iterations)),
            ("converged", json!(est.converged)),
            ("witness_top", json!(top)),
        ])),
    };
    write_out(args.out.as_deref(), &content)?;
    if !est.converged {
        return Err(CliError::NotConverged(format!(
            "interval [{:e}, {:e}] wider than {:e} after {} iterations",
            est.lower, est.upper, args.tol, est.iterations
        )));
    }
    Ok(())
}
