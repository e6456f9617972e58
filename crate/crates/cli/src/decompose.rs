use std::path::PathBuf;

use aulf_core::approx::{permutation_decomposition, permutation_matrix};
use aulf_core::graph::random_regular_bipartite;
use aulf_core::operator::adjacency_matrix;
use aulf_core::spectral::schur_bound;
use aulf_core::SparseOperator;
use clap::Args;
use serde::Serialize;
use serde_json::json;

use crate::args::{load_matrix, Format};
use crate::error::CliError;
use crate::output::{fields, write_out, Emitter};

#[derive(Args, Serialize)]
pub struct DecomposeArgs {
    /// 0/1 matrix with d ones per row and column.
    #[arg(long, conflicts_with = "m", required_unless_present = "m")]
    input: Option<PathBuf>,
    /// Size of a random d-regular bipartite biadjacency matrix (needs --seed).
    #[arg(long, requires = "seed")]
    m: Option<usize>,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

pub fn run(args: DecomposeArgs, mut emitter: Emitter) -> Result<(), CliError> {
    emitter.configure("decompose", &args);
    let a = match (&args.input, args.m, args.seed) {
        (Some(path), _, _) => load_matrix(path)?,
        (None, Some(m), Some(seed)) => {
            let g = random_regular_bipartite(m, args.d, seed)?;
            let left: Vec<usize> = (0..m).collect();
            let right: Vec<usize> = (m..2 * m).collect();
            adjacency_matrix(&g).restrict(&left, &right)?
        }
        _ => return Err(CliError::Usage("give --input, or --m with --seed".into())),
    };
    let perms = permutation_decomposition(&a, args.d)?;
    let mut sum = SparseOperator::zeros(a.rows(), a.cols());
    for p in &perms {
        sum = sum.add(&permutation_matrix(p)?)?;
    }
    let exact = sum == a;
    // Row and column sums are all d, so the Schur bound is attained by the
    // all-ones vector.
    let norm = schur_bound(&a);
    let content = match args.format {
        Format::Json => emitter.json(fields([
            ("size", json!(a.rows())),
            ("d", json!(args.d)),
            ("sum_matches", json!(exact)),
            ("norm", json!(norm)),
            ("permutations", json!(perms)),
        ])),
        Format::Csv => {
            let mut body = String::from("index,permutation\n");
            for (i, p) in perms.iter().enumerate() {
                let s: Vec<String> = p.iter().map(|c| c.to_string()).collect();
                body.push_str(&format!("{i},{}\n", s.join(" ")));
            }
            emitter.text(&body)
        }
    };
    write_out(args.out.as_deref(), &content)
}
