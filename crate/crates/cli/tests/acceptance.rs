//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line to
//! stderr (bypassing the test harness capture) and fails on `FAIL`.

use std::io::Write as _;
use std::path::Path;
use std::process::Command;

use aulf_core::approx::{
    approximate_edge_addition, bipartite_block, bipartite_lower_bound, block_orthogonality_check,
    column_norm_sq, column_norms, edge_addition_split, edge_blocks, expander_projection,
    permutation_decomposition, permutation_matrix, regular_identity, tree_truncation_approx,
    Expander,
};
use aulf_core::diagnostics::{
    column_residual, greedy_truncation, t1_lower_bound, truncation_oracle, TruncationStrategy,
};
use aulf_core::graph::{
    chain_connectors, complete_bipartite, complete_graph, cycle_graph, disjoint_union,
    plan_edge_addition, random_regular, random_regular_bipartite, rooted_tree, star_graph,
    ConnectorChoice,
};
use aulf_core::operator::{adjacency_matrix, normalized_laplacian};
use aulf_core::spectral::{operator_norm_default, DEFAULT_MAX_ITER, DEFAULT_TOL};
use aulf_core::{band_profile, exact_norm_small, operator_norm, Graph, SparseOperator, TreeSpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn report(id: u32, name: &str, outcome: Check) {
    let line = match &outcome {
        Ok(detail) => format!("PASS {id:>2} {name}: {detail}"),
        Err(detail) => format!("FAIL {id:>2} {name}: {detail}"),
    };
    // Written to the raw handle so it shows up without --nocapture.
    let _ = writeln!(std::io::stderr(), "{line}");
    if let Err(detail) = outcome {
        panic!("{name}: {detail}");
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

#[test]
fn c01_laplacian_norm_at_most_two() {
    let run = || -> Check {
        let mut graphs: Vec<(String, Graph)> = Vec::new();
        for n in [2, 3, 10, 100, 500] {
            graphs.push((format!("K_{n}"), complete_graph(n).map_err(e)?));
        }
        for (k, l) in [(1, 1), (1, 500), (3, 7), (50, 200), (500, 500)] {
            graphs.push((format!("K_{k},{l}"), complete_bipartite(k, l).map_err(e)?));
        }
        for (n, d, seed) in [
            (10, 3, 1),
            (100, 4, 2),
            (500, 7, 3),
            (1000, 8, 4),
            (1000, 3, 5),
        ] {
            graphs.push((
                format!("regular({n},{d})"),
                random_regular(n, d, seed).map_err(e)?,
            ));
        }
        for (kappa, depth) in [
            (vec![1], 1),
            (vec![2, 3, 2, 3, 2], 5),
            (vec![5, 1, 5, 1, 5], 5),
            (vec![100, 2, 3], 3),
            (vec![3, 3, 3, 3, 3], 5),
        ] {
            let spec = TreeSpec::new(kappa.clone(), depth).map_err(e)?;
            graphs.push((format!("T{kappa:?}"), rooted_tree(&spec).map_err(e)?));
        }
        let mut worst: f64 = 0.0;
        for (i, (name, g)) in graphs.iter().enumerate() {
            let l = normalized_laplacian(g).map_err(e)?;
            let est = operator_norm_default(&l, i as u64).map_err(e)?;
            ensure(est.upper <= 2.0 + 1e-6, || {
                format!("{name}: upper {} exceeds 2", est.upper)
            })?;
            worst = worst.max(est.upper);
        }
        Ok(format!("{} graphs, max upper {worst:.9}", graphs.len()))
    };
    report(1, "laplacian norm", run());
}

/// Random graph on `n` vertices with a few hubs and no isolated vertices.
fn hub_graph(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    let hubs = rng.gen_range(1..=3);
    let mut edges = Vec::new();
    for h in 0..hubs {
        for v in hubs..n {
            if rng.gen_bool(0.5) {
                edges.push((h, v));
            }
        }
    }
    for u in hubs..n {
        for v in (u + 1)..n {
            if rng.gen_bool(0.06) {
                edges.push((u, v));
            }
        }
    }
    let mut g = Graph::from_edges(n, &edges).unwrap();
    if g.isolated_vertex().is_some() {
        for v in 0..n {
            if g.degree(v) == 0 {
                edges.push((v, (v + 1) % n));
            }
        }
        g = Graph::from_edges(n, &edges).unwrap();
    }
    g
}

/// A maximal random set of new edges whose endpoints are pairwise at
/// distance at least 3, so the addition is admissible in one step.
fn admissible_addition(g: &Graph, rng: &mut ChaCha8Rng) -> Graph {
    let n = g.vertex_count();
    let mut candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .filter(|&(u, v)| g.ball2(u).binary_search(&v).is_err())
        .collect();
    candidates.shuffle(rng);
    let mut blocked = vec![false; n];
    let mut chosen = Vec::new();
    for (u, v) in candidates {
        if blocked[u] || blocked[v] {
            continue;
        }
        for x in g.ball2(u).into_iter().chain(g.ball2(v)) {
            blocked[x] = true;
        }
        chosen.push((u, v));
    }
    g.with_added_edges(&chosen).unwrap()
}

#[test]
fn c02_edge_block_bound() {
    let run = || -> Check {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let (mut pairs, mut blocks) = (0, 0);
        let mut tightest = f64::INFINITY;
        while pairs < 200 {
            let n = rng.gen_range(6..=40);
            let g = hub_graph(n, &mut rng);
            let gp = admissible_addition(&g, &mut rng);
            if gp.edge_count() == g.edge_count() {
                continue;
            }
            let split = edge_addition_split(&g, &gp).map_err(e)?;
            ensure(block_orthogonality_check(&split, &g), || {
                format!("pair {pairs}: blocks do not sum to B on disjoint supports")
            })?;
            for blk in edge_blocks(&split, &g).map_err(e)? {
                let exact = exact_norm_small(&blk.block).map_err(e)?;
                let limit = 1.0 / blk.degree as f64;
                ensure(exact <= limit + 1e-10, || {
                    format!(
                        "pair {pairs}, vertex {}: ||B_v|| = {exact} > 1/{}",
                        blk.vertex, blk.degree
                    )
                })?;
                tightest = tightest.min(limit - exact);
                blocks += 1;
            }
            pairs += 1;
        }
        Ok(format!(
            "{pairs} pairs, {blocks} blocks, min slack {tightest:.3e}"
        ))
    };
    report(2, "edge block bound", run());
}

#[test]
fn c03_edge_addition_certificate() {
    let run = || -> Check {
        let parts: Vec<Graph> = [
            star_graph(1),
            star_graph(3),
            star_graph(8),
            star_graph(30),
            complete_graph(4),
            star_graph(60),
            complete_graph(12),
            star_graph(150),
        ]
        .into_iter()
        .collect::<Result<_, _>>()
        .map_err(e)?;
        let base = disjoint_union(&parts).map_err(e)?;
        let connectors = chain_connectors(&base, &ConnectorChoice::LowestIndex).map_err(e)?;
        let plan = plan_edge_addition(&base, &connectors).map_err(e)?;
        let stages = plan.stages().map_err(e)?;
        let mut checked = 0;
        let mut worst: f64 = 0.0;
        for eps in [0.5, 0.2, 0.1] {
            let cap = (1.0f64 / eps).ceil() as usize + 3;
            for (i, pair) in stages.windows(2).enumerate() {
                let split = edge_addition_split(&pair[0], &pair[1]).map_err(e)?;
                let cert = approximate_edge_addition(&split, &pair[0], &pair[1], eps)
                    .map_err(e)?
                    .with_measurement(i as u64)
                    .map_err(e)?;
                let measured = cert.measured.as_ref().unwrap().lower;
                ensure(measured <= eps, || {
                    format!("eps {eps}, stage {i}: measured {measured}")
                })?;
                let p = band_profile(&cert.approximant);
                ensure(
                    p.max_row_nonzeros <= cap && p.max_col_nonzeros <= cap,
                    || format!("eps {eps}, stage {i}: band {p:?} exceeds {cap}"),
                )?;
                worst = worst.max(measured / eps);
                checked += 1;
            }
        }
        Ok(format!(
            "{checked} stage certificates, max measured/eps {worst:.4}"
        ))
    };
    report(3, "edge-addition certificate", run());
}

#[test]
fn c04_expander_projection() {
    let run = || -> Check {
        let mut summary = Vec::new();
        for seed in [1u64, 2, 3] {
            let x = Expander::new(200, 6, seed).map_err(e)?;
            let lambda = x.spec.lambda;
            ensure(lambda < 0.9, || format!("seed {seed}: lambda {lambda}"))?;
            let mut prev = f64::INFINITY;
            for k in 1..=6 {
                let cert = expander_projection(&x, k)
                    .map_err(e)?
                    .with_measurement(seed)
                    .map_err(e)?;
                let m = cert.measured.as_ref().unwrap().lower;
                ensure(m <= lambda.powi(k as i32) + 1e-9, || {
                    format!("seed {seed}, k {k}: {m} > lambda^k")
                })?;
                ensure(m < prev, || format!("seed {seed}, k {k}: not decreasing"))?;
                prev = m;
            }
            summary.push(format!("seed {seed} lambda {lambda:.4}"));
        }
        Ok(summary.join(", "))
    };
    report(4, "expander projection", run());
}

#[test]
fn c05_bipartite_sandwich() {
    let run = || -> Check {
        let mut cases = 0;
        for k in [2, 4, 8] {
            for l in [16, 64, 256] {
                let block = bipartite_block(k, l).map_err(e)?;
                for d in [1, 2, 4] {
                    let lb = bipartite_lower_bound(k, l, d).map_err(e)?;
                    let t = truncation_oracle(&block, d, TruncationStrategy::TopMagnitude, 7)
                        .map_err(e)?;
                    ensure(lb <= t.residual.lower + 1e-9, || {
                        format!(
                            "({k},{l},{d}): bound {lb} above greedy distance {}",
                            t.residual.lower
                        )
                    })?;
                    cases += 1;
                }
            }
        }
        // Small cases against the exact optimum.
        for (k, l, d) in [(1, 8, 1), (2, 6, 1), (2, 8, 2), (2, 7, 3)] {
            let block = bipartite_block(k, l).map_err(e)?;
            let lb = bipartite_lower_bound(k, l, d).map_err(e)?;
            let t = truncation_oracle(&block, d, TruncationStrategy::Exhaustive, 0).map_err(e)?;
            ensure(lb <= t.distance() + 1e-12, || {
                format!("({k},{l},{d}): bound {lb} above optimum {}", t.distance())
            })?;
            cases += 1;
        }
        let lb = bipartite_lower_bound(2, 12, 2).map_err(e)?;
        ensure((lb - (2.0f64 / 3.0).sqrt()).abs() <= 1e-12, || {
            format!("(2,12,2): {lb}")
        })?;
        ensure(lb > 0.5, || format!("(2,12,2): {lb} not above 1/2"))?;
        Ok(format!("{cases} cases, (2,12,2) bound {lb:.15}"))
    };
    report(5, "bipartite sandwich", run());
}

#[test]
fn c06_regular_complement_identity() {
    let run = || -> Check {
        let mut graphs = vec![cycle_graph(6).map_err(e)?];
        for (i, m) in (10..=100).step_by(6).enumerate() {
            graphs.push(random_regular(m, 3, i as u64).map_err(e)?);
        }
        for m in [2, 3, 5, 10, 40, 100] {
            graphs.push(complete_graph(m).map_err(e)?);
        }
        let mut worst: f64 = 0.0;
        for g in &graphs {
            let r = regular_identity(g).map_err(e)?;
            ensure(r.max_residual <= 1e-12, || {
                format!("m {}, n {}: residual {}", r.m, r.n, r.max_residual)
            })?;
            worst = worst.max(r.max_residual);
        }
        Ok(format!("{} graphs, max residual {worst:.2e}", graphs.len()))
    };
    report(6, "regular complement identity", run());
}

#[test]
fn c07_permutation_decomposition() {
    let run = || -> Check {
        let mut cases = 0;
        for d in 1..=8usize {
            for (i, m) in [d, 50, 500].into_iter().enumerate() {
                let g = random_regular_bipartite(m, d, (10 * d + i) as u64).map_err(e)?;
                let left: Vec<usize> = (0..m).collect();
                let right: Vec<usize> = (m..2 * m).collect();
                let a = adjacency_matrix(&g).restrict(&left, &right).map_err(e)?;
                let perms = permutation_decomposition(&a, d).map_err(e)?;
                ensure(perms.len() == d, || {
                    format!("d {d}, m {m}: {} perms", perms.len())
                })?;
                let mut sum = SparseOperator::zeros(m, m);
                for p in &perms {
                    let pm = permutation_matrix(p).map_err(e)?;
                    let est = operator_norm(&pm, DEFAULT_TOL, DEFAULT_MAX_ITER, 1).map_err(e)?;
                    ensure(
                        (est.lower - 1.0).abs() <= 1e-12 && (est.upper - 1.0).abs() <= 1e-12,
                        || format!("d {d}, m {m}: permutation norm {est:?}"),
                    )?;
                    sum = sum.add(&pm).map_err(e)?;
                }
                ensure(sum == a, || format!("d {d}, m {m}: sum differs from input"))?;
                let est = operator_norm(&a, DEFAULT_TOL, DEFAULT_MAX_ITER, 3).map_err(e)?;
                let df = d as f64;
                ensure(
                    (est.lower - df).abs() <= 1e-8 && (est.upper - df).abs() <= 1e-8,
                    || format!("d {d}, m {m}: norm [{}, {}]", est.lower, est.upper),
                )?;
                cases += 1;
            }
        }
        Ok(format!("{cases} matrices, d = 1..8, sizes up to 500"))
    };
    report(7, "permutation decomposition", run());
}

/// Trees larger than this are skipped; `(100, 100, 100, 100)` alone has
/// over 10^8 vertices.
const TREE_VERTEX_LIMIT: usize = 250_000;

fn kappa_grid(depth: usize) -> Vec<Vec<usize>> {
    let values = [1, 2, 3, 100];
    let mut out = vec![vec![]];
    for _ in 0..depth {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

#[test]
fn c08_tree_truncation() {
    let run = || -> Check {
        let (mut trees, mut skipped) = (0, 0);
        for depth in 1..=4 {
            for kappa in kappa_grid(depth) {
                let spec = TreeSpec::new(kappa.clone(), depth).map_err(e)?;
                if spec.vertex_count() > TREE_VERTEX_LIMIT {
                    skipped += 1;
                    continue;
                }
                let t = rooted_tree(&spec).map_err(e)?;
                check_tree(&spec, &t).map_err(|m| format!("{kappa:?}: {m}"))?;
                trees += 1;
            }
        }
        Ok(format!(
            "{trees} trees, {skipped} skipped above {TREE_VERTEX_LIMIT} vertices"
        ))
    };
    report(8, "tree truncation", run());
}

fn check_tree(spec: &TreeSpec, t: &Graph) -> Result<(), String> {
    let first = tree_truncation_approx(t, spec, 0.5).map_err(e)?;
    let b = &first.b;
    // Off-diagonal entries of B^T B are the column inner products.
    let gram = b.transpose().multiply(b).map_err(e)?;
    let worst_ip = gram
        .entries()
        .filter(|&(r, c, _)| r != c)
        .map(|(_, _, v)| v.abs())
        .fold(0.0, f64::max);
    ensure(worst_ip <= 1e-12, || {
        format!("column inner product {worst_ip}")
    })?;
    for (v, norm) in column_norms(b).into_iter().enumerate() {
        let expected = column_norm_sq(spec, t.level(v).unwrap());
        ensure((norm * norm - expected).abs() <= 1e-12, || {
            format!("vertex {v}: squared norm {} vs {expected}", norm * norm)
        })?;
    }
    for eps in [0.5, 0.2, 0.1] {
        let tr = tree_truncation_approx(t, spec, eps).map_err(e)?;
        let diff = tr.b.sub(&tr.b_truncated).map_err(e)?;
        let est = operator_norm(&diff, DEFAULT_TOL, DEFAULT_MAX_ITER, 0).map_err(e)?;
        ensure(est.lower <= tr.dropped_sup + 1e-9, || {
            format!("eps {eps}: measured {} > sup {}", est.lower, tr.dropped_sup)
        })?;
        ensure(tr.dropped_sup < eps, || {
            format!("eps {eps}: dropped sup {}", tr.dropped_sup)
        })?;
    }
    Ok(())
}

#[test]
fn c09_star_obstruction() {
    let run = || -> Check {
        let mut min_gap = f64::INFINITY;
        for l in 10..=1000usize {
            let g = star_graph(l).map_err(e)?;
            let w = t1_lower_bound(&g, 0, 1, 10).map_err(e)?;
            let expected = ((l - 10) as f64 / l as f64).sqrt();
            ensure(w.bound == expected, || {
                format!("l {l}: bound {} vs {expected}", w.bound)
            })?;
            let lap = normalized_laplacian(&g).map_err(e)?;
            let x = greedy_truncation(&lap, 10).map_err(e)?;
            let res = column_residual(&lap, &x, 0).map_err(e)?;
            ensure(res >= w.bound - 1e-12, || {
                format!("l {l}: center residual {res} below bound {}", w.bound)
            })?;
            min_gap = min_gap.min(res - w.bound);
        }
        Ok(format!("l = 10..1000, min residual - bound {min_gap:.3e}"))
    };
    report(9, "star obstruction", run());
}

fn aulf(dir: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_aulf"))
        .current_dir(dir)
        .arg("--no-timestamp")
        .args(args)
        .output()
        .map_err(e)?;
    match out.status.code() {
        Some(0) | Some(4) => Ok(out.stdout),
        code => Err(format!(
            "`aulf {}` exited with {code:?}: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        )),
    }
}

/// Every file in `dir`, sorted by name.
fn snapshot(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(e)? {
        let entry = entry.map_err(e)?;
        let name = entry.file_name().to_string_lossy().into_owned();
        files.push((name, std::fs::read(entry.path()).map_err(e)?));
    }
    files.sort();
    Ok(files)
}

const SEEDED_COMMANDS: &[&[&str]] = &[
    &[
        "generate", "regular", "--n", "60", "--d", "4", "--seed", "9", "--out", "reg.adj",
    ],
    &[
        "generate",
        "regular-bipartite",
        "--m",
        "20",
        "--d",
        "3",
        "--seed",
        "4",
        "--out",
        "bip.adj",
    ],
    &[
        "approximate",
        "expander-projection",
        "--n",
        "80",
        "--power",
        "3",
        "--seed",
        "5",
        "--out",
        "exp.json",
        "--matrix",
        "exp.mtx",
    ],
    &[
        "approximate",
        "expander-projection",
        "--sizes",
        "2..30",
        "--eps",
        "0.3",
        "--seed",
        "6",
        "--format",
        "csv",
        "--out",
        "family.csv",
    ],
    &[
        "approximate",
        "bipartite-stack",
        "--k",
        "5",
        "--l",
        "40",
        "--eps",
        "0.3",
        "--seed",
        "7",
        "--out",
        "stack.json",
    ],
    &[
        "approximate",
        "regular-complement",
        "--n",
        "30",
        "--d",
        "26",
        "--eps",
        "0.3",
        "--seed",
        "8",
        "--out",
        "regc.json",
    ],
    &[
        "approximate",
        "tree-truncation",
        "--kappa",
        "2,100,2",
        "--depth",
        "3",
        "--eps",
        "0.2",
        "--seed",
        "1",
        "--out",
        "tree.json",
    ],
    &[
        "generate",
        "operator",
        "--input",
        "reg.adj",
        "--operator",
        "normalized-laplacian",
        "--out",
        "lap.mtx",
    ],
    &[
        "norm", "--input", "lap.mtx", "--seed", "3", "--out", "norm.csv",
    ],
    &[
        "decompose",
        "--m",
        "40",
        "--d",
        "5",
        "--seed",
        "2",
        "--out",
        "perm.json",
    ],
    &[
        "diagnose",
        "star",
        "--l",
        "10..200:10",
        "--r",
        "10",
        "--sandwich",
        "sandwich.csv",
        "--out",
        "star.csv",
    ],
];

#[test]
fn c10_determinism() {
    let run = || -> Check {
        let a = tempfile::tempdir().map_err(e)?;
        let b = tempfile::tempdir().map_err(e)?;
        let mut files = 0;
        for args in SEEDED_COMMANDS {
            let first = aulf(a.path(), args)?;
            let second = aulf(b.path(), args)?;
            ensure(first == second, || format!("stdout of {args:?} differs"))?;
        }
        let (sa, sb) = (snapshot(a.path())?, snapshot(b.path())?);
        ensure(sa.len() == sb.len(), || "file sets differ".into())?;
        for ((na, ba), (nb, bb)) in sa.iter().zip(&sb) {
            ensure(na == nb && ba == bb, || {
                format!("{na} differs between runs")
            })?;
            files += 1;
        }
        Ok(format!(
            "{} commands, {files} output files byte-identical",
            SEEDED_COMMANDS.len()
        ))
    };
    report(10, "determinism", run());
}
