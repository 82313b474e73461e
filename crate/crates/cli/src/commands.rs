use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use sfm_core::instances::{synth_random_grid, write_grid_spec, write_mask, DEFAULT_UNARY_RANGE, DEFAULT_WEIGHT_RANGE};
use sfm_core::solvers::{solve, Algorithm, EpsilonMode, NoObserver, SolveOutcome};

use crate::cli::{BenchArgs, GenArgs, SolveArgs};
use crate::config::{parse_dims, parse_range, BenchConfig, DecompositionKind, ProblemConfig, SolveConfig};
use crate::problem;
use crate::trace_csv;

pub const EXIT_CERTIFIED: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;

struct Run {
    outcome: SolveOutcome<f64>,
    dims: Vec<usize>,
    kind: DecompositionKind,
    r: usize,
}

fn run(cfg: &ProblemConfig, algorithm: Algorithm, mode: EpsilonMode<f64>, seed: u64) -> Result<Run> {
    let p = problem::load(cfg, seed)?;
    let solver = cfg.solver(algorithm, mode);
    let outcome = solve(&p.decomposition, &solver, &mut NoObserver).map_err(|e| anyhow!("solver failed: {e}"))?;
    Ok(Run { outcome, dims: p.spec.dims().to_vec(), kind: p.kind, r: p.decomposition.len() })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?))
}

pub fn cmd_solve(args: &SolveArgs) -> Result<i32> {
    let cfg = SolveConfig::resolve(args)?;
    let run = run(&cfg.problem, cfg.algorithm, cfg.problem.epsilon_mode, cfg.seed)?;
    let out = &run.outcome;
    if let Some(path) = &cfg.output {
        write_mask(path, &run.dims, &out.best).with_context(|| format!("cannot write mask {}", path.display()))?;
    }
    if let Some(path) = &cfg.trace {
        trace_csv::write(create(path)?, &out.trace, run.r)?;
    }
    let last = out.trace.last().expect("trace has an initial row");
    println!(
        "{} value={} gap={} iterations={} sfmd={} sfmc={} size={}",
        if out.certified { "certified" } else { "budget-exhausted" },
        out.best_value,
        out.gap,
        last.iter,
        last.sfmd_total,
        last.sfmc_total,
        out.best.len()
    );
    Ok(if out.certified { EXIT_CERTIFIED } else { EXIT_BUDGET })
}

fn cell_name(alg: Algorithm, mode: EpsilonMode<f64>, seed: u64) -> String {
    format!("trace_{alg}_{}_{seed}.csv", mode.to_string().replace(':', "-"))
}

pub fn cmd_bench(args: &BenchArgs) -> Result<i32> {
    let cfg = BenchConfig::resolve(args)?;
    let cells = cfg.cells();
    if cells.is_empty() {
        bail!("empty sweep: need at least one algorithm, epsilon mode and seed");
    }
    let threads = match std::env::var("SFM_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| anyhow!("invalid SFM_THREADS '{v}'"))?,
        Err(_) => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    let results: Vec<Result<Run>> =
        pool.install(|| cells.par_iter().map(|&(a, m, s)| run(&cfg.problem, a, m, s)).collect());

    let r = results.iter().filter_map(|r| r.as_ref().ok()).map(|r| r.r).next();
    let Some(r) = r else {
        for ((a, m, s), res) in cells.iter().zip(&results) {
            if let Err(e) = res {
                eprintln!("cell {a} {m} seed {s}: {e:#}");
            }
        }
        bail!("every bench cell failed");
    };

    let dir = cfg.output_dir.clone().unwrap_or_else(|| ".".into());
    std::fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut traces = csv::Writer::from_writer(create(&dir.join("traces.csv"))?);
    let mut header = vec!["algorithm".to_string(), "epsilon_mode".to_string(), "seed".to_string()];
    header.extend(trace_csv::header(r));
    traces.write_record(&header)?;
    let mut summary = csv::Writer::from_writer(create(&dir.join("summary.csv"))?);
    let mut sh: Vec<String> = ["algorithm", "epsilon_mode", "seed", "status", "iterations", "final_gap", "best_value"]
        .map(String::from)
        .to_vec();
    sh.extend(["sfmd_total", "sfmc_total", "sfmd_per_sfmc"].map(String::from));
    sh.extend((1..=r).map(|i| format!("sfmd_{i}")));
    sh.push("sfmd_reported".into());
    summary.write_record(&sh)?;

    for ((alg, mode, seed), res) in cells.iter().zip(&results) {
        let prefix = [alg.to_string(), mode.to_string(), seed.to_string()];
        match res {
            Ok(run) => {
                let out = &run.outcome;
                for rec in &out.trace {
                    let mut row = prefix.to_vec();
                    row.extend(trace_csv::row(rec));
                    traces.write_record(&row)?;
                }
                trace_csv::write(create(&dir.join(cell_name(*alg, *mode, *seed)))?, &out.trace, run.r)?;
                let last = out.trace.last().expect("trace has an initial row");
                let per_sfmc = if last.sfmc_total == 0 { 0.0 } else { last.sfmd_total as f64 / last.sfmc_total as f64 };
                let reported = if run.kind == DecompositionKind::FramesChains {
                    last.sfmd_per_summand[0]
                } else {
                    last.sfmd_total
                };
                let mut row = prefix.to_vec();
                row.push(if out.certified { "certified" } else { "budget-exhausted" }.into());
                row.extend([last.iter.to_string(), out.gap.to_string(), out.best_value.to_string()]);
                row.extend([last.sfmd_total.to_string(), last.sfmc_total.to_string(), per_sfmc.to_string()]);
                row.extend(last.sfmd_per_summand.iter().map(u64::to_string));
                row.push(reported.to_string());
                summary.write_record(&row)?;
            }
            Err(e) => {
                eprintln!("cell {alg} {mode} seed {seed}: {e:#}");
                let mut row = prefix.to_vec();
                row.push("error".into());
                row.extend(std::iter::repeat_n(String::new(), sh.len() - row.len()));
                summary.write_record(&row)?;
            }
        }
    }
    traces.flush()?;
    summary.flush()?;
    Ok(EXIT_CERTIFIED)
}

pub fn cmd_gen(args: &GenArgs) -> Result<i32> {
    let dims = parse_dims(&args.dims)?;
    let weights = args.weight_range.as_deref().map(parse_range).transpose()?.unwrap_or(DEFAULT_WEIGHT_RANGE);
    let unary = args.unary_range.as_deref().map(parse_range).transpose()?.unwrap_or(DEFAULT_UNARY_RANGE);
    let spec = synth_random_grid::<f64>(&dims, weights, unary, args.seed)?;
    std::fs::write(&args.output, write_grid_spec(&spec))
        .with_context(|| format!("cannot write {}", args.output.display()))?;
    Ok(EXIT_CERTIFIED)
}
