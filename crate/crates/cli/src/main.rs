use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use open_ended_tree::bench::{self, BenchOp, BenchSpec, Structure};
use open_ended_tree::oracle::{self, FuzzPlan};
use open_ended_tree::Config;

#[derive(Parser)]
#[command(name = "oet", version, about = "Open-ended tree demo, benchmarks and fuzzing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StructureArg {
    Tree,
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum OpArg {
    Insert,
    Lookup,
}

#[derive(Subcommand)]
enum Command {
    /// Print the tree after each of the inserts 1..=10.
    Demo,
    /// Time lookups or insert+undo cycles on a prepopulated structure.
    ///
    /// `--structure`, `--prepopulate` and `--op` accept comma-separated
    /// lists; one row is produced per combination.
    Bench {
        #[arg(long, value_enum, value_delimiter = ',', required = true)]
        structure: Vec<StructureArg>,
        #[arg(long, value_delimiter = ',', required = true)]
        prepopulate: Vec<u64>,
        #[arg(long)]
        reps: u64,
        #[arg(long, value_enum, value_delimiter = ',', required = true)]
        op: Vec<OpArg>,
        #[arg(long, default_value_t = 1)]
        start_depth: u32,
        #[arg(long)]
        compact_leaves: bool,
        #[arg(long)]
        depth_annotated: bool,
        /// Write rows to this file (header included) instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Append to `--csv` rather than overwrite it.
        #[arg(long, requires = "csv")]
        append: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Differential fuzzing of tree, list and reference model.
    ///
    /// Without any of the configuration options every combination of start
    /// depth {1,2,3,10} and variant flags is fuzzed; with any of them, only
    /// that configuration.
    Fuzz {
        #[arg(long)]
        ops: u64,
        #[arg(long)]
        seed: u64,
        /// Run this many consecutive seeds starting at `--seed`.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long)]
        start_depth: Option<u32>,
        #[arg(long)]
        compact_leaves: bool,
        #[arg(long)]
        depth_annotated: bool,
    },
    /// Check linear (list) versus logarithmic (tree) growth in a bench CSV.
    Trend {
        #[arg(long)]
        csv: PathBuf,
        /// Also check wall-time ratios.
        #[arg(long)]
        time: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Demo => {
            print!("{}", bench::demo());
            Ok(true)
        }
        Command::Bench {
            structure,
            prepopulate,
            reps,
            op,
            start_depth,
            compact_leaves,
            depth_annotated,
            csv,
            append,
            seed,
        } => {
            let mut rows = Vec::new();
            for &s in &structure {
                for &k in &prepopulate {
                    for &o in &op {
                        let spec = BenchSpec {
                            structure: match s {
                                StructureArg::Tree => Structure::Tree,
                                StructureArg::List => Structure::List,
                            },
                            start_depth,
                            compact_leaves,
                            depth_annotated,
                            prepopulate: k,
                            reps,
                            op: match o {
                                OpArg::Insert => BenchOp::Insert,
                                OpArg::Lookup => BenchOp::Lookup,
                            },
                            seed,
                        };
                        rows.push(bench::run_bench(&spec)?);
                    }
                }
            }
            match csv {
                Some(path) if append => bench::append_csv_file(&path, &rows),
                Some(path) => bench::write_csv_file(&path, &rows),
                None => bench::write_csv(io::stdout().lock(), &rows),
            }
            .context("writing CSV")?;
            Ok(true)
        }
        Command::Fuzz {
            ops,
            seed,
            seeds,
            start_depth,
            compact_leaves,
            depth_annotated,
        } => {
            if seeds < 1 {
                bail!("--seeds must be at least 1");
            }
            let grid = if start_depth.is_none() && !compact_leaves && !depth_annotated {
                Config::grid(&[1, 2, 3, 10])
            } else {
                vec![Config::with_start_depth(start_depth.unwrap_or(1))
                    .compact_leaves(compact_leaves)
                    .depth_annotated(depth_annotated)]
            };
            let mut out = io::stdout().lock();
            writeln!(out, "generator: {}", oracle::GENERATOR)?;
            writeln!(out, "configurations: {}", grid.len())?;
            let mut clean = true;
            for s in seed..seed + seeds {
                let plan = FuzzPlan {
                    grid: grid.clone(),
                    ..FuzzPlan::full_grid(s, ops)
                };
                let report = oracle::differential_run(&plan)?;
                writeln!(
                    out,
                    "seed {}: ops {} divergences {} max_len {}",
                    report.seed,
                    report.ops_executed,
                    report.divergences.len(),
                    report.max_len
                )?;
                for d in report.divergences.iter().take(10) {
                    writeln!(
                        out,
                        "  op {} {:?} config {:?}: {}",
                        d.op_index, d.op, d.config, d.detail
                    )?;
                }
                clean &= report.is_clean();
            }
            Ok(clean)
        }
        Command::Trend { csv, time } => {
            let rows = bench::read_csv_file(&csv)
                .with_context(|| format!("reading {}", csv.display()))?;
            let report = bench::trend_check(&rows, time)?;
            for c in &report.checks {
                println!(
                    "{} {}: {:.4}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.value
                );
            }
            Ok(report.pass())
        }
    }
}
