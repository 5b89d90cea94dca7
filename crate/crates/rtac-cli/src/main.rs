//! `rtac` command line: generate random instances, run one enforcement pass
//! with either engine (or the exhaustive oracle), solve with MAC search, and
//! sweep benchmark grids.
//!
//! Exit codes: 0 ok/consistent/solution (and exhausted budgets), 1
//! inconsistent/unsatisfiable, 2 usage or parse errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rtac_core::ac3::Ac3Engine;
use rtac_core::bench::{self, BenchConfig};
use rtac_core::generator::{generate, GenConfig};
use rtac_core::model::{CspInstance, DomainMatrix};
use rtac_core::oracle;
use rtac_core::rtac::{Enforcement, Enforcer};
use rtac_core::search::{solve, EngineKind, SolveOutcome};
use rtac_core::tensor::with_workers;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "rtac", version, about = "Binary-CSP arc consistency toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance file
    Gen(GenArgs),
    /// Enforce arc consistency on an instance and report counters
    Ac(AcArgs),
    /// Run MAC backtracking search on an instance
    Solve(SolveArgs),
    /// Sweep a (vars x density) grid and emit per-cell statistics
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of variables
    #[arg(long)]
    vars: usize,
    /// Uniform domain size
    #[arg(long, default_value_t = 20)]
    dom: usize,
    /// Probability that a variable pair is constrained
    #[arg(long)]
    density: f64,
    /// Probability that a value pair inside a constraint is forbidden
    #[arg(long, default_value_t = 0.3)]
    tightness: f64,
    /// PRNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; stdout when omitted
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Rtac,
    Ac3,
    Oracle,
}

#[derive(Args)]
struct AcArgs {
    /// Instance file (JSON)
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = EngineArg::Rtac)]
    engine: EngineArg,
    /// Kernel worker threads
    #[arg(long, env = "RTAC_WORKERS", default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file (JSON)
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = EngineArg::Rtac)]
    engine: EngineArg,
    /// Assignment budget; unlimited when omitted
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, env = "RTAC_WORKERS", default_value_t = 1)]
    workers: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct BenchArgs {
    /// Grid of variable counts, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    vars: Vec<usize>,
    /// Grid of densities, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    density: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    dom: usize,
    #[arg(long, default_value_t = 0.3)]
    tightness: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Engines to run per cell
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [EngineArg::Rtac, EngineArg::Ac3])]
    engine: Vec<EngineArg>,
    /// Assignment budget per (cell, engine)
    #[arg(long, default_value_t = 2000)]
    samples: u64,
    #[arg(long, env = "RTAC_WORKERS", default_value_t = 1)]
    workers: usize,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Gen(args) => cmd_gen(args),
        Command::Ac(args) => cmd_ac(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
    }
    .unwrap_or_else(|failure| failure)
}

/// Usage/parse failures carry exit 2 in `Err`; `Ok` carries the final code.
type CmdResult = Result<ExitCode, ExitCode>;

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn load_instance(path: &Path) -> Result<CspInstance, ExitCode> {
    let text =
        std::fs::read_to_string(path).map_err(|e| fail(format_args!("{}: {e}", path.display())))?;
    CspInstance::from_json(&text).map_err(fail)
}

fn write_or_print(out: Option<&Path>, content: &str) -> Result<(), ExitCode> {
    match out {
        Some(path) => {
            std::fs::write(path, content)
                .map_err(|e| fail(format_args!("{}: {e}", path.display())))?;
            println!("{}", path.display());
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_gen(args: GenArgs) -> CmdResult {
    let inst = generate(&GenConfig {
        n: args.vars,
        d: args.dom,
        density: args.density,
        tightness: args.tightness,
        seed: args.seed,
    })
    .map_err(fail)?;
    write_or_print(args.out.as_deref(), &inst.to_json())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_ac(args: AcArgs) -> CmdResult {
    let inst = load_instance(&args.instance)?;
    let full = DomainMatrix::full(inst.n(), inst.d());
    let all: Vec<usize> = (0..inst.n()).collect();
    let started = Instant::now();
    let mut report = with_workers(args.workers, || match args.engine {
        EngineArg::Rtac => match Enforcer::new(&inst).enforce_all(&full) {
            Enforcement::Fixpoint { stats, .. } => json!({
                "consistent": true,
                "removed": stats.total_removed,
                "recurrences": stats.recurrences,
            }),
            Enforcement::Wipeout { stats } => json!({
                "consistent": false,
                "removed": stats.total_removed,
                "recurrences": stats.recurrences,
            }),
        },
        EngineArg::Ac3 => match Ac3Engine::new(&inst).enforce_matrix(&full, &all) {
            Ok((_, stats)) => json!({
                "consistent": true,
                "removed": stats.total_removed,
                "revisions": stats.revisions,
            }),
            Err(stats) => json!({
                "consistent": false,
                "removed": stats.total_removed,
                "revisions": stats.revisions,
            }),
        },
        EngineArg::Oracle => {
            let (domains, trace) = oracle::fixpoint_ac(&inst, &full.to_sets());
            json!({
                "consistent": domains.iter().all(|s| !s.is_empty()),
                "removed": trace.total_removed(),
            })
        }
    });
    report["time"] = json!(started.elapsed().as_secs_f64() * 1e3);
    println!("{report}");
    if report["consistent"].as_bool() == Some(true) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn engine_kind(arg: EngineArg) -> Result<EngineKind, ExitCode> {
    match arg {
        EngineArg::Rtac => Ok(EngineKind::Rtac),
        EngineArg::Ac3 => Ok(EngineKind::Ac3),
        EngineArg::Oracle => Err(fail("the oracle does not drive search; use rtac or ac3")),
    }
}

fn cmd_solve(args: SolveArgs) -> CmdResult {
    let inst = load_instance(&args.instance)?;
    let engine = engine_kind(args.engine)?;
    let (outcome, stats) = with_workers(args.workers, || solve(&inst, engine, args.samples));
    let work_key = match engine {
        EngineKind::Rtac => "mean_recurrences",
        EngineKind::Ac3 => "mean_revisions",
    };
    let result = match &outcome {
        SolveOutcome::Solution(_) => "sat",
        SolveOutcome::Unsat => "unsat",
        SolveOutcome::BudgetExhausted => "budget_exhausted",
    };
    let report = json!({
        "result": result,
        "assignment": match &outcome {
            SolveOutcome::Solution(sol) => json!(sol),
            _ => serde_json::Value::Null,
        },
        "assignments": stats.assignments,
        work_key: stats.mean_work(),
        "mean_time_per_assignment_ms": stats.mean_duration_ms(),
    });
    println!("{report}");
    match outcome {
        SolveOutcome::Unsat => Ok(ExitCode::from(1)),
        _ => Ok(ExitCode::SUCCESS),
    }
}

fn cmd_bench(args: BenchArgs) -> CmdResult {
    let engines = args
        .engine
        .iter()
        .map(|&e| engine_kind(e))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = BenchConfig {
        sizes: args.vars,
        densities: args.density,
        engines,
        dom: args.dom,
        tightness: args.tightness,
        seed: args.seed,
        samples: args.samples,
    };
    let rows = with_workers(args.workers, || bench::run_grid(&cfg)).map_err(fail)?;
    let rendered = match args.format {
        FormatArg::Csv => bench::to_csv(&rows),
        FormatArg::Json => bench::to_json(&rows),
    };
    write_or_print(args.out.as_deref(), &rendered)?;
    Ok(ExitCode::SUCCESS)
}
