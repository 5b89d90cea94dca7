//! Benchmark grid runner behind the CLI: generates one instance per
//! (size, density) cell and samples per-assignment work of each engine during
//! MAC search under an assignment budget.
//!
//! Counter columns are deterministic for fixed seeds and worker counts; only
//! the timing column varies between runs.

use crate::error::{Error, Result};
use crate::generator::{generate, GenConfig};
use crate::search::{solve, EngineKind, SolveOutcome};
use serde::Serialize;
use std::fmt::Write as _;

/// Grid request: every size is crossed with every density; each cell gets a
/// deterministic seed derived from `seed` by cell position and is then solved
/// once per engine with `samples` as the assignment budget.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub densities: Vec<f64>,
    pub engines: Vec<EngineKind>,
    pub dom: usize,
    pub tightness: f64,
    pub seed: u64,
    pub samples: u64,
}

/// One aggregated benchmark record. Exactly one of `mean_revisions` /
/// `mean_recurrences` is populated, matching the engine. `samples` counts the
/// assignments actually taken, which is below the budget when the search
/// finishes early; `wipeout` marks cells whose root enforcement failed before
/// any assignment.
#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub density: f64,
    pub d: usize,
    pub tightness: f64,
    pub seed: u64,
    pub engine: &'static str,
    pub samples: u64,
    pub mean_revisions: Option<f64>,
    pub mean_recurrences: Option<f64>,
    pub mean_time_per_assignment_ms: Option<f64>,
    pub wipeout: bool,
}

pub const CSV_HEADER: &str = "n,density,d,tightness,seed,engine,samples,mean_revisions,mean_recurrences,mean_time_per_assignment_ms,wipeout";

/// Runs the whole grid sequentially, cells in (size, density) order, engines
/// in the requested order within a cell.
pub fn run_grid(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    let mut cell_index = 0u64;
    for &n in &cfg.sizes {
        for &density in &cfg.densities {
            let cell_seed = cfg.seed.wrapping_add(cell_index);
            cell_index += 1;
            let inst = generate(&GenConfig {
                n,
                d: cfg.dom,
                density,
                tightness: cfg.tightness,
                seed: cell_seed,
            })?;
            for &engine in &cfg.engines {
                let (outcome, stats) = solve(&inst, engine, Some(cfg.samples));
                let mean_work = stats.mean_work();
                rows.push(BenchRow {
                    n,
                    density,
                    d: cfg.dom,
                    tightness: cfg.tightness,
                    seed: cell_seed,
                    engine: engine.name(),
                    samples: stats.assignments,
                    mean_revisions: (engine == EngineKind::Ac3).then_some(mean_work).flatten(),
                    mean_recurrences: (engine == EngineKind::Rtac).then_some(mean_work).flatten(),
                    mean_time_per_assignment_ms: stats.mean_duration_ms(),
                    wipeout: stats.assignments == 0 && matches!(outcome, SolveOutcome::Unsat),
                });
            }
        }
    }
    Ok(rows)
}

fn push_opt(line: &mut String, value: Option<f64>) {
    if let Some(v) = value {
        write!(line, "{v}").expect("write to string");
    }
}

/// Fixed-column CSV rendering, newline-terminated.
pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let mut line = format!(
            "{},{},{},{},{},{},{},",
            r.n, r.density, r.d, r.tightness, r.seed, r.engine, r.samples
        );
        push_opt(&mut line, r.mean_revisions);
        line.push(',');
        push_opt(&mut line, r.mean_recurrences);
        line.push(',');
        push_opt(&mut line, r.mean_time_per_assignment_ms);
        write!(line, ",{}", r.wipeout).expect("write to string");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// JSON mirror of the CSV table, newline-terminated.
pub fn to_json(rows: &[BenchRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}
