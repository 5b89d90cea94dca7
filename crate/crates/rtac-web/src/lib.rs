//! Browser demo bindings.
//!
//! Exposes the generator, the tensor enforcement loop with its per-pass
//! removal trace, an engine comparison, and MAC search over wasm-bindgen.
//! Everything speaks JSON strings so the page needs no generated types, and
//! every function also runs natively for testing.

use rtac_core::ac3::Ac3Engine;
use rtac_core::generator::{generate, GenConfig};
use rtac_core::model::{CspInstance, DomainMatrix};
use rtac_core::oracle;
use rtac_core::rtac::{Enforcement, Enforcer};
use rtac_core::search::{solve, EngineKind, SolveOutcome};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct TraceOut {
    n: usize,
    d: usize,
    consistent: bool,
    recurrences: u64,
    total_removed: u64,
    /// `(x, a)` pairs removed by each revision pass, in pass order.
    iterations: Vec<Vec<(usize, usize)>>,
    /// Final 0/1 domain rows (all-zero rows only on wipeout).
    final_domains: Vec<Vec<u32>>,
    /// Constrained variable pairs, for drawing the network.
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize)]
struct EngineReport {
    consistent: bool,
    removed: u64,
    recurrences: Option<u64>,
    revisions: Option<u64>,
}

#[derive(Serialize)]
struct CompareOut {
    rtac: EngineReport,
    ac3: EngineReport,
    oracle_removed: u64,
    /// Both engines and the oracle agree on the final domains (or on wipeout).
    agree: bool,
}

#[derive(Serialize)]
struct SolveOut {
    result: &'static str,
    assignment: Option<Vec<usize>>,
    assignments: u64,
    mean_work: Option<f64>,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn parse(instance_json: &str) -> Result<CspInstance, String> {
    CspInstance::from_json(instance_json).map_err(err)
}

fn domain_rows(domains: &DomainMatrix) -> Vec<Vec<u32>> {
    let (n, d) = (domains.n(), domains.d());
    (0..n)
        .map(|x| (0..d).map(|a| u32::from(domains.contains(x, a))).collect())
        .collect()
}

/// Generates a random instance and returns its normative JSON form.
#[wasm_bindgen]
pub fn generate_instance(
    vars: u32,
    dom: u32,
    density: f64,
    tightness: f64,
    seed: u32,
) -> Result<String, String> {
    let inst = generate(&GenConfig {
        n: vars as usize,
        d: dom as usize,
        density,
        tightness,
        seed: u64::from(seed),
    })
    .map_err(err)?;
    Ok(inst.to_json())
}

/// Full enforcement with the tensor engine; returns the per-pass removal
/// trace for step-through rendering.
#[wasm_bindgen]
pub fn enforce_trace(instance_json: &str) -> Result<String, String> {
    let inst = parse(instance_json)?;
    let enforcer = Enforcer::new(&inst);
    let full = DomainMatrix::full(inst.n(), inst.d());
    let (consistent, stats, final_domains) = match enforcer.enforce_all(&full) {
        Enforcement::Fixpoint { domains, stats } => (true, stats, domain_rows(&domains)),
        Enforcement::Wipeout { stats } => {
            // Replay the trace onto full domains so the page can show the
            // state at the moment of wipeout.
            let mut rows = domain_rows(&full);
            for pass in &stats.removed_per_iteration {
                for &(x, a) in pass {
                    rows[x][a] = 0;
                }
            }
            (false, stats, rows)
        }
    };
    let out = TraceOut {
        n: inst.n(),
        d: inst.d(),
        consistent,
        recurrences: stats.recurrences,
        total_removed: stats.total_removed,
        iterations: stats
            .removed_per_iteration
            .iter()
            .map(|set| set.iter().copied().collect())
            .collect(),
        final_domains,
        edges: inst.constraints().iter().map(|c| (c.x, c.y)).collect(),
    };
    serde_json::to_string(&out).map_err(err)
}

/// Runs both engines and the exhaustive oracle on full domains and reports
/// counters plus agreement.
#[wasm_bindgen]
pub fn compare_engines(instance_json: &str) -> Result<String, String> {
    let inst = parse(instance_json)?;
    let full = DomainMatrix::full(inst.n(), inst.d());
    let all: Vec<usize> = (0..inst.n()).collect();

    let (rtac_domains, rtac_report) = match Enforcer::new(&inst).enforce_all(&full) {
        Enforcement::Fixpoint { domains, stats } => (
            Some(domains.to_sets()),
            EngineReport {
                consistent: true,
                removed: stats.total_removed,
                recurrences: Some(stats.recurrences),
                revisions: None,
            },
        ),
        Enforcement::Wipeout { stats } => (
            None,
            EngineReport {
                consistent: false,
                removed: stats.total_removed,
                recurrences: Some(stats.recurrences),
                revisions: None,
            },
        ),
    };
    let (ac3_domains, ac3_report) = match Ac3Engine::new(&inst).enforce_matrix(&full, &all) {
        Ok((domains, stats)) => (
            Some(domains.to_sets()),
            EngineReport {
                consistent: true,
                removed: stats.total_removed,
                recurrences: None,
                revisions: Some(stats.revisions),
            },
        ),
        Err(stats) => (
            None,
            EngineReport {
                consistent: false,
                removed: stats.total_removed,
                recurrences: None,
                revisions: Some(stats.revisions),
            },
        ),
    };
    let (oracle_domains, oracle_trace) = oracle::fixpoint_ac(&inst, &full.to_sets());
    let oracle_consistent = oracle_domains.iter().all(|s| !s.is_empty());
    let oracle_view = oracle_consistent.then_some(oracle_domains);
    let agree = rtac_domains == oracle_view && ac3_domains == oracle_view;
    let out = CompareOut {
        rtac: rtac_report,
        ac3: ac3_report,
        oracle_removed: oracle_trace.total_removed() as u64,
        agree,
    };
    serde_json::to_string(&out).map_err(err)
}

/// MAC search with the chosen engine ("rtac" or "ac3") and an assignment
/// budget (0 = unlimited).
#[wasm_bindgen]
pub fn solve_instance(instance_json: &str, engine: &str, budget: u32) -> Result<String, String> {
    let inst = parse(instance_json)?;
    let kind = match engine {
        "rtac" => EngineKind::Rtac,
        "ac3" => EngineKind::Ac3,
        other => return Err(format!("unknown engine: {other}")),
    };
    let budget = (budget > 0).then_some(u64::from(budget));
    let (outcome, stats) = solve(&inst, kind, budget);
    let (result, assignment) = match outcome {
        SolveOutcome::Solution(sol) => ("sat", Some(sol)),
        SolveOutcome::Unsat => ("unsat", None),
        SolveOutcome::BudgetExhausted => ("budget_exhausted", None),
    };
    let out = SolveOut {
        result,
        assignment,
        assignments: stats.assignments,
        mean_work: stats.mean_work(),
    };
    serde_json::to_string(&out).map_err(err)
}
