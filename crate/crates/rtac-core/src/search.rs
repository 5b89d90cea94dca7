//! Backtracking search maintaining arc consistency, with a pluggable
//! enforcement engine and per-assignment statistics.
//!
//! Nodes carry full value-copies of the domain matrix, so abandoning a
//! subtree needs no undo bookkeeping: the parent's domains are untouched by
//! construction. Variable order is min-domain with index tie-break; values
//! are tried in ascending order. After each assignment the chosen engine
//! re-enforces with the assigned variable as the only seed.

use crate::ac3::Ac3Engine;
use crate::clock::Stopwatch;
use crate::error::{Error, Result};
use crate::model::{CspInstance, DomainMatrix};
use crate::rtac::{Enforcement, Enforcer};
use std::time::Duration;

/// Which enforcement engine drives the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineKind {
    Rtac,
    Ac3,
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Rtac => "rtac",
            EngineKind::Ac3 => "ac3",
        }
    }
}

/// One search frame: depth, a private copy of the domains, and the partial
/// assignment. Assigned variables hold singleton domain rows matching the
/// assignment.
#[derive(Clone, Debug)]
pub struct SearchNode {
    pub level: usize,
    pub domains: DomainMatrix,
    pub assignment: Vec<Option<usize>>,
}

impl SearchNode {
    fn root(domains: DomainMatrix) -> Self {
        let n = domains.n();
        SearchNode {
            level: 0,
            domains,
            assignment: vec![None; n],
        }
    }

    fn child(&self, idx: usize, val: usize, domains: DomainMatrix) -> Self {
        let mut assignment = self.assignment.clone();
        assignment[idx] = Some(val);
        SearchNode {
            level: self.level + 1,
            domains,
            assignment,
        }
    }
}

/// One (assign + enforcement) event: the engine's work counter (recurrences
/// for the tensor engine, revisions for the baseline) and the enforcement
/// wall time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AssignmentSample {
    pub work: u64,
    pub duration: Duration,
}

#[derive(Clone, Debug, Default)]
pub struct SearchStats {
    /// Assign operations performed, including ones that ended in a wipeout.
    pub assignments: u64,
    pub per_assignment: Vec<AssignmentSample>,
    pub solutions_found: u64,
}

impl SearchStats {
    pub fn mean_work(&self) -> Option<f64> {
        (!self.per_assignment.is_empty()).then(|| {
            self.per_assignment
                .iter()
                .map(|s| s.work as f64)
                .sum::<f64>()
                / self.per_assignment.len() as f64
        })
    }

    pub fn mean_duration_ms(&self) -> Option<f64> {
        (!self.per_assignment.is_empty()).then(|| {
            self.per_assignment
                .iter()
                .map(|s| s.duration.as_secs_f64() * 1e3)
                .sum::<f64>()
                / self.per_assignment.len() as f64
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Solution(Vec<usize>),
    Unsat,
    BudgetExhausted,
}

/// Returns a copy of `domains` with row `idx` collapsed to the unit row at
/// `val`. The input is untouched. Assigning a value absent from the current
/// domain is a usage error.
pub fn assign(domains: &DomainMatrix, idx: usize, val: usize) -> Result<DomainMatrix> {
    if idx >= domains.n() {
        return Err(Error::VariableOutOfRange {
            var: idx,
            n: domains.n(),
        });
    }
    if val >= domains.d() || !domains.contains(idx, val) {
        return Err(Error::ValueNotInDomain {
            var: idx,
            value: val,
        });
    }
    domains.with_unit_row(idx, val)
}

/// Min-domain variable choice: the unassigned variable with the smallest
/// current cardinality, ties broken by smallest index.
pub fn select_variable(domains: &DomainMatrix, assignment: &[Option<usize>]) -> Result<usize> {
    let cards = domains.cardinalities();
    assignment
        .iter()
        .enumerate()
        .filter(|(_, a)| a.is_none())
        .map(|(x, _)| x)
        .min_by_key(|&x| (cards[x], x))
        .ok_or(Error::AllAssigned)
}

enum Propagator {
    Rtac(Enforcer),
    Ac3(Ac3Engine),
}

impl Propagator {
    fn build(inst: &CspInstance, kind: EngineKind) -> Self {
        match kind {
            EngineKind::Rtac => Propagator::Rtac(Enforcer::new(inst)),
            EngineKind::Ac3 => Propagator::Ac3(Ac3Engine::new(inst)),
        }
    }

    /// Seeds with `changed`; full enforcement passes every variable.
    fn enforce(&self, domains: &DomainMatrix, changed: &[usize]) -> Enforcement {
        match self {
            Propagator::Rtac(enforcer) => enforcer.enforce(domains, changed),
            Propagator::Ac3(engine) => match engine.enforce_matrix(domains, changed) {
                Ok((domains, stats)) => Enforcement::Fixpoint { domains, stats },
                Err(stats) => Enforcement::Wipeout { stats },
            },
        }
    }
}

enum Flow {
    Found(Vec<usize>),
    Exhausted,
    Budget,
}

struct Driver<'a> {
    inst: &'a CspInstance,
    kind: EngineKind,
    propagator: Propagator,
    budget: Option<u64>,
    stats: SearchStats,
}

impl Driver<'_> {
    fn work_of(&self, enforcement: &Enforcement) -> u64 {
        match self.kind {
            EngineKind::Rtac => enforcement.stats().recurrences,
            EngineKind::Ac3 => enforcement.stats().revisions,
        }
    }

    fn budget_spent(&self) -> bool {
        self.budget.is_some_and(|b| self.stats.assignments >= b)
    }

    fn dfs(&mut self, node: &SearchNode) -> Flow {
        if node.level == self.inst.n() {
            self.stats.solutions_found += 1;
            let solution = node
                .assignment
                .iter()
                .map(|a| a.expect("complete at level n"))
                .collect();
            return Flow::Found(solution);
        }
        let idx =
            select_variable(&node.domains, &node.assignment).expect("unassigned variable exists");
        for val in node.domains.present_values(idx) {
            if self.budget_spent() {
                return Flow::Budget;
            }
            let assigned = assign(&node.domains, idx, val).expect("value is present");
            let watch = Stopwatch::start();
            let outcome = self.propagator.enforce(&assigned, &[idx]);
            let duration = watch.elapsed();
            self.stats.assignments += 1;
            self.stats.per_assignment.push(AssignmentSample {
                work: self.work_of(&outcome),
                duration,
            });
            if let Enforcement::Fixpoint { domains, .. } = outcome {
                let child = node.child(idx, val, domains);
                match self.dfs(&child) {
                    Flow::Exhausted => continue,
                    verdict => return verdict,
                }
            }
        }
        Flow::Exhausted
    }
}

/// Solves an instance with MAC search. Full enforcement runs at the root;
/// after every assignment the engine propagates from the assigned variable.
/// `budget` caps the number of assignments (for benchmarking); `None` runs to
/// completion.
pub fn solve(
    inst: &CspInstance,
    engine: EngineKind,
    budget: Option<u64>,
) -> (SolveOutcome, SearchStats) {
    let mut driver = Driver {
        inst,
        kind: engine,
        propagator: Propagator::build(inst, engine),
        budget,
        stats: SearchStats::default(),
    };
    let full = DomainMatrix::full(inst.n(), inst.d());
    let all: Vec<usize> = (0..inst.n()).collect();
    let root_domains = match driver.propagator.enforce(&full, &all) {
        Enforcement::Fixpoint { domains, .. } => domains,
        Enforcement::Wipeout { .. } => return (SolveOutcome::Unsat, driver.stats),
    };
    let root = SearchNode::root(root_domains);
    let outcome = match driver.dfs(&root) {
        Flow::Found(solution) => {
            debug_assert!(inst.check_assignment(&solution));
            SolveOutcome::Solution(solution)
        }
        Flow::Exhausted => SolveOutcome::Unsat,
        Flow::Budget => SolveOutcome::BudgetExhausted,
    };
    (outcome, driver.stats)
}
