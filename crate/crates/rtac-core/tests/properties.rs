//! Randomized cross-module properties, driven by proptest on top of the
//! seeded generator.

mod common;

use common::check_incremental_cause;
use proptest::prelude::*;
use rtac_core::ac3::Ac3Engine;
use rtac_core::generator::{generate, GenConfig};
use rtac_core::model::{CspInstance, DomainMatrix};
use rtac_core::oracle;
use rtac_core::rtac::{Enforcement, Enforcer};
use rtac_core::search::{solve, EngineKind, SolveOutcome};
use std::collections::BTreeSet;

fn instance_strategy(max_n: usize, max_d: usize) -> impl Strategy<Value = CspInstance> {
    (
        2..=max_n,
        1..=max_d,
        0.0f64..=1.0,
        0.0f64..=0.9,
        any::<u64>(),
    )
        .prop_map(|(n, d, density, tightness, seed)| {
            generate(&GenConfig {
                n,
                d,
                density,
                tightness,
                seed,
            })
            .expect("valid config")
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Both engines land exactly on the definitional fixpoint, or both agree
    /// with the oracle that some domain wipes out.
    #[test]
    fn engines_agree_with_oracle(inst in instance_strategy(14, 6)) {
        let full = DomainMatrix::full(inst.n(), inst.d());
        let (oracle_domains, _) = oracle::fixpoint_ac(&inst, &full.to_sets());
        let expected = oracle_domains
            .iter()
            .all(|s| !s.is_empty())
            .then_some(oracle_domains);
        let rtac = match Enforcer::new(&inst).enforce_all(&full) {
            Enforcement::Fixpoint { domains, .. } => Some(domains.to_sets()),
            Enforcement::Wipeout { .. } => None,
        };
        let all: Vec<usize> = (0..inst.n()).collect();
        let ac3 = match Ac3Engine::new(&inst).enforce_matrix(&full, &all) {
            Ok((domains, _)) => Some(domains.to_sets()),
            Err(_) => None,
        };
        prop_assert_eq!(&rtac, &expected);
        prop_assert_eq!(&ac3, &expected);
    }

    /// Stats bookkeeping invariants of the recurrence loop: pass count bound,
    /// one removal set per pass, disjoint sets, consistent totals, monotone
    /// shrinking output.
    #[test]
    fn enforcement_stats_are_coherent(inst in instance_strategy(14, 6)) {
        let full = DomainMatrix::full(inst.n(), inst.d());
        let enforcer = Enforcer::new(&inst);
        let (stats, domains) = match enforcer.enforce_all(&full) {
            Enforcement::Fixpoint { domains, stats } => (stats, Some(domains)),
            Enforcement::Wipeout { stats } => (stats, None),
        };
        prop_assert_eq!(stats.recurrences as usize, stats.removed_per_iteration.len());
        prop_assert!(stats.recurrences <= (inst.n() * inst.d() + 1) as u64);
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut total = 0u64;
        for pass in &stats.removed_per_iteration {
            for &pair in pass {
                prop_assert!(seen.insert(pair), "pair removed twice");
            }
            total += pass.len() as u64;
        }
        prop_assert_eq!(total, stats.total_removed);
        if let Some(domains) = domains {
            prop_assert!(domains.is_subset_of(&full));
            prop_assert_eq!(
                domains.live_count(),
                full.live_count() - stats.total_removed
            );
        }
        prop_assert!(check_incremental_cause(&inst, &stats.removed_per_iteration).is_ok());
    }

    /// Partial seeding stays sound: enforcing from any changed subset removes
    /// only values the full closure also removes.
    #[test]
    fn partial_seeding_is_sound(inst in instance_strategy(10, 5), pick in any::<prop::sample::Index>()) {
        let full = DomainMatrix::full(inst.n(), inst.d());
        let (oracle_domains, _) = oracle::fixpoint_ac(&inst, &full.to_sets());
        let seed_var = pick.index(inst.n());
        let enforcer = Enforcer::new(&inst);
        if let Enforcement::Fixpoint { domains, stats } = enforcer.enforce(&full, &[seed_var]) {
            for pass in &stats.removed_per_iteration {
                for &(x, a) in pass {
                    prop_assert!(!oracle_domains[x].contains(&a));
                }
            }
            // And the partial result is still a superset of the full closure.
            for (x, set) in oracle_domains.iter().enumerate() {
                for &a in set {
                    prop_assert!(domains.contains(x, a));
                }
            }
        }
    }

    /// Search with either engine agrees with brute force on satisfiability.
    #[test]
    fn search_matches_enumeration(inst in instance_strategy(5, 4)) {
        let solutions = oracle::enumerate_solutions(&inst, usize::MAX).unwrap();
        for engine in [EngineKind::Rtac, EngineKind::Ac3] {
            match solve(&inst, engine, None).0 {
                SolveOutcome::Solution(sol) => {
                    prop_assert!(inst.check_assignment(&sol));
                    prop_assert!(solutions.contains(&sol));
                }
                SolveOutcome::Unsat => prop_assert!(solutions.is_empty()),
                SolveOutcome::BudgetExhausted => unreachable!("no budget set"),
            }
        }
    }
}

/// The oracle's fixpoint is maximal: growing it by any one removed value and
/// re-closing falls straight back to the same fixpoint.
#[test]
fn oracle_fixpoint_is_maximal() {
    for seed in 0..40u64 {
        let inst = generate(&GenConfig {
            n: 3 + (seed % 6) as usize,
            d: 2 + (seed % 3) as usize,
            density: 0.8,
            tightness: 0.5,
            seed: 0xFACE + seed,
        })
        .unwrap();
        let full = DomainMatrix::full(inst.n(), inst.d()).to_sets();
        let (fixed, trace) = oracle::fixpoint_ac(&inst, &full);
        for pass in &trace.iterations {
            for &(x, a) in pass {
                let mut grown = fixed.clone();
                grown[x].insert(a);
                assert!(
                    !oracle::is_arc_consistent(&inst, &grown),
                    "grown set should fail the audit (seed {seed})"
                );
                let (reclosed, _) = oracle::fixpoint_ac(&inst, &grown);
                assert_eq!(reclosed, fixed, "re-closure must fall back (seed {seed})");
            }
        }
    }
}

/// Full-run trace of the engine equals the oracle recurrence trace exactly
/// (plus the engine's final quiescent pass) on consistent instances.
#[test]
fn engine_trace_equals_oracle_trace() {
    for seed in 0..60u64 {
        let inst = generate(&GenConfig {
            n: 2 + (seed % 10) as usize,
            d: 1 + (seed % 6) as usize,
            density: 0.65,
            tightness: 0.45,
            seed: 0xBEEF + seed,
        })
        .unwrap();
        let full = DomainMatrix::full(inst.n(), inst.d());
        let (_, oracle_trace) = oracle::fixpoint_ac(&inst, &full.to_sets());
        match Enforcer::new(&inst).enforce_all(&full) {
            Enforcement::Fixpoint { stats, .. } => {
                let mut expected = oracle_trace.iterations.clone();
                expected.push(BTreeSet::new());
                assert_eq!(stats.removed_per_iteration, expected, "seed {seed}");
            }
            Enforcement::Wipeout { stats } => {
                let passes = stats.removed_per_iteration.len();
                assert_eq!(
                    stats.removed_per_iteration,
                    oracle_trace.iterations[..passes].to_vec(),
                    "seed {seed}"
                );
            }
        }
    }
}
