//! Helpers shared by the integration suites: a deterministic instance
//! corpus and the removal-trace causality check.
//!
//! Each suite pulls in the subset it needs.
#![allow(dead_code)]

use rtac_core::generator::{generate, GenConfig};
use rtac_core::model::CspInstance;
use std::collections::BTreeSet;

/// Deterministic corpus sweeping n in 2..=20, d in 1..=6, density in
/// 0.1..=1.0, tightness in 0.0..=0.9.
pub fn corpus(count: usize, seed_base: u64) -> Vec<CspInstance> {
    (0..count)
        .map(|i| {
            let cfg = GenConfig {
                n: 2 + i % 19,
                d: 1 + (i / 19) % 6,
                density: 0.1 + 0.9 * ((i % 10) as f64 / 9.0),
                tightness: 0.9 * ((i % 9) as f64 / 8.0),
                seed: seed_base + i as u64,
            };
            generate(&cfg).expect("valid corpus config")
        })
        .collect()
}

/// Checks the incremental-cause property of a removal trace: every pair
/// removed at pass k >= 2 must owe its death to some declared constraint
/// whose supports that were still alive before pass k-1 were all removed at
/// pass k-1.
pub fn check_incremental_cause(
    inst: &CspInstance,
    trace: &[BTreeSet<(usize, usize)>],
) -> Result<(), String> {
    for k in 2..=trace.len() {
        let current = &trace[k - 1];
        let previous = &trace[k - 2];
        let mut removed_before: BTreeSet<(usize, usize)> = BTreeSet::new();
        for earlier in &trace[..k - 2] {
            removed_before.extend(earlier.iter().copied());
        }
        for &(x, a) in current {
            let caused = inst.neighbors(x).into_iter().any(|y| {
                let live: Vec<usize> = inst
                    .support_set(x, y, a)
                    .expect("valid triple")
                    .into_iter()
                    .filter(|&b| !removed_before.contains(&(y, b)))
                    .collect();
                !live.is_empty() && live.iter().all(|&b| previous.contains(&(y, b)))
            });
            if !caused {
                return Err(format!(
                    "pass {k} removed ({x}, {a}) without a cause in pass {}",
                    k - 1
                ));
            }
        }
    }
    Ok(())
}
