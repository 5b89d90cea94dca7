//! Definitional ground truth for both enforcement engines.
//!
//! [`fixpoint_ac`] runs the plain removal recurrence with exhaustive scans:
//! each round collects every still-present `(x, a)` whose support set on some
//! declared constraint has no live value left, removes the whole round at
//! once, and stops when a round collects nothing. No incrementality, no
//! queue; deliberately slow and obviously correct. Do not use above n = 30 or
//! d = 10.
//!
//! [`enumerate_solutions`] brute-forces complete assignments for tiny
//! instances and is the arbiter for the search layer.

use crate::error::{Error, Result};
use crate::model::CspInstance;
use std::collections::BTreeSet;

/// Hard cap on `d^n` for [`enumerate_solutions`].
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

/// Per-round removal sets of the fixpoint recurrence; rounds are nonempty and
/// pairwise disjoint, and their union is exactly `input domains \ fixpoint`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RemovalTrace {
    pub iterations: Vec<BTreeSet<(usize, usize)>>,
}

impl RemovalTrace {
    pub fn total_removed(&self) -> usize {
        self.iterations.iter().map(BTreeSet::len).sum()
    }
}

/// Arc-consistency closure of `domains` by exhaustive scanning.
///
/// Values absent from the input count as removed. A wiped-out variable is
/// reported in-band as an empty row of the returned domains, never as an
/// error; callers interpret.
pub fn fixpoint_ac(
    inst: &CspInstance,
    domains: &[BTreeSet<usize>],
) -> (Vec<BTreeSet<usize>>, RemovalTrace) {
    assert_eq!(domains.len(), inst.n(), "one domain per variable");
    let mut present = domains.to_vec();
    let mut trace = RemovalTrace::default();
    loop {
        let mut collected: BTreeSet<(usize, usize)> = BTreeSet::new();
        for x in 0..inst.n() {
            for &a in &present[x] {
                let doomed = inst.neighbors(x).into_iter().any(|y| {
                    let supports = inst.support_set(x, y, a).expect("valid triple");
                    supports.iter().all(|b| !present[y].contains(b))
                });
                if doomed {
                    collected.insert((x, a));
                }
            }
        }
        if collected.is_empty() {
            break;
        }
        for &(x, a) in &collected {
            present[x].remove(&a);
        }
        trace.iterations.push(collected);
    }
    (present, trace)
}

/// Direct audit: every present `(x, a)` has at least one present support on
/// every declared incident constraint.
pub fn is_arc_consistent(inst: &CspInstance, domains: &[BTreeSet<usize>]) -> bool {
    (0..inst.n()).all(|x| {
        domains[x].iter().all(|&a| {
            inst.neighbors(x).into_iter().all(|y| {
                inst.support_set(x, y, a)
                    .expect("valid triple")
                    .iter()
                    .any(|b| domains[y].contains(b))
            })
        })
    })
}

/// All complete satisfying assignments in lexicographic order, truncated at
/// `limit`. Fails if `d^n` exceeds [`ENUMERATION_LIMIT`].
pub fn enumerate_solutions(inst: &CspInstance, limit: usize) -> Result<Vec<Vec<usize>>> {
    let mut size = 1u64;
    for _ in 0..inst.n() {
        size = size.saturating_mul(inst.d() as u64);
        if size > ENUMERATION_LIMIT {
            return Err(Error::InstanceTooLarge {
                limit: ENUMERATION_LIMIT,
            });
        }
    }
    // (earlier var, this var) constraint lookups for O(1) checks per step.
    let n = inst.n();
    let mut pair: Vec<Vec<Option<usize>>> = vec![vec![None; n]; n];
    for (ci, c) in inst.constraints().iter().enumerate() {
        pair[c.x][c.y] = Some(ci);
        pair[c.y][c.x] = Some(ci);
    }
    let mut out = Vec::new();
    let mut partial: Vec<usize> = Vec::with_capacity(n);
    dfs_enumerate(inst, &pair, &mut partial, limit, &mut out);
    Ok(out)
}

fn dfs_enumerate(
    inst: &CspInstance,
    pair: &[Vec<Option<usize>>],
    partial: &mut Vec<usize>,
    limit: usize,
    out: &mut Vec<Vec<usize>>,
) {
    if out.len() >= limit {
        return;
    }
    let x = partial.len();
    if x == inst.n() {
        out.push(partial.clone());
        return;
    }
    'values: for a in 0..inst.d() {
        for (y, &b) in partial.iter().enumerate() {
            if let Some(ci) = pair[x][y] {
                let c = &inst.constraints()[ci];
                let key = if c.x == x { (a, b) } else { (b, a) };
                if c.allowed.binary_search(&key).is_err() {
                    continue 'values;
                }
            }
        }
        partial.push(a);
        dfs_enumerate(inst, pair, partial, limit, out);
        partial.pop();
        if out.len() >= limit {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BinaryConstraint, DomainMatrix};

    fn eq2() -> CspInstance {
        CspInstance::new(
            2,
            2,
            vec![BinaryConstraint {
                x: 0,
                y: 1,
                allowed: vec![(0, 0)],
            }],
        )
        .unwrap()
    }

    fn path3() -> CspInstance {
        CspInstance::new(
            3,
            2,
            vec![
                BinaryConstraint {
                    x: 0,
                    y: 1,
                    allowed: vec![(0, 0), (1, 1)],
                },
                BinaryConstraint {
                    x: 1,
                    y: 2,
                    allowed: vec![(0, 0)],
                },
            ],
        )
        .unwrap()
    }

    fn wipe2() -> CspInstance {
        CspInstance::new(
            2,
            1,
            vec![BinaryConstraint {
                x: 0,
                y: 1,
                allowed: vec![],
            }],
        )
        .unwrap()
    }

    fn full(inst: &CspInstance) -> Vec<BTreeSet<usize>> {
        DomainMatrix::full(inst.n(), inst.d()).to_sets()
    }

    #[test]
    fn eq2_fixpoint() {
        let inst = eq2();
        let (domains, trace) = fixpoint_ac(&inst, &full(&inst));
        assert_eq!(domains, vec![BTreeSet::from([0]), BTreeSet::from([0])]);
        assert_eq!(
            trace.iterations,
            vec![BTreeSet::from([(0usize, 1usize), (1, 1)])]
        );
        assert!(is_arc_consistent(&inst, &domains));
    }

    #[test]
    fn path3_fixpoint() {
        let inst = path3();
        let (domains, trace) = fixpoint_ac(&inst, &full(&inst));
        assert_eq!(domains, vec![BTreeSet::from([0]); 3]);
        assert_eq!(
            trace.iterations,
            vec![
                BTreeSet::from([(1usize, 1usize), (2, 1)]),
                BTreeSet::from([(0usize, 1usize)]),
            ]
        );
    }

    #[test]
    fn already_consistent_input_is_fixed() {
        let inst = path3();
        let (domains, trace) = fixpoint_ac(&inst, &full(&inst));
        let (again, trace2) = fixpoint_ac(&inst, &domains);
        assert_eq!(again, domains);
        assert!(trace2.iterations.is_empty());
        assert!(!trace.iterations.is_empty());
    }

    #[test]
    fn wipeout_reported_in_band() {
        let inst = wipe2();
        let (domains, trace) = fixpoint_ac(&inst, &full(&inst));
        assert!(domains.iter().all(BTreeSet::is_empty));
        assert_eq!(trace.total_removed(), 2);
    }

    #[test]
    fn partial_input_treats_absent_values_as_removed() {
        // dom(1) already reduced to {1}: (0,0) has no live support on c01.
        let inst = eq2();
        let input = vec![BTreeSet::from([0, 1]), BTreeSet::from([1])];
        let (domains, _) = fixpoint_ac(&inst, &input);
        assert!(domains[0].is_empty());
        assert!(domains[1].is_empty());
    }

    #[test]
    fn enumerate_eq2() {
        let inst = eq2();
        assert_eq!(enumerate_solutions(&inst, 10).unwrap(), vec![vec![0, 0]]);
    }

    #[test]
    fn enumerate_unconstrained() {
        let inst = CspInstance::new(2, 2, vec![]).unwrap();
        let sols = enumerate_solutions(&inst, 10).unwrap();
        assert_eq!(
            sols,
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]],
            "lexicographic order"
        );
    }

    #[test]
    fn enumerate_wipe2_is_empty() {
        assert!(enumerate_solutions(&wipe2(), 10).unwrap().is_empty());
    }

    #[test]
    fn enumerate_rejects_huge_instances() {
        let inst = CspInstance::new(30, 10, vec![]).unwrap();
        assert!(matches!(
            enumerate_solutions(&inst, 1),
            Err(Error::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn solutions_survive_the_closure() {
        for seed in 0..30u64 {
            let inst = crate::generator::generate(&crate::generator::GenConfig {
                n: 4,
                d: 3,
                density: 0.7,
                tightness: 0.4,
                seed,
            })
            .unwrap();
            let (domains, _) = fixpoint_ac(&inst, &full(&inst));
            for sol in enumerate_solutions(&inst, 1000).unwrap() {
                for (x, &a) in sol.iter().enumerate() {
                    assert!(
                        domains[x].contains(&a),
                        "closure dropped a solution value (seed {seed})"
                    );
                }
            }
        }
    }
}
