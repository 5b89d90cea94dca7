//! Recurrent tensor arc consistency enforcement.
//!
//! One revision pass filters the whole network at once: slice the constraint
//! tensor down to the changed variables, count supports for every `(x, a)`
//! against each changed variable with a batched matrix-vector product, clamp
//! the counts to one, and keep `(x, a)` only if every changed variable
//! contributes a support. The enforcement loop repeats the pass on the
//! variables whose cardinality shrank until nothing changes or some domain
//! wipes out. Within a pass all tensor work may run data-parallel; across
//! passes the loop is sequential by nature.
//!
//! All removals of one pass are decided against the same input snapshot, so
//! results do not depend on any ordering within the pass.

use crate::model::{ConstraintTensor, CspInstance, DomainMatrix};
use crate::tensor::{batched_matvec, where_select, Tensor};
use std::collections::BTreeSet;

/// Counters for one enforcement call. The revision-pass engine fills
/// `recurrences` and one removal set per executed pass; the queue-based
/// baseline fills `revisions` and leaves the per-pass list empty.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnforceStats {
    /// Executed revision passes of the recurrence loop.
    pub recurrences: u64,
    /// Arc revisions performed by the queue-based baseline.
    pub revisions: u64,
    /// `(x, a)` pairs removed by each pass, in order; pairwise disjoint and
    /// exactly `recurrences` entries long.
    pub removed_per_iteration: Vec<BTreeSet<(usize, usize)>>,
    /// Total values removed.
    pub total_removed: u64,
}

/// Outcome of an enforcement call. A wipeout (some variable left with no
/// value) is a structured result carrying the partial counters, so search
/// can account for work done before failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Enforcement {
    Fixpoint {
        domains: DomainMatrix,
        stats: EnforceStats,
    },
    Wipeout {
        stats: EnforceStats,
    },
}

impl Enforcement {
    pub fn stats(&self) -> &EnforceStats {
        match self {
            Enforcement::Fixpoint { stats, .. } | Enforcement::Wipeout { stats } => stats,
        }
    }

    pub fn is_wipeout(&self) -> bool {
        matches!(self, Enforcement::Wipeout { .. })
    }
}

/// Constant work tensors prepared once per network.
#[derive(Clone, Debug)]
pub struct WorkBuffers {
    zero_n: Tensor,
    zero_nd: Tensor,
    one_nnd: Tensor,
}

impl WorkBuffers {
    pub fn new(n: usize, d: usize) -> Self {
        Self {
            zero_n: Tensor::zeros(vec![n]),
            zero_nd: Tensor::zeros(vec![n, d]),
            one_nnd: Tensor::ones(vec![n, n, d]),
        }
    }
}

/// Whole-network enforcement engine over a fixed constraint tensor.
pub struct Enforcer {
    cons: ConstraintTensor,
    bufs: WorkBuffers,
    n: usize,
    d: usize,
}

impl Enforcer {
    pub fn new(inst: &CspInstance) -> Self {
        let (_, cons) = inst.build_tensors();
        Self::from_constraints(cons)
    }

    pub fn from_constraints(cons: ConstraintTensor) -> Self {
        let (n, d) = (cons.n(), cons.d());
        Self {
            cons,
            bufs: WorkBuffers::new(n, d),
            n,
            d,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn constraints(&self) -> &ConstraintTensor {
        &self.cons
    }

    /// One simultaneous revision pass.
    ///
    /// Keeps `(x, a)` iff it has at least one support inside the current
    /// domain of every variable in `changed`; everything else becomes 0.
    /// `changed` must be nonempty, strictly ascending, and in range.
    pub fn revise(&self, vars: &DomainMatrix, changed: &[usize]) -> DomainMatrix {
        debug_assert!(!changed.is_empty(), "revise needs a nonempty changed set");
        debug_assert!(
            changed.windows(2).all(|w| w[0] < w[1]) && *changed.last().unwrap() < self.n,
            "changed must be ascending and in range"
        );
        let k = changed.len();
        // Cons[*, changed, *, *] -> [n, k, d, d]
        let cons_slice = self
            .cons
            .tensor()
            .index_select(1, changed)
            .expect("changed indices in range");
        // Vars[changed, *] -> [k, d, 1]
        let vars_slice = vars
            .tensor()
            .index_select(0, changed)
            .expect("changed indices in range")
            .dim_expand(2)
            .expect("rank 2 to 3");
        // Support counts per (x, changed_j, a).
        let supp = batched_matvec(&cons_slice, &vars_slice)
            .expect("shapes agree by construction")
            .dim_reduct(-1)
            .expect("trailing unit axis");
        // Clamp counts to <= 1 against a pre-sliced ones block, then count
        // how many changed variables support each (x, a).
        let ones_slice = self
            .bufs
            .one_nnd
            .index_select(1, &(0..k).collect::<Vec<_>>())
            .expect("k <= n");
        let clamped =
            where_select(&supp.gt_scalar(1), &ones_slice, &supp).expect("same [n, k, d] shape");
        let counts = clamped.sum_along(1).expect("axis 1 of rank 3");
        // Keep only fully supported cells.
        let next = where_select(
            &counts.ne_scalar(k as u32),
            &self.bufs.zero_nd,
            vars.tensor(),
        )
        .expect("same [n, d] shape");
        DomainMatrix::from_tensor(next).expect("revision preserves the boolean role")
    }

    /// Runs revision passes until quiescence or wipeout, starting from the
    /// given changed set. An empty `changed` returns immediately with zero
    /// recurrences. On success the returned domains are the arc-consistent
    /// closure of the input with respect to the seeded propagation.
    pub fn enforce(&self, vars: &DomainMatrix, changed: &[usize]) -> Enforcement {
        let mut stats = EnforceStats::default();
        let mut vars = vars.clone();
        let mut changed: Vec<usize> = {
            let mut c = changed.to_vec();
            c.sort_unstable();
            c.dedup();
            c
        };
        let mut vals_pre = vars.tensor().sum_along(1).expect("rank-2 matrix");
        while !changed.is_empty() {
            let next = self.revise(&vars, &changed);
            stats.recurrences += 1;
            let removed = next.removed_relative(&vars);
            stats.total_removed += removed.len() as u64;
            stats.removed_per_iteration.push(removed);
            let vals = next.tensor().sum_along(1).expect("rank-2 matrix");
            if vals
                .eq_elem(&self.bufs.zero_n)
                .expect("same [n] shape")
                .any_true()
            {
                return Enforcement::Wipeout { stats };
            }
            changed = vals
                .ne_elem(&vals_pre)
                .expect("same [n] shape")
                .nonzero_indices()
                .into_iter()
                .map(|idx| idx[0])
                .collect();
            vals_pre = vals;
            vars = next;
        }
        Enforcement::Fixpoint {
            domains: vars,
            stats,
        }
    }

    /// Full enforcement: every variable starts in the changed set.
    pub fn enforce_all(&self, vars: &DomainMatrix) -> Enforcement {
        let all: Vec<usize> = (0..self.n).collect();
        self.enforce(vars, &all)
    }
}
