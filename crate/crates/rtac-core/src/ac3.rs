//! Sequential queue-based arc consistency, the classic comparison baseline.
//!
//! Arcs are processed depth-first: pending arcs live on a stack with a
//! membership set suppressing duplicates, seeded in ascending `(z, s)` order
//! for the requested seed variables (so the highest arc is revised first).
//! Revising arc `(x, y)` deletes every value of `x` without a live support in
//! `dom(y)`; after a deletion every incident arc `(z, x)` is re-queued unless
//! already pending. One revision = one popped arc, removals or not.
//!
//! Only declared constraint pairs ever enter the queue. Domains are handled
//! as per-variable value sets ([`DomainSet`]); conversion to and from
//! [`DomainMatrix`] is exact.

use crate::model::{CspInstance, DomainMatrix};
use crate::rtac::EnforceStats;
use std::collections::{BTreeSet, HashMap, HashSet};

/// Fixed-universe value set over `0..d`, packed into 64-bit words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainSet {
    d: usize,
    words: Vec<u64>,
}

impl DomainSet {
    pub fn empty(d: usize) -> Self {
        Self {
            d,
            words: vec![0; d.div_ceil(64)],
        }
    }

    pub fn full(d: usize) -> Self {
        let mut set = Self::empty(d);
        for a in 0..d {
            set.insert(a);
        }
        set
    }

    pub fn from_values(d: usize, values: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(d);
        for a in values {
            set.insert(a);
        }
        set
    }

    pub fn insert(&mut self, a: usize) {
        debug_assert!(a < self.d);
        self.words[a / 64] |= 1 << (a % 64);
    }

    pub fn remove(&mut self, a: usize) {
        debug_assert!(a < self.d);
        self.words[a / 64] &= !(1 << (a % 64));
    }

    pub fn contains(&self, a: usize) -> bool {
        a < self.d && self.words[a / 64] >> (a % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersects(&self, other: &DomainSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .any(|(&a, &b)| a & b != 0)
    }

    pub fn values(&self) -> Vec<usize> {
        (0..self.d).filter(|&a| self.contains(a)).collect()
    }
}

/// Pending-arc stack with duplicate suppression.
#[derive(Debug, Default)]
pub struct ArcQueue {
    stack: Vec<(usize, usize)>,
    pending: HashSet<(usize, usize)>,
}

impl ArcQueue {
    pub fn new() -> Self {
        Self::default()
    }

    /// Pushes an arc unless it is already pending.
    pub fn push(&mut self, arc: (usize, usize)) {
        if self.pending.insert(arc) {
            self.stack.push(arc);
        }
    }

    pub fn pop(&mut self) -> Option<(usize, usize)> {
        let arc = self.stack.pop()?;
        self.pending.remove(&arc);
        Some(arc)
    }

    pub fn len(&self) -> usize {
        self.stack.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stack.is_empty()
    }
}

/// Queue-based enforcement over one instance, with per-arc support masks
/// precomputed from the sparse constraints.
pub struct Ac3Engine {
    n: usize,
    d: usize,
    neighbors: Vec<Vec<usize>>,
    /// Directed arc `(x, y)` -> per-value-of-x mask of supporting y values.
    supports: HashMap<(usize, usize), Vec<DomainSet>>,
}

impl Ac3Engine {
    pub fn new(inst: &CspInstance) -> Self {
        let (n, d) = (inst.n(), inst.d());
        let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut supports = HashMap::new();
        for c in inst.constraints() {
            neighbors[c.x].push(c.y);
            neighbors[c.y].push(c.x);
            let mut fwd = vec![DomainSet::empty(d); d];
            let mut rev = vec![DomainSet::empty(d); d];
            for &(a, b) in &c.allowed {
                fwd[a].insert(b);
                rev[b].insert(a);
            }
            supports.insert((c.x, c.y), fwd);
            supports.insert((c.y, c.x), rev);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Self {
            n,
            d,
            neighbors,
            supports,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.neighbors[x]
    }

    /// Removes every value of `x` lacking a support in `dom(y)` and returns
    /// the removed values. `(x, y)` must be a declared constrained pair.
    pub fn revise(&self, domains: &mut [DomainSet], x: usize, y: usize) -> BTreeSet<usize> {
        let Some(support) = self.supports.get(&(x, y)) else {
            debug_assert!(false, "revise on undeclared pair ({x}, {y})");
            return BTreeSet::new();
        };
        let mut removed = BTreeSet::new();
        for (a, support_of_a) in support.iter().enumerate() {
            if domains[x].contains(a) && !support_of_a.intersects(&domains[y]) {
                domains[x].remove(a);
                removed.insert(a);
            }
        }
        removed
    }

    /// Propagates to the fixpoint from the seed variables, mutating `domains`
    /// in place. Seeding queues every arc `(z, s)` with `z` a declared
    /// neighbor of a seed `s`, ascending. `Err` carries the partial counters
    /// when some domain wipes out.
    pub fn enforce(
        &self,
        domains: &mut [DomainSet],
        seeds: &[usize],
    ) -> Result<EnforceStats, EnforceStats> {
        assert_eq!(domains.len(), self.n, "one domain per variable");
        let mut queue = ArcQueue::new();
        let seed_arcs: BTreeSet<(usize, usize)> = seeds
            .iter()
            .flat_map(|&s| self.neighbors[s].iter().map(move |&z| (z, s)))
            .collect();
        for arc in seed_arcs {
            queue.push(arc);
        }
        let mut stats = EnforceStats::default();
        while let Some((x, y)) = queue.pop() {
            stats.revisions += 1;
            let removed = self.revise(domains, x, y);
            if !removed.is_empty() {
                stats.total_removed += removed.len() as u64;
                if domains[x].is_empty() {
                    return Err(stats);
                }
                for &z in &self.neighbors[x] {
                    queue.push((z, x));
                }
            }
        }
        Ok(stats)
    }

    /// Full enforcement from every variable, on matrix-shaped domains.
    pub fn enforce_matrix(
        &self,
        vars: &DomainMatrix,
        seeds: &[usize],
    ) -> Result<(DomainMatrix, EnforceStats), EnforceStats> {
        let mut domains = to_domain_sets(vars);
        match self.enforce(&mut domains, seeds) {
            Ok(stats) => Ok((from_domain_sets(&domains, self.d), stats)),
            Err(stats) => Err(stats),
        }
    }
}

pub fn to_domain_sets(vars: &DomainMatrix) -> Vec<DomainSet> {
    (0..vars.n())
        .map(|x| DomainSet::from_values(vars.d(), vars.present_values(x)))
        .collect()
}

pub fn from_domain_sets(domains: &[DomainSet], d: usize) -> DomainMatrix {
    let sets: Vec<BTreeSet<usize>> = domains
        .iter()
        .map(|s| s.values().into_iter().collect())
        .collect();
    DomainMatrix::from_sets(&sets, d).expect("values bounded by d")
}
