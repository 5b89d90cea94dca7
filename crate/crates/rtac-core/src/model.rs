//! Problem representation: variables with a uniform domain `0..d`, sparse
//! extensional binary constraints, and the dense tensor encodings the
//! enforcement loop operates on.
//!
//! The sparse constraint list is the source of truth; the dense
//! [`ConstraintTensor`] and boolean [`DomainMatrix`] are derived from it.
//! Unconstrained variable pairs and every diagonal block encode the universal
//! relation (all ones), so enforcement treats them as vacuously satisfied.

use crate::error::{Error, Result};
use crate::tensor::Tensor;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// One extensional constraint between variables `x < y`. `allowed` holds the
/// permitted `(a, b)` value pairs, sorted lexicographically and deduplicated.
/// An empty `allowed` list is legal and encodes a hard conflict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryConstraint {
    pub x: usize,
    pub y: usize,
    pub allowed: Vec<(usize, usize)>,
}

/// Generation provenance carried inside instance files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenMeta {
    pub n: usize,
    pub d: usize,
    pub density: f64,
    pub tightness: f64,
    pub seed: u64,
    pub prng: String,
}

/// Immutable binary-CSP description.
///
/// The JSON form is normative and bit-stable for a fixed instance:
/// `{"n": int, "d": int, "constraints": [{"x", "y", "allowed": [[a, b], ...]}, ...]}`
/// with `x < y`, constraints sorted by `(x, y)`, allowed pairs sorted
/// lexicographically, UTF-8, newline-terminated. Generated instances carry a
/// sibling `"gen"` metadata object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CspInstance {
    n: usize,
    d: usize,
    constraints: Vec<BinaryConstraint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gen: Option<GenMeta>,
}

/// Values of `y` compatible with a fixed `(x, a)` on one constraint.
pub type SupportSet = BTreeSet<usize>;

impl CspInstance {
    /// Validates and normalizes a sparse instance: constraints sorted by
    /// `(x, y)`, allowed pairs sorted and deduplicated.
    pub fn new(n: usize, d: usize, constraints: Vec<BinaryConstraint>) -> Result<Self> {
        let mut inst = Self {
            n,
            d,
            constraints,
            gen: None,
        };
        inst.normalize();
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_gen_meta(mut self, meta: GenMeta) -> Self {
        self.gen = Some(meta);
        self
    }

    fn normalize(&mut self) {
        for c in &mut self.constraints {
            c.allowed.sort_unstable();
            c.allowed.dedup();
        }
        self.constraints.sort_by_key(|c| (c.x, c.y));
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInstance("n must be at least 1".into()));
        }
        if self.d == 0 {
            return Err(Error::InvalidInstance("d must be at least 1".into()));
        }
        let mut seen = BTreeSet::new();
        for c in &self.constraints {
            if c.x >= c.y {
                return Err(Error::InvalidInstance(format!(
                    "constraint ({}, {}) must have x < y",
                    c.x, c.y
                )));
            }
            if c.y >= self.n {
                return Err(Error::InvalidInstance(format!(
                    "constraint ({}, {}) references a variable >= n = {}",
                    c.x, c.y, self.n
                )));
            }
            if !seen.insert((c.x, c.y)) {
                return Err(Error::InvalidInstance(format!(
                    "duplicate constraint on pair ({}, {})",
                    c.x, c.y
                )));
            }
            for &(a, b) in &c.allowed {
                if a >= self.d || b >= self.d {
                    return Err(Error::InvalidInstance(format!(
                        "allowed pair ({a}, {b}) out of range for d = {}",
                        self.d
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn constraints(&self) -> &[BinaryConstraint] {
        &self.constraints
    }

    pub fn gen_meta(&self) -> Option<&GenMeta> {
        self.gen.as_ref()
    }

    /// Declared constraint touching the unordered pair `{x, y}`, if any,
    /// along with whether `(x, y)` is flipped relative to the stored `x < y`.
    pub fn constraint_between(&self, x: usize, y: usize) -> Option<(&BinaryConstraint, bool)> {
        let (lo, hi, flipped) = if x < y { (x, y, false) } else { (y, x, true) };
        self.constraints
            .binary_search_by_key(&(lo, hi), |c| (c.x, c.y))
            .ok()
            .map(|i| (&self.constraints[i], flipped))
    }

    /// Variables sharing a declared constraint with `x`, ascending.
    pub fn neighbors(&self, x: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .constraints
            .iter()
            .filter_map(|c| {
                if c.x == x {
                    Some(c.y)
                } else if c.y == x {
                    Some(c.x)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Supports of `(x, a)` on the pair `{x, y}`: the values `b` of `y` with
    /// `(a, b)` allowed. For an undeclared pair this is the full value range.
    pub fn support_set(&self, x: usize, y: usize, a: usize) -> Result<SupportSet> {
        if x >= self.n {
            return Err(Error::VariableOutOfRange { var: x, n: self.n });
        }
        if y >= self.n || y == x {
            return Err(Error::VariableOutOfRange { var: y, n: self.n });
        }
        if a >= self.d {
            return Err(Error::ValueOutOfRange {
                value: a,
                d: self.d,
            });
        }
        Ok(match self.constraint_between(x, y) {
            None => (0..self.d).collect(),
            Some((c, flipped)) => c
                .allowed
                .iter()
                .filter_map(|&(p, q)| {
                    let (xa, yb) = if flipped { (q, p) } else { (p, q) };
                    (xa == a).then_some(yb)
                })
                .collect(),
        })
    }

    /// True iff a complete assignment (one value per variable) satisfies
    /// every declared constraint.
    pub fn check_assignment(&self, values: &[usize]) -> bool {
        values.len() == self.n
            && values.iter().all(|&v| v < self.d)
            && self
                .constraints
                .iter()
                .all(|c| c.allowed.binary_search(&(values[c.x], values[c.y])).is_ok())
    }

    /// Dense encodings: an all-ones domain matrix and the constraint tensor.
    pub fn build_tensors(&self) -> (DomainMatrix, ConstraintTensor) {
        let (n, d) = (self.n, self.d);
        let mut cons = vec![1u32; n * n * d * d];
        let block = d * d;
        for c in &self.constraints {
            let fwd = (c.x * n + c.y) * block;
            let rev = (c.y * n + c.x) * block;
            cons[fwd..fwd + block].fill(0);
            cons[rev..rev + block].fill(0);
            for &(a, b) in &c.allowed {
                cons[fwd + a * d + b] = 1;
                cons[rev + b * d + a] = 1;
            }
        }
        let tensor = Tensor::new(vec![n, n, d, d], cons).expect("constraint tensor shape");
        (DomainMatrix::full(n, d), ConstraintTensor(tensor))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut inst: CspInstance = serde_json::from_str(text)?;
        inst.normalize();
        inst.validate()?;
        Ok(inst)
    }

    /// Normative newline-terminated JSON form.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("instance serializes");
        s.push('\n');
        s
    }
}

/// Live domains of all variables as an `[n, d]` boolean-role tensor;
/// `cell[x][a] = 1` means variable `x` still has value `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainMatrix(Tensor);

impl DomainMatrix {
    /// Full domains: every variable keeps every value.
    pub fn full(n: usize, d: usize) -> Self {
        DomainMatrix(Tensor::ones(vec![n, d]))
    }

    /// Wraps an `[n, d]` boolean-role tensor.
    pub fn from_tensor(tensor: Tensor) -> Result<Self> {
        if tensor.rank() != 2 {
            return Err(Error::ShapeMismatch {
                left: tensor.shape().to_vec(),
                right: vec![0, 0],
            });
        }
        if tensor.data().iter().any(|&v| v > 1) {
            return Err(Error::InvalidInstance(
                "domain matrix cells must be 0 or 1".into(),
            ));
        }
        Ok(DomainMatrix(tensor))
    }

    pub fn tensor(&self) -> &Tensor {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.shape()[0]
    }

    pub fn d(&self) -> usize {
        self.0.shape()[1]
    }

    pub fn contains(&self, x: usize, a: usize) -> bool {
        self.0.data()[x * self.d() + a] != 0
    }

    /// Per-variable domain cardinalities.
    pub fn cardinalities(&self) -> Vec<u32> {
        self.0.sum_along(1).expect("rank-2 matrix").data().to_vec()
    }

    /// Values still present for variable `x`, ascending.
    pub fn present_values(&self, x: usize) -> Vec<usize> {
        let d = self.d();
        let row = &self.0.data()[x * d..(x + 1) * d];
        row.iter()
            .enumerate()
            .filter_map(|(a, &v)| (v != 0).then_some(a))
            .collect()
    }

    pub fn live_count(&self) -> u64 {
        self.0.data().iter().map(|&v| u64::from(v)).sum()
    }

    /// Pairs `(x, a)` present in `earlier` but not in `self`.
    pub fn removed_relative(&self, earlier: &DomainMatrix) -> BTreeSet<(usize, usize)> {
        let d = self.d();
        earlier
            .0
            .data()
            .iter()
            .zip(self.0.data())
            .enumerate()
            .filter_map(|(flat, (&before, &after))| {
                (before != 0 && after == 0).then_some((flat / d, flat % d))
            })
            .collect()
    }

    /// Cellwise subset check: nothing present here is absent in `other`.
    pub fn is_subset_of(&self, other: &DomainMatrix) -> bool {
        self.0
            .data()
            .iter()
            .zip(other.0.data())
            .all(|(&a, &b)| a <= b)
    }

    pub fn to_sets(&self) -> Vec<BTreeSet<usize>> {
        (0..self.n())
            .map(|x| self.present_values(x).into_iter().collect())
            .collect()
    }

    pub fn from_sets(sets: &[BTreeSet<usize>], d: usize) -> Result<Self> {
        let n = sets.len();
        let mut data = vec![0u32; n * d];
        for (x, set) in sets.iter().enumerate() {
            for &a in set {
                if a >= d {
                    return Err(Error::ValueOutOfRange { value: a, d });
                }
                data[x * d + a] = 1;
            }
        }
        Ok(DomainMatrix(Tensor::new(vec![n, d], data)?))
    }

    /// Copy with row `x` replaced by the unit row at `val`. The receiver is
    /// untouched; callers keep value semantics during search.
    pub fn with_unit_row(&self, x: usize, val: usize) -> Result<Self> {
        let (n, d) = (self.n(), self.d());
        if x >= n {
            return Err(Error::VariableOutOfRange { var: x, n });
        }
        if val >= d {
            return Err(Error::ValueOutOfRange { value: val, d });
        }
        let mut data = self.0.data().to_vec();
        data[x * d..(x + 1) * d].fill(0);
        data[x * d + val] = 1;
        Ok(DomainMatrix(Tensor::new(vec![n, d], data)?))
    }
}

/// All binary relations as an `[n, n, d, d]` boolean-role tensor.
/// `cell[x][y][a][b] = 1` iff `y = b` supports `x = a`; symmetric under
/// `(x, y, a, b) -> (y, x, b, a)`; undeclared pairs and diagonal blocks are
/// all-ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintTensor(Tensor);

impl ConstraintTensor {
    pub fn tensor(&self) -> &Tensor {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.shape()[0]
    }

    pub fn d(&self) -> usize {
        self.0.shape()[2]
    }

    pub fn allows(&self, x: usize, y: usize, a: usize, b: usize) -> bool {
        self.0.get(&[x, y, a, b]) != 0
    }
}
