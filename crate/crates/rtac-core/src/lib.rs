//! Arc consistency for binary CSPs, two ways: a whole-network enforcement
//! loop built from a handful of dense tensor operations, and the classic
//! sequential queue-based baseline. A definitional fixpoint oracle arbitrates
//! both, a MAC backtracking search drives them, and a seeded random instance
//! generator plus benchmark grid reproduce revision/recurrence statistics.
//!
//! Modules:
//! - [`tensor`]: minimal dense integer tensor kernel with a deterministic
//!   data-parallel contract.
//! - [`model`]: instances, domain matrix, constraint tensor, instance JSON.
//! - [`rtac`]: recurrent tensor enforcement engine.
//! - [`ac3`]: queue-based sequential baseline.
//! - [`oracle`]: exhaustive-scan fixpoint and brute-force solution
//!   enumeration; the ground truth for everything else.
//! - [`search`]: backtracking search maintaining arc consistency.
//! - [`generator`]: seeded random instance generation.
//! - [`bench`]: benchmark grid runner and CSV/JSON rendering.

pub mod ac3;
pub mod bench;
mod clock;
mod error;
pub mod generator;
pub mod model;
pub mod oracle;
pub mod rtac;
pub mod search;
pub mod tensor;

pub use error::{Error, Result};
pub use generator::{generate, GenConfig};
pub use model::{BinaryConstraint, ConstraintTensor, CspInstance, DomainMatrix, GenMeta};
pub use rtac::{EnforceStats, Enforcement, Enforcer};
pub use search::{solve, EngineKind, SearchStats, SolveOutcome};
