use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Usage and validation errors. Domain wipeouts during enforcement are not
/// errors; they are reported through [`crate::rtac::Enforcement`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("axis {dim} out of range for rank {rank}")]
    AxisOutOfRange { dim: isize, rank: usize },
    #[error("axis {axis} has size {size}, expected size 1")]
    AxisNotUnit { axis: usize, size: usize },
    #[error("shape {shape:?} does not match data length {len}")]
    ShapeDataMismatch { shape: Vec<usize>, len: usize },
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("index {index} out of bounds for axis {axis} of size {size}")]
    IndexOutOfBounds {
        index: usize,
        axis: usize,
        size: usize,
    },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("value {value} is not in the domain of variable {var}")]
    ValueNotInDomain { var: usize, value: usize },
    #[error("variable index {var} out of range for {n} variables")]
    VariableOutOfRange { var: usize, n: usize },
    #[error("value index {value} out of range for domain size {d}")]
    ValueOutOfRange { value: usize, d: usize },
    #[error("no unassigned variable left to select")]
    AllAssigned,
    #[error("instance too large to enumerate: d^n exceeds {limit}")]
    InstanceTooLarge { limit: u64 },
    #[error("malformed instance JSON: {0}")]
    Json(#[from] serde_json::Error),
}
