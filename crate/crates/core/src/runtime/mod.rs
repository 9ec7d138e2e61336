//! Simulated partitioned global address space.

pub mod elem;
pub mod layout;
pub mod mshd;
pub mod redistribute;
pub mod trace;
pub mod world;

pub use elem::Elem;
pub use layout::{owner_of, partition_bounds, ArrayDescriptor, DistSpec, Owner, Region};
pub use redistribute::{placed_blocks, plan_redistribution, PlacedBlock, Segment};
pub use trace::{canonical_order, render, TraceEvent, TraceKind, TraceParseError};
pub use world::{ArrayId, Block, DistributedArray, World};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RuntimeError {
    #[error("cannot split {n} items into {p} parts")]
    InvalidPartition { n: usize, p: usize },
    #[error("index out of bounds: {what}")]
    IndexOutOfBounds { what: String },
    #[error("bad distribution: {0}")]
    BadDistribution(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("share footprint mismatch: {0}")]
    ShareFootprintMismatch(String),
    #[error("channel misuse: {0}")]
    ChannelMisuse(String),
    #[error("not owner: {0}")]
    NotOwner(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("bad length: {0}")]
    BadLength(String),
    #[error("not a power of two: {0}")]
    NotPowerOfTwo(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("deadlock: {0}")]
    Deadlock(String),
    #[error(transparent)]
    Type(#[from] crate::typesys::TypeError),
    #[error("{0}")]
    Other(String),
}

impl RuntimeError {
    /// Stable name used in diagnostics.
    pub fn rule(&self) -> &'static str {
        match self {
            RuntimeError::InvalidPartition { .. } => "InvalidPartition",
            RuntimeError::IndexOutOfBounds { .. } => "IndexOutOfBounds",
            RuntimeError::BadDistribution(_) => "BadDistribution",
            RuntimeError::ShapeMismatch(_) => "ShapeMismatch",
            RuntimeError::TypeMismatch(_) => "TypeMismatch",
            RuntimeError::ShareFootprintMismatch(_) => "ShareFootprintMismatch",
            RuntimeError::ChannelMisuse(_) => "ChannelMisuse",
            RuntimeError::NotOwner(_) => "NotOwner",
            RuntimeError::Io(_) => "IoError",
            RuntimeError::Format(_) => "FormatError",
            RuntimeError::BadLength(_) => "BadLength",
            RuntimeError::NotPowerOfTwo(_) => "NotPowerOfTwo",
            RuntimeError::DivisionByZero => "DivisionByZero",
            RuntimeError::Deadlock(_) => "Deadlock",
            RuntimeError::Type(e) => crate::typesys::check::type_error_rule(e),
            RuntimeError::Other(_) => "RuntimeError",
        }
    }

    pub fn is_io(&self) -> bool {
        matches!(self, RuntimeError::Io(_))
    }
}
