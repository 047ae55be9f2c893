//! Error type shared by all kernels and pipelines in this crate.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Tensor shapes incompatible for the requested kernel.
    ShapeMismatch {
        context: &'static str,
        left: Vec<usize>,
        right: Vec<usize>,
    },
    /// A configuration violates its invariants.
    InvalidConfig(String),
    /// An argument is outside its documented domain.
    InvalidArgument(String),
    /// A non-finite value was produced where finiteness is an invariant.
    /// `block` is set when the fault is attributable to a transformer block.
    NumericFault {
        context: &'static str,
        block: Option<usize>,
    },
    /// Autodiff graph misuse (non-scalar loss, node from another graph).
    Graph(String),
    /// An operation received an empty collection it cannot handle.
    EmptyInput(&'static str),
    /// A token lineage entry points at a token that no longer exists.
    BrokenLineage { original: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ShapeMismatch { context, left, right } => {
                write!(f, "shape mismatch in {context}: {left:?} vs {right:?}")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid config: {msg}"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NumericFault { context, block } => match block {
                Some(b) => write!(f, "numeric fault in {context} at block {b}"),
                None => write!(f, "numeric fault in {context}"),
            },
            Error::Graph(msg) => write!(f, "graph error: {msg}"),
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
            Error::BrokenLineage { original } => {
                write!(f, "lineage for original token {original} is broken")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
