use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid chain parameters: {0}")]
    InvalidParams(String),

    #[error("site index {site} out of range 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("Chebyshev argument {0} outside [-1, 1]")]
    ChebyshevDomain(f64),

    /// The band is flat (J = 0), so there is no group velocity.
    #[error("degenerate band: coupling J is zero")]
    DegenerateBand,

    #[error("t* estimate undefined for J = mu = 0")]
    DegenerateScale,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("time grid is empty")]
    EmptyGrid,

    #[error("time grid must be nonnegative and strictly increasing (index {index})")]
    BadGrid { index: usize },

    #[error("oracle size {requested} exceeds cap {cap} (hard max {hard_max})")]
    OracleCap {
        requested: usize,
        cap: usize,
        hard_max: usize,
    },

    #[error("invalid hidden-variable instance: {0}")]
    InvalidInstance(String),

    #[error("partition mismatch: {0}")]
    PartitionMismatch(String),
}
