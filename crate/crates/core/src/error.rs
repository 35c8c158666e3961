use thiserror::Error;

/// Errors raised by the geometric and combinatorial routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("consecutive points coincide")]
    DegenerateEdge,
    #[error("line through two coincident points")]
    DegenerateLine,
    #[error("lines are parallel")]
    ParallelLines,
    #[error("triangle is degenerate")]
    DegenerateTriangle,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("point coincides with a chord endpoint")]
    SingularPoint,
    #[error("region is unbounded for phi >= pi")]
    UnboundedRegion,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("infeasible input: {0}")]
    Infeasible(String),
    #[error("start point outside the admissible region: {0}")]
    InfeasibleStart(String),
    #[error("unsupported regime: n*phi = {0} >= pi")]
    UnsupportedRegime(f64),
    #[error("empty set")]
    EmptySet,
    #[error("empty lattice")]
    EmptyLattice,
    #[error("result exceeds the cap of {0} sequences")]
    CapExceeded(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
