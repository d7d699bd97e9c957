use thiserror::Error;

/// Failures reported by the engine. None of them carry partial results.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("differentials do not compose to zero")]
    NotAComplex,
    #[error("element `{0}` is not homogeneous")]
    InhomogeneousElement(String),
    #[error("H^{i} in internal degree {j} did not stabilize by power {max_power}")]
    StabilizationNotReached { i: usize, j: i64, max_power: u32 },
    #[error("window too small to certify: {0}")]
    WindowTooSmall(String),
    #[error("page does not collapse by position: {0} potential differentials")]
    NotCollapsed(usize),
    #[error("corner algebra not resolvable: {0}")]
    CornerNotResolvable(String),
    #[error("invalid group action: {0}")]
    InvalidAction(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
