use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("evaluation point {re}+{im}i hits a pole of factor {factor}")]
    PoleHit { re: f64, im: f64, factor: usize },

    #[error("point of modulus {modulus} is not strictly inside the unit disc")]
    NotInDisc { modulus: f64 },

    #[error("a Blaschke product needs at least one zero")]
    EmptyProduct,

    #[error("root solve failed: residual {residual:e} exceeds tolerance")]
    RootSolveFailure { residual: f64 },

    #[error("fixed point counts match no classification case: {0}")]
    Degenerate(String),

    #[error("circle grid of size {0} is too coarse (need at least 8 nodes)")]
    GridTooCoarse(usize),

    #[error("lift increases by {found} over one turn, expected degree {expected}")]
    WindingMismatch { found: f64, expected: usize },

    #[error("found {found} of {expected} preimages")]
    BranchMiss { found: usize, expected: usize },

    #[error("arc not covered within {0} steps")]
    NotCovered(usize),

    #[error("random fixed point did not converge: {0}")]
    NotConverged(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("path index {index} outside realized window [{lo}, {hi})")]
    OutOfWindow { index: i64, lo: i64, hi: i64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
