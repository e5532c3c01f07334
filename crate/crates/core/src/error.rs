use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("zero distance on cross link {0}")]
    ZeroDistance(&'static str),

    #[error("channel {0} is not full rank; redraw the channels")]
    RankDegenerate(&'static str),

    #[error("requested {requested} vectors from {subset} but only {budget} are available")]
    BudgetExceeded {
        subset: &'static str,
        requested: usize,
        budget: usize,
    },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("power grid needs at least two distinct points")]
    DegenerateGrid,

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
