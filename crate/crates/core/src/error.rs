use thiserror::Error;

/// Errors produced by the detection and training stack.
#[derive(Error, Debug)]
pub enum Error {
    /// Matrix/vector dimensions do not agree.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A parameter is outside its mathematical domain (e.g. sigma2 <= 0).
    #[error("domain error: {0}")]
    Domain(String),

    /// A binary file failed to parse. `offset` is the byte position of the
    /// first inconsistency.
    #[error("format error at byte {offset}: {reason}")]
    Format { offset: u64, reason: String },

    /// Exhaustive MAP enumeration would exceed the configured budget.
    #[error("MAP enumeration needs {required} hypotheses, budget is {budget}; \
             reduce the antenna count or alphabet size")]
    EnumerationBudget { required: u128, budget: u128 },

    /// The regularized MMSE system could not be factorized.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A dataset with zero samples was given where a rate is undefined.
    #[error("empty dataset: error rate undefined")]
    EmptyDataset,

    /// Training produced a non-finite loss.
    #[error("non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    /// Dataset/config combination is inconsistent.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
