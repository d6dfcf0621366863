use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid problem spec: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range for {bound} r-subsets")]
    RankOutOfRange { index: u64, bound: u64 },

    #[error("intersection spectrum not realizable: Venn part {label:#b} would be {value}")]
    Unrealizable { label: usize, value: i128 },

    #[error("{engine} engine budget exceeded: needs {required}, budget is {budget}")]
    BudgetExceeded {
        engine: &'static str,
        required: String,
        budget: u64,
    },

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
