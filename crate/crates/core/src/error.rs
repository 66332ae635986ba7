use crate::scalar::ExactScalar;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("rank {rank} with support exponent {support_exp} needs {expected} values, got {got}")]
    LengthMismatch {
        rank: i32,
        support_exp: i32,
        expected: usize,
        got: usize,
    },

    #[error("rank {rank} and support exponent {support_exp} must satisfy rank + support_exp >= 0")]
    InvalidShape { rank: i32, support_exp: i32 },

    #[error("step function would hold 2^{0} values, above the limit of 2^{max}", max = crate::stepfn::MAX_LOG_LEN)]
    TooLarge(i64),

    #[error("cannot refine rank {from} down to coarser rank {to}")]
    RankDecrease { from: i32, to: i32 },

    #[error("mask coefficients sum to {0}, expected 2")]
    SumNotTwo(Box<ExactScalar>),

    #[error("mask coefficients sum to zero and cannot be normalized")]
    ZeroSum,

    #[error("a mask needs at least one coefficient")]
    EmptyMask,

    #[error("coefficient c_{index} = {value} is not a non-negative real number")]
    NotNonNegative { index: usize, value: Box<ExactScalar> },

    #[error("start function has zero integral")]
    ZeroIntegral,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: u64, column: u64, message: String },

    #[error("internal consistency check failed: {0}")]
    Defect(String),
}

impl Error {
    pub(crate) fn parse(line: u64, column: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// True for errors caused by input that violates an operation's
    /// precondition, as opposed to malformed input.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::SumNotTwo(_)
                | Error::ZeroSum
                | Error::EmptyMask
                | Error::NotNonNegative { .. }
                | Error::ZeroIntegral
                | Error::RankDecrease { .. }
                | Error::InvalidArgument(_)
                | Error::TooLarge(_)
                | Error::InvalidShape { .. }
        )
    }
}
