use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("condition `{condition}` has no votes")]
    EmptyVotes { condition: String },

    #[error("condition `{condition}`: vote {vote} outside scale [{lo}, {hi}]")]
    VoteOutOfScale {
        condition: String,
        vote: i64,
        lo: i64,
        hi: i64,
    },

    #[error("invalid scale [{lo}, {hi}]: lower bound must be below upper bound")]
    InvalidScale { lo: i64, hi: i64 },

    #[error("condition `{condition}`: {reason}")]
    InvalidEstimate { condition: String, reason: String },

    #[error("duplicate condition id `{0}`")]
    DuplicateCondition(String),

    #[error("need at least {needed} conditions, got {got}")]
    TooFewConditions { needed: usize, got: usize },

    #[error("condition `{condition}` has no 95% confidence interval")]
    MissingCi { condition: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// One of the rank vectors has zero variance.
    #[error("undefined correlation: a rank vector is constant")]
    UndefinedCorrelation,

    #[error("{name} = {value} is out of range ({expected})")]
    OutOfRange {
        name: &'static str,
        value: String,
        expected: String,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot read `{}`: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(
        "`{}`: unrecognised header `{header}`; expected `condition,mos,ci95[,n[,sd]]` or `condition,vote`",
        path.display()
    )]
    UnknownSchema { path: PathBuf, header: String },

    #[error("`{}` line {line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("condition ids differ between inputs (only in A: [{}]; only in B: [{}])", only_a.join(", "), only_b.join(", "))]
    UnmatchedIds {
        only_a: Vec<String>,
        only_b: Vec<String>,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn out_of_range(
        name: &'static str,
        value: impl ToString,
        expected: impl Into<String>,
    ) -> Self {
        Error::OutOfRange {
            name,
            value: value.to_string(),
            expected: expected.into(),
        }
    }

    /// Degenerate statistics are distinguished from bad input so callers
    /// can map them to a separate exit status.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::UndefinedCorrelation)
    }
}
