use std::path::PathBuf;

use chrono::NaiveDate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("empty file")]
    EmptyFile,

    #[error("bad header: expected `date,close`, found `{0}`")]
    BadHeader(String),

    #[error("malformed row {line}: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("non-positive price {value} at {date}")]
    NonPositivePrice { date: NaiveDate, value: f64 },

    #[error("non-finite price at {0}")]
    NonFinitePrice(NaiveDate),

    #[error("non-increasing dates: {prev} then {next}")]
    NonIncreasingDates { prev: NaiveDate, next: NaiveDate },

    #[error("length mismatch: {dates} dates, {closes} closes")]
    LengthMismatch { dates: usize, closes: usize },

    #[error("empty first part: no observation before {0}")]
    EmptyFirstPart(NaiveDate),

    #[error("empty second part: no observation on or after {0}")]
    EmptySecondPart(NaiveDate),

    #[error("series too short: need {needed}, have {have}")]
    TooShort { needed: usize, have: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid window {window} for length {len}")]
    InvalidWindow { window: usize, len: usize },

    #[error("degenerate block: every block has zero variance")]
    DegenerateBlock,

    #[error("fewer than 3 usable lag points ({0})")]
    TooFewLags(usize),

    #[error("empty input")]
    EmptyInput,

    #[error("index {index} is inside the warmup (first valid index {valid_from})")]
    Warmup { index: usize, valid_from: usize },

    #[error("index {index} has no next bar (length {len})")]
    NoNextBar { index: usize, len: usize },

    #[error("signals misaligned: {signals} markers for {prices} prices")]
    Misaligned { signals: usize, prices: usize },

    #[error("empty universe after filtering")]
    EmptyUniverse,

    #[error("evaluation range {eval_start}..={eval_end} overlaps training range {train_start}..={train_end}")]
    OverlappingRanges {
        train_start: NaiveDate,
        train_end: NaiveDate,
        eval_start: NaiveDate,
        eval_end: NaiveDate,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
