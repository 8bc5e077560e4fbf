use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("{name} = {value} out of range {range}")]
    Range {
        name: &'static str,
        value: i64,
        range: String,
    },

    #[error("request spans {0} windows, expected one")]
    MultipleWindows(usize),

    #[error("fanout {got} exceeds f = {f}")]
    FanoutExceeded { got: usize, f: usize },

    #[error("output {0} is already in use")]
    OutputBusy(String),

    #[error("input {0} already has an active request")]
    InputBusy(String),

    #[error("unknown request id {0}")]
    UnknownId(u64),

    #[error("duplicate request id {0}")]
    DuplicateId(u64),

    #[error("no printed case matches d={d} n={n} t={t} f={f}")]
    CaseGap { d: u32, n: u32, t: u32, f: u64 },

    #[error("coloring failed for edge {0}; this is a bug")]
    ColoringFailure(u64),

    #[error("instance too large for exhaustive search ({0} edges)")]
    SizeLimit(usize),

    #[error("scheme is infeasible: {0}")]
    InfeasibleScheme(String),

    #[error("constraint {constraint} violated at {index}")]
    Infeasible { constraint: String, index: String },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn range_err(name: &'static str, value: i64, lo: i64, hi: i64) -> Error {
    Error::Range {
        name,
        value,
        range: format!("[{lo}, {hi}]"),
    }
}

pub(crate) fn check_range(name: &'static str, value: i64, lo: i64, hi: i64) -> Result<()> {
    if value < lo || value > hi {
        Err(range_err(name, value, lo, hi))
    } else {
        Ok(())
    }
}
