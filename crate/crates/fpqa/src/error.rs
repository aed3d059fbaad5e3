use std::io;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: unsupported gate `{name}`")]
    UnsupportedGate { line: usize, name: String },
    #[error("probability must lie in (0, 1], got {0}")]
    Probability(f64),
    #[error("no simple {k}-regular graph on {n} vertices")]
    InfeasibleRegular { n: u32, k: u32 },
    #[error("cannot place CNOTs on {0} qubit(s)")]
    TooFewQubits(u32),
    #[error(transparent)]
    Core(#[from] fpqa_core::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}
