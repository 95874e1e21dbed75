use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("feasibility error: {0}")]
    Feasibility(String),
    #[error("integration error: {0}")]
    Integration(String),
    #[error("degenerate orbit: {0}")]
    Degenerate(String),
    #[error("parity error: {0}")]
    Parity(String),
    #[error("invalid config: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
