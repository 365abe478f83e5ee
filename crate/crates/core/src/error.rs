use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{routine} did not converge after {iterations} sweeps (off-diagonal residual {residual:.3e})")]
    NonConvergence {
        routine: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("construction error: identity `{identity}` fails at n = {n} (residual {residual:.3e})")]
    Construction { identity: String, n: usize, residual: f64 },

    #[error("verification failure at block {block}: {detail}")]
    Verification { block: usize, detail: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn shape_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Shape(msg.into()))
}

pub(crate) fn domain_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
