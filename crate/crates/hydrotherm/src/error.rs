use thiserror::Error;

/// Errors produced by the engine, grouped by the process-exit class the CLI
/// maps them to (config = 1, solver = 2, io = 3).
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("solver failed at step {step}: {phase} did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    Solver {
        step: usize,
        phase: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("i/o error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn mesh(msg: impl Into<String>) -> Self {
        Error::Mesh(msg.into())
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code the CLI reports for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Mesh(_) => 1,
            Error::Solver { .. } => 2,
            Error::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
