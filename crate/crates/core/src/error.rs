use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shooting interval [{lo}, {hi}] does not separate crossing from turning trajectories")]
    NonBracketed { lo: f64, hi: f64 },

    #[error("{what} did not converge after {iterations} iterations (last residual {residual:.3e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("profile tail is unusable for a decay fit: {0}")]
    BadTail(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("core width {width:.3e} is resolved by fewer than 8 grid spacings (h = {h:.3e})")]
    UnderResolved { width: f64, h: f64 },

    #[error("mountain-pass geometry violated: {0}")]
    GeometryViolated(String),

    #[error("converged to a different critical point: {0}")]
    WrongBranch(String),

    #[error("field has several comparable peaks (ratio {ratio:.3})")]
    MultiPeak { ratio: f64 },

    #[error("q = {q}: {source}")]
    AtExponent {
        q: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("value out of range for `{key}`: {msg}")]
    Range { key: String, msg: String },

    #[error("malformed field dump: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Range { .. } | Error::Io(_) | Error::Format(_) => 2,
            Error::AtExponent { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}
