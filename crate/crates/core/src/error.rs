use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: argument out of domain ({detail})")]
    Domain { op: &'static str, detail: String },

    #[error("{op}: series tail {tail:e} above tolerance after {terms} terms")]
    NonConvergence { op: &'static str, terms: usize, tail: f64 },

    #[error("{op}: no sign change on scanned interval [{lo}, {hi}]")]
    Bracket { op: &'static str, lo: f64, hi: f64 },

    #[error("{op}: iteration limit reached (last step {step:e})")]
    IterationLimit { op: &'static str, step: f64 },

    #[error("polyline separation failed: {0}")]
    Separation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("singular grid system: {0}")]
    SingularSystem(String),

    #[error("linear solve did not converge: relative residual {residual:e} after {iterations} iterations")]
    SolverNonConvergence { iterations: usize, residual: f64 },

    #[error("inversion center unusable: {0}")]
    InversionCenter(String),

    #[error("grid graph is disconnected: {0}")]
    Disconnected(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("at H = {h}: {source}")]
    AtStretch {
        h: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { op, detail: detail.into() }
    }

    pub(crate) fn at_stretch(self, h: f64) -> Self {
        Error::AtStretch { h, source: Box::new(self) }
    }

    /// True for errors caused by malformed user input (as opposed to
    /// numerical failures).
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Input(_) | Error::InvalidShape(_) | Error::InvalidParameter(_) => true,
            Error::AtStretch { source, .. } => source.is_input_error(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
