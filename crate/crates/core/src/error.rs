use thiserror::Error;

/// Errors raised anywhere in the laboratory.
///
/// The type is `Clone` so that per-index caches can hold a failed
/// computation and hand the same error to every consumer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The piecewise description of a random variable is malformed, or an
    /// operation produced a piece outside the supported expression set.
    #[error("representation error: {0}")]
    Representation(String),

    /// Quadrature could not reach the requested tolerance within budget.
    #[error(
        "accuracy error: estimate {estimate} has error bound {error_bound:e} above tolerance {tolerance:e} after {evaluations} evaluations"
    )]
    Accuracy {
        estimate: f64,
        error_bound: f64,
        tolerance: f64,
        evaluations: usize,
    },

    /// A parameter is outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An operation was called outside its precondition.
    #[error("precondition error: {0}")]
    Precondition(String),

    /// A term generator failed at a specific index.
    #[error("term evaluation failed at n = {index}: {source}")]
    TermEvaluation { index: u64, source: Box<Error> },

    /// External input (a term file) could not be read or parsed. Line 0
    /// means the file as a whole.
    #[error("input error at line {line}: {message}")]
    Input { line: usize, message: String },

    /// A Lipschitz witness was malformed.
    #[error("witness error: {0}")]
    Witness(String),
}

impl Error {
    /// Strips `TermEvaluation` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::TermEvaluation { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_accuracy(&self) -> bool {
        matches!(self.root(), Error::Accuracy { .. })
    }

    pub fn is_parameter(&self) -> bool {
        matches!(self.root(), Error::Parameter(_) | Error::Precondition(_))
    }

    pub fn is_input(&self) -> bool {
        matches!(self.root(), Error::Input { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
