use thiserror::Error;

/// Errors raised by problem construction, linear algebra and the solvers.
///
/// Non-convergence is never an error: solvers report it through their result
/// types. Errors are reserved for invalid input and failed evaluations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unrecognized problem id `{0}`")]
    UnknownProblemId(String),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("unknown start `{start}` for problem `{problem}`")]
    UnknownStart { problem: String, start: String },

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("singular matrix (pivot magnitude {pivot:e})")]
    Singular { pivot: f64 },

    #[error("residual evaluation produced non-finite values at x = {x:?}")]
    Evaluation { x: Vec<f64> },

    #[error("finite-difference evaluation failed while perturbing column {column}")]
    FdEvaluation { column: usize },

    #[error("degenerate step: the step vector has zero length")]
    DegenerateStep,

    #[error("invalid option: {0}")]
    InvalidOption(String),

    #[error("empty request: {0}")]
    EmptyRequest(&'static str),

    #[error("could not write output: {0}")]
    Output(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension {
            context,
            expected,
            got,
        })
    }
}
