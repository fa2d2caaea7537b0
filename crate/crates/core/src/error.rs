use thiserror::Error;

/// Errors produced by the solver and its supporting modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CcboError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("non-finite objective value at particle {particle}")]
    ObjectiveEvaluation { particle: usize },

    #[error("non-finite constraint evaluation: {0}")]
    ConstraintEvaluation(String),

    #[error("degenerate segment: endpoints coincide")]
    DegenerateSegment,

    #[error("linear solve failed: {0}")]
    Solve(String),

    #[error("step failed at particle {particle}: {reason}")]
    Step { particle: usize, reason: String },

    #[error("unsupported baseline: {0}")]
    UnsupportedBaseline(String),

    #[error("undefined metric: {0}")]
    Metric(String),

    #[error("decay fit failed: {0}")]
    Fit(String),

    #[error("run {seed} failed: {source}")]
    Run {
        seed: u64,
        #[source]
        source: Box<CcboError>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, CcboError>;

impl From<std::io::Error> for CcboError {
    fn from(e: std::io::Error) -> Self {
        CcboError::Io(e.to_string())
    }
}

impl From<csv::Error> for CcboError {
    fn from(e: csv::Error) -> Self {
        CcboError::Io(e.to_string())
    }
}
