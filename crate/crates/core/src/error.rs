use thiserror::Error;

/// Errors raised across the pipeline. The CLI maps them to exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate weight: {0}")]
    DegenerateWeight(String),
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("point lies on the cut; use the trace evaluator: {0}")]
    AmbiguousTrace(String),
    #[error("too close to a contour: {0}")]
    Proximity(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("precision failure: {0}")]
    Precision(String),
    #[error("index {0} is not allowable")]
    ExcludedIndex(usize),
    #[error("unsupported regime: {0}")]
    Unsupported(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("{module}: {source}")]
    Tagged {
        module: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn tag(self, module: &'static str) -> Error {
        Error::Tagged { module, source: Box::new(self) }
    }

    /// Innermost error, skipping module tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::Tagged { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn is_precision(&self) -> bool {
        matches!(self.root(), Error::Precision(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
