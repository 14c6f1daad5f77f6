use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("no simple 3-regular graph on {nodes} nodes: need an even node count of at least 4")]
    DegreeInfeasible { nodes: usize },

    #[error("{what} needs {requested} qubits but the configured limit is {limit}")]
    ResourceLimit {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),

    #[error("parse error in field `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("objective returned non-finite value {value} at evaluation {eval_index}")]
    NonFiniteObjective { eval_index: usize, value: f64 },

    #[error("integration drifted by {drift:e} with dt = {dt}; use a smaller step")]
    Integration { drift: f64, dt: f64 },

    #[error("record set mixes solvers; plot one run at a time")]
    MixedSolvers,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by user input rather than by the run itself.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Parse { .. } | Error::DegreeInfeasible { .. }
        )
    }
}
