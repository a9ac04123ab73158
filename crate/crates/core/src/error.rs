use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the engine, the data pipeline and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid genome: {0}")]
    InvalidGenome(String),

    #[error("input vector has {got} entries but the network has {expected} input neurons")]
    InputArity { expected: usize, got: usize },

    #[error("output read before any evaluation step was performed")]
    NotEvaluated,

    #[error("cycle detected among forward synapses")]
    ForwardCycle,

    #[error("missing previous activation for neuron {0}")]
    MissingActivation(u32),

    #[error("genome kinds differ: {0} vs {1}")]
    KindMismatch(&'static str, &'static str),

    #[error("selection requires at least one individual with positive fitness")]
    ZeroFitness,

    #[error("population of {population} cannot hold {required} {what}")]
    PopulationTooSmall {
        population: usize,
        required: usize,
        what: &'static str,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("signal of length {len} is shorter than window width {width}")]
    SignalTooShort { len: usize, width: usize },

    #[error("empty recording set")]
    EmptySubset,

    #[error("data error: {0}")]
    Data(String),

    #[error("malformed metadata row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),

    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
