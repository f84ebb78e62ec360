use std::fmt;

/// Error raised by a user-supplied function (map, filter, key, reduce).
pub type UserError = Box<dyn std::error::Error + Send + Sync + 'static>;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// How a domain can be cut into independent pieces of work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slicing {
    Full,
    Filtered,
    None,
}

impl fmt::Display for Slicing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Slicing::Full => "full slicing",
            Slicing::Filtered => "filtered slicing",
            Slicing::None => "no slicing",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("canonical forms need a strict domain, but {construction} is not strict")]
    NonStrict { construction: String },

    #[error("{domain} does not support {requested} (it has {available})")]
    UnsupportedSlicing {
        domain: String,
        requested: Slicing,
        available: Slicing,
    },

    #[error("slice [{offset}, {offset}+{count}) exceeds the span {span} of {domain}")]
    SliceOutOfRange {
        domain: String,
        offset: u64,
        count: u64,
        span: String,
    },

    #[error("size of {domain} does not fit the requested integer width")]
    SizeOverflow { domain: String },

    #[error("{stage} failed on element {element}: {source}")]
    Transform {
        stage: String,
        element: String,
        #[source]
        source: UserError,
    },

    #[error("sampling gave up after {attempts} rejected attempts (last rejected by filter `{filter}`)")]
    SamplingFailed { filter: String, attempts: u32 },

    #[error("cannot sample from an empty domain: {domain}")]
    EmptyDomain { domain: String },

    #[error("reduce over an empty stream needs an initial value")]
    EmptyReduce,

    #[error("{item} is not a canonical form")]
    NotCanonical { item: String },

    #[error("{item} is isomorphic to an earlier item")]
    DuplicateClass { item: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain spec: {0}")]
    Spec(String),

    #[error("job {job} failed twice: {source}")]
    JobFailed {
        job: String,
        #[source]
        source: Box<Error>,
    },

    #[error("worker panicked: {0}")]
    WorkerPanic(String),

    #[error("execution incomplete: missing result for job {job}")]
    IncompleteExecution { job: u64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
