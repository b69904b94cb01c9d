use thiserror::Error;

/// Errors raised by the kernel, the class computations and the catalog engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An intermediate value left the exact 64-bit range.
    #[error("arithmetic overflow while computing {0}")]
    Overflow(String),

    /// Trial division hit its ceiling before the cofactor was resolved.
    #[error("factorization of {value} exceeded the trial-division ceiling {ceiling}")]
    FactorCeiling { value: u64, ceiling: u64 },

    /// The brute-force oracle could not finish; its answer would be incomplete.
    #[error("oracle failure for {context}: {source}")]
    Oracle {
        context: String,
        #[source]
        source: Box<Error>,
    },

    /// The embedded catalog asset is malformed.
    #[error("catalog record {record}: {message}")]
    Catalog { record: String, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn oracle(context: impl Into<String>, source: Error) -> Self {
        Error::Oracle {
            context: context.into(),
            source: Box::new(source),
        }
    }

    pub(crate) fn catalog(record: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Catalog {
            record: record.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
