use thiserror::Error;

/// Failure modes shared by every module of the library.
///
/// The CLI maps these onto exit codes, so the variants are grouped by who is
/// at fault: the caller (`Argument`, `Domain`, `Unsupported`), the machine
/// (`Resource`, `Overflow`), or the library itself (`Invariant`).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource limit exceeded while {what}: attempted {attempted}, limit {limit}")]
    Resource {
        what: String,
        attempted: u128,
        limit: u128,
    },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("invariant failure: {0}")]
    Invariant(String),

    #[error("no base builder for leaf {0:?}")]
    Unsupported(Vec<u64>),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub(crate) fn resource(what: impl Into<String>, attempted: u128, limit: u128) -> Self {
        Error::Resource {
            what: what.into(),
            attempted,
            limit,
        }
    }
}

pub(crate) fn checked_mul(a: u64, b: u64, ctx: &'static str) -> Result<u64> {
    a.checked_mul(b).ok_or(Error::Overflow(ctx))
}

pub(crate) fn checked_add(a: u64, b: u64, ctx: &'static str) -> Result<u64> {
    a.checked_add(b).ok_or(Error::Overflow(ctx))
}
