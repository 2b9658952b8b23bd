use alloc::string::String;

/// Errors raised by the phase-space engine, the Fock backend and the monotones.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    /// The truncated Fock representation lost more weight than allowed.
    #[error("truncation error: deficit {deficit:.3e} exceeds bound {bound:.3e} (try cutoff >= {suggested_cutoff})")]
    Truncation {
        deficit: f64,
        bound: f64,
        suggested_cutoff: usize,
    },
    /// A post-selected branch has (numerically) vanishing success probability.
    #[error("zero-probability branch: success probability {0:.3e}")]
    ZeroProbability(f64),
    #[error("unsupported map: {0}")]
    UnsupportedMap(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

macro_rules! invalid_arg {
    ($($arg:tt)*) => {
        $crate::Error::InvalidArgument(alloc::format!($($arg)*))
    };
}

macro_rules! invalid_state {
    ($($arg:tt)*) => {
        $crate::Error::InvalidState(alloc::format!($($arg)*))
    };
}

pub(crate) use invalid_arg;
pub(crate) use invalid_state;
