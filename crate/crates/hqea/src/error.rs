use std::fmt;

/// Errors reported by fallible library operations.
///
/// Contract violations (mismatched lengths, stepping a finished walk,
/// out-of-range fractions) panic instead; only conditions a caller can
/// reasonably hit with external data are represented here.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A walk position falls outside the `[-n_max, n_max]` angle lattice.
    PositionOutOfRange { position: i32, n_max: u32 },
    /// An instance file violates the knapsack instance invariants.
    InvalidInstance(String),
    /// An optimizer configuration violates its invariants.
    InvalidConfig(String),
    /// A bitstring literal contains a character other than '0' or '1'.
    InvalidBitstring(char),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::PositionOutOfRange { position, n_max } => write!(
                f,
                "walk position {position} outside the angle lattice [-{n_max}, {n_max}]"
            ),
            Error::InvalidInstance(msg) => write!(f, "invalid knapsack instance: {msg}"),
            Error::InvalidConfig(msg) => write!(f, "invalid optimizer config: {msg}"),
            Error::InvalidBitstring(c) => {
                write!(f, "bitstring may only contain '0' and '1', found {c:?}")
            }
        }
    }
}

impl std::error::Error for Error {}
