//! Error type of the command layer, carrying the process exit code.
//!
//! The code contract: 0 success, 2 construction left frequencies uncovered,
//! 64 malformed input (arguments, specs, configs, artifact files), 65 a
//! cardinality or sample cap was hit, 66 lattice and index set do not belong
//! together, 74 filesystem trouble while writing artifacts.

use std::fmt;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_COVERED: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_CAP_EXCEEDED: u8 = 65;
pub const EXIT_HASH_MISMATCH: u8 = 66;
pub const EXIT_IO: u8 = 74;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    CapExceeded(String),
    NotCovered(String),
    HashMismatch { expected: String, found: String },
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::CapExceeded(_) => EXIT_CAP_EXCEEDED,
            CliError::NotCovered(_) => EXIT_NOT_COVERED,
            CliError::HashMismatch { .. } => EXIT_HASH_MISMATCH,
            CliError::Io(_) => EXIT_IO,
        }
    }

    pub fn usage(err: impl fmt::Display) -> Self {
        CliError::Usage(err.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::CapExceeded(msg) => write!(f, "{msg}"),
            CliError::NotCovered(msg) => write!(f, "{msg}"),
            CliError::HashMismatch { expected, found } => write!(
                f,
                "lattice was built for index set {expected}, presented set hashes to {found}"
            ),
            CliError::Io(err) => write!(f, "{err}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err)
    }
}
