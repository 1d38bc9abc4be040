use std::fmt;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const IO: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const NOT_PERFECT: u8 = 3;
    pub const SUITE_FAILED: u8 = 4;
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Internal(somorse::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Io(_) => exit::IO,
            CliError::Internal(_) => exit::SUITE_FAILED,
        }
    }
}

impl From<somorse::Error> for CliError {
    fn from(e: somorse::Error) -> Self {
        use somorse::Error as E;
        match e {
            E::ZeroDimension
            | E::InvalidPair { .. }
            | E::DimensionMismatch { .. }
            | E::NotSquare { .. }
            | E::RaggedRows
            | E::CostNotIncreasing
            | E::CostNegative
            | E::InvalidSign
            | E::OddSignPattern
            | E::OffManifold { .. }
            | E::NegativeCoefficient(_) => CliError::Usage(e.to_string()),
            E::Degenerate { .. } | E::EigenNoConvergence | E::Overflow => CliError::Internal(e),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => write!(f, "{m}"),
            CliError::Internal(e) => write!(f, "{e}"),
        }
    }
}
