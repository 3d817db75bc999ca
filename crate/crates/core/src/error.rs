//! Error type shared by the simulator library.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// SNR calibration received an all-zero (or empty) intent sample set.
    DegenerateCalibration,
    /// Unregularized least squares on rank-deficient data.
    RankDeficient,
    /// A gradient update produced non-finite parameters.
    Divergence,
    /// The recursive least-squares state became non-finite.
    RlsBreakdown,
    /// Arm kinematics produced a non-finite residual.
    InvalidArmState,
    /// Goal rejection sampling exhausted its attempt budget.
    UnreachableWorkspace,
    /// An experiment configuration failed validation.
    InvalidConfig(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateCalibration => write!(f, "degenerate calibration set"),
            Error::RankDeficient => write!(f, "rank deficient: increase regularization"),
            Error::Divergence => write!(f, "divergence: reduce step size"),
            Error::RlsBreakdown => write!(f, "RLS numerical breakdown"),
            Error::InvalidArmState => write!(f, "invalid arm state"),
            Error::UnreachableWorkspace => write!(f, "unreachable workspace"),
            Error::InvalidConfig(msg) => write!(f, "invalid config: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
