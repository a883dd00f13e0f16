use core::fmt;

/// Errors surfaced by the simulation core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operands have incompatible dimensions.
    DimensionMismatch { expected: usize, found: usize },
    /// Matrix handed to the Hermitian eigensolver is not Hermitian;
    /// carries the observed max entrywise asymmetry.
    NotHermitian(f64),
    /// Jacobi sweep cap hit before the off-diagonal norm target.
    NoConvergence,
    /// Requested subsystem label is absent or the subset is invalid.
    BadSubsystem,
    /// State register layout does not match what the operation expects.
    LayoutMismatch,
    /// Scalar parameter outside its admissible range.
    OutOfRange(&'static str),
    /// Mixture weights are negative or do not sum to one.
    BadWeights,
    /// Round index outside the schedule.
    BadRound,
    /// Bell threshold outside (2, 2*sqrt(2)].
    BadThreshold,
    /// Measurement-setting vector is not unit length.
    NotUnitVector,
    /// Simulated Bell value drifted from the closed form; this signals an
    /// implementation bug, not a user error.
    OracleMismatch { round: usize, discrepancy: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotHermitian(dev) => write!(f, "matrix not Hermitian (asymmetry {dev:e})"),
            Error::NoConvergence => write!(f, "Jacobi eigensolver failed to converge"),
            Error::BadSubsystem => write!(f, "invalid subsystem selection"),
            Error::LayoutMismatch => write!(f, "register layout mismatch"),
            Error::OutOfRange(what) => write!(f, "parameter out of range: {what}"),
            Error::BadWeights => write!(f, "mixture weights must be nonnegative and sum to 1"),
            Error::BadRound => write!(f, "round index outside the schedule"),
            Error::BadThreshold => write!(f, "Bell threshold must lie in (2, 2*sqrt(2)]"),
            Error::NotUnitVector => write!(f, "measurement setting is not a unit vector"),
            Error::OracleMismatch { round, discrepancy } => write!(
                f,
                "simulation disagrees with closed form at round {round} (|diff| = {discrepancy:e})"
            ),
        }
    }
}
