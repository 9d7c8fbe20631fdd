use alloc::string::String;
use core::fmt;

/// Everything the exact engines and the checks can refuse to do.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    DivisionByZero,
    ZeroToNegativePower,
    Parse(String),
    InvalidDistribution(String),
    /// Conditioning on a set the distribution gives no mass.
    ZeroMeasure,
    InvalidPieceIndex(usize),
    EmptyPointSet,
    PointsNotIncreasing,
    InvalidSequence(String),
    OrderTooSmall {
        n: usize,
        min: usize,
    },
    /// Two distinct candidates achieved the same exact minimum where the
    /// minimizer is known to be unique. Always an internal bug.
    Tie(String),
    NotFinite,
    EmptySample,
    InvalidTheta(String),
    InvalidArgument(String),
    /// A computed result broke an inequality it must satisfy.
    Invariant(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DivisionByZero => f.write_str("division by zero"),
            Error::ZeroToNegativePower => f.write_str("zero raised to a negative power"),
            Error::Parse(s) => write!(f, "cannot parse rational: {s}"),
            Error::InvalidDistribution(s) => write!(f, "invalid distribution: {s}"),
            Error::ZeroMeasure => f.write_str("interval has zero measure"),
            Error::InvalidPieceIndex(j) => write!(f, "no piece with index {j}"),
            Error::EmptyPointSet => f.write_str("point set is empty"),
            Error::PointsNotIncreasing => f.write_str("points must be strictly increasing"),
            Error::InvalidSequence(s) => write!(f, "invalid canonical sequence: {s}"),
            Error::OrderTooSmall { n, min } => write!(f, "order {n} is below the minimum {min}"),
            Error::Tie(s) => write!(f, "exact tie between minimizers ({s})"),
            Error::NotFinite => f.write_str("requires a finite piece list"),
            Error::EmptySample => f.write_str("sample is empty"),
            Error::InvalidTheta(s) => write!(f, "invalid theta: {s}"),
            Error::InvalidArgument(s) => write!(f, "invalid argument: {s}"),
            Error::Invariant(s) => write!(f, "internal invariant violated: {s}"),
        }
    }
}

impl core::error::Error for Error {}
