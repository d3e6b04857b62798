use alloc::string::String;
use core::fmt;

/// Errors raised by the demographic measures.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// No samples to build a profile from.
    EmptyPopulation,
    /// A group id that the axis does not declare.
    UnknownGroup { axis: String, group: String },
    /// An axis declared twice, or a group declared twice within an axis.
    DuplicateGroup { axis: String, group: String },
    /// An axis without any groups.
    EmptyAxis { axis: String },
    /// Combination axes need at least two constituents.
    InvalidArity { got: usize },
    /// A record lacks an assignment on a required axis.
    MissingAssignment { sample: String, axis: String },
    /// A record lacks the class label needed for per-class profiles.
    MissingLabel { sample: String },
    /// A dataset has no profile on the requested axis.
    MissingAxis { dataset: String, axis: String },
    /// Two profiles cannot be compared.
    AxisMismatch { left: String, right: String },
    /// A similarity score outside `[0, 1]` or of the wrong family.
    InvalidScore { value: f64 },
    /// Proportions that do not sum to one within tolerance.
    Normalization { axis: String, sum: f64 },
    /// A negative or greater-than-one proportion.
    ProportionRange { axis: String, group: String, value: f64 },
    /// A target distribution that violates its constraints.
    InvalidTarget { axis: String, reason: String },
    /// A contingency table with fewer than two non-empty rows or columns.
    DegenerateTable { rows: usize, cols: usize },
    /// No class has both a non-empty subset and a non-empty complement.
    NoClasses { axis: String },
    /// A partition without samples.
    EmptyPartition { partition: String },
    /// A rolling window queried before any push.
    EmptyWindow { axis: String },
    /// Window capacity must be positive.
    InvalidCapacity,
    /// A similarity matrix that is not square, symmetric, unit-diagonal and in `[0, 1]`.
    InvalidMatrix { reason: String },
    /// Similarity matrices need at least two datasets.
    TooFewDatasets { got: usize },
}

impl Error {
    /// True for errors that mean "the measure is undefined for this input"
    /// rather than "the input is malformed".
    pub fn is_undefined(&self) -> bool {
        matches!(
            self,
            Error::DegenerateTable { .. }
                | Error::NoClasses { .. }
                | Error::EmptyPartition { .. }
                | Error::EmptyWindow { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyPopulation => write!(f, "EmptyPopulation: no samples to profile"),
            Error::UnknownGroup { axis, group } => {
                write!(f, "UnknownGroup: '{group}' is not a group of axis '{axis}'")
            }
            Error::DuplicateGroup { axis, group } => {
                write!(f, "DuplicateGroup: '{group}' declared twice in axis '{axis}'")
            }
            Error::EmptyAxis { axis } => write!(f, "EmptyAxis: axis '{axis}' has no groups"),
            Error::InvalidArity { got } => {
                write!(f, "InvalidArity: combination needs at least 2 axes, got {got}")
            }
            Error::MissingAssignment { sample, axis } => {
                write!(f, "MissingAssignment: sample '{sample}' has no group on axis '{axis}'")
            }
            Error::MissingLabel { sample } => {
                write!(f, "MissingLabel: sample '{sample}' has no class label")
            }
            Error::MissingAxis { dataset, axis } => {
                write!(f, "AxisMismatch: dataset '{dataset}' has no profile on axis '{axis}'")
            }
            Error::AxisMismatch { left, right } => {
                write!(f, "AxisMismatch: cannot compare axis '{left}' with axis '{right}'")
            }
            Error::InvalidScore { value } => write!(f, "InvalidScore: {value}"),
            Error::Normalization { axis, sum } => {
                write!(f, "NormalizationError: proportions on axis '{axis}' sum to {sum}")
            }
            Error::ProportionRange { axis, group, value } => {
                write!(f, "RangeError: proportion {value} for group '{group}' on axis '{axis}' is outside [0, 1]")
            }
            Error::InvalidTarget { axis, reason } => {
                write!(f, "InvalidTarget: axis '{axis}': {reason}")
            }
            Error::DegenerateTable { rows, cols } => {
                write!(f, "DegenerateTable: {rows} non-empty rows x {cols} non-empty columns")
            }
            Error::NoClasses { axis } => {
                write!(f, "NoClasses: no admissible class on axis '{axis}'")
            }
            Error::EmptyPartition { partition } => {
                write!(f, "EmptyPartition: partition '{partition}' has no samples")
            }
            Error::EmptyWindow { axis } => write!(f, "EmptyWindow: window on axis '{axis}' is empty"),
            Error::InvalidCapacity => write!(f, "InvalidCapacity: window capacity must be positive"),
            Error::InvalidMatrix { reason } => write!(f, "InvalidMatrix: {reason}"),
            Error::TooFewDatasets { got } => {
                write!(f, "TooFewDatasets: need at least 2 datasets, got {got}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
