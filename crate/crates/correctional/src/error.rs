use std::fmt;

/// Errors produced by construction, validation, solving and file parsing.
#[derive(Debug)]
pub enum Error {
    /// An observation dataset must contain at least one value.
    EmptyDataset,
    /// An observation space needs at least two categories.
    TooFewCategories { found: u32 },
    /// An observation value lies outside `1..=num_categories`.
    ValueOutOfRange { value: u32, num_categories: u32 },
    /// A histogram must have at least one entry.
    EmptyHistogram,
    /// A probability vector must have at least one entry.
    EmptyPmf,
    /// A histogram with total zero cannot be normalized.
    ZeroTotal,
    /// Probability entries must sum to one.
    NotNormalized { sum: f64 },
    /// A probability must lie in `[0, 1]`.
    InvalidProbability { value: f64 },
    /// The number of trials must be positive.
    ZeroTrials,
    /// A correction budget cannot exceed the number of observations it may change.
    BudgetTooLarge { budget: u64, trials: u64 },
    /// Two vectors that must share a dimension do not.
    DimensionMismatch { left: usize, right: usize },
    /// Two histograms that must share a total do not.
    TotalMismatch { left: u64, right: u64 },
    /// Closed-form results require the mean count to be an integer.
    NonIntegerMean { mean: f64 },
    /// The variance ratio is undefined when every observation is identical.
    DegenerateTheta { theta0: f64 },
    /// An exhaustive enumeration would exceed the configured bound.
    EnumerationTooLarge { size: u128, limit: u128 },
    /// A transport plan does not match the data it is applied to.
    InfeasiblePlan { detail: String },
    /// A probability vector does not lie on the `1/N` grid.
    OffGridPmf { index: usize, value: f64 },
    /// A configuration value is missing or inconsistent.
    InvalidConfig { message: String },
    /// A text input could not be parsed.
    Parse { line: usize, message: String },
    /// An underlying file operation failed.
    Io { message: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyDataset => write!(f, "dataset contains no observations"),
            Error::TooFewCategories { found } => {
                write!(f, "need at least 2 categories, found {found}")
            }
            Error::ValueOutOfRange {
                value,
                num_categories,
            } => write!(
                f,
                "observation value {value} outside 1..={num_categories}"
            ),
            Error::EmptyHistogram => write!(f, "histogram has no entries"),
            Error::EmptyPmf => write!(f, "probability vector has no entries"),
            Error::ZeroTotal => write!(f, "histogram total is zero"),
            Error::NotNormalized { sum } => {
                write!(f, "probability entries sum to {sum}, expected 1")
            }
            Error::InvalidProbability { value } => {
                write!(f, "probability {value} outside [0, 1]")
            }
            Error::ZeroTrials => write!(f, "number of trials must be at least 1"),
            Error::BudgetTooLarge { budget, trials } => {
                write!(f, "budget {budget} exceeds number of trials {trials}")
            }
            Error::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            Error::TotalMismatch { left, right } => {
                write!(f, "histogram totals differ: {left} vs {right}")
            }
            Error::NonIntegerMean { mean } => write!(
                f,
                "expected count {mean} is not an integer; closed forms require an integral mean"
            ),
            Error::DegenerateTheta { theta0 } => write!(
                f,
                "variance ratio undefined for theta0 = {theta0}: the unmodified estimator has zero variance"
            ),
            Error::EnumerationTooLarge { size, limit } => {
                write!(f, "enumeration of {size} states exceeds limit {limit}")
            }
            Error::InfeasiblePlan { detail } => write!(f, "infeasible transport plan: {detail}"),
            Error::OffGridPmf { index, value } => write!(
                f,
                "entry {index} = {value} does not lie on the 1/N grid"
            ),
            Error::InvalidConfig { message } => write!(f, "invalid configuration: {message}"),
            Error::Parse { line, message } => write!(f, "parse error on line {line}: {message}"),
            Error::Io { message } => write!(f, "{message}"),
        }
    }
}

impl std::error::Error for Error {}
