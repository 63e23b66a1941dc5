//! Error type shared by every module in the crate.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {0} lies outside the open unit disk")]
    PointOutsideDisk(Complex64),

    #[error("gap {0} is not inside (0, 1]")]
    GapOutOfRange(f64),

    /// Gaps below 2^-52 make `1 - gap` round to 1.0, so the stored value
    /// would sit on the unit circle; callers must keep such points in gap
    /// form rather than construct them.
    #[error("gap {0} is below the representable minimum 2^-52")]
    GapTooSmall(f64),

    #[error("stored gap {gap} disagrees with 1 - |value| = {computed}")]
    GapInconsistent { gap: f64, computed: f64 },

    #[error("zero sequence must have between 1 and {max} points, got {got}")]
    SequenceLength { got: usize, max: usize },

    #[error("zeros at indices {0} and {1} coincide")]
    DuplicateZeros(usize, usize),

    #[error("sequence of length {values} does not match {zeros} zeros")]
    LengthMismatch { values: usize, zeros: usize },

    #[error("operation requires radial zeros (real, nonnegative, strictly increasing)")]
    NotRadialSorted,

    #[error("index {index} out of bounds for length {len}")]
    IndexOutOfBounds { index: usize, len: usize },

    #[error("evaluation point is numerically on a pole of the product")]
    PoleProximity,

    #[error("gamma entry {value} at index {index} must be finite and positive")]
    InvalidGamma { index: usize, value: f64 },

    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    #[error("non-finite sample encountered on the quadrature grid")]
    NonFiniteSample,

    #[error("linear solve failed: {0}")]
    SingularSystem(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("experiment assertion failed at n = {n}: {detail}")]
    ExperimentAssertion { n: usize, detail: String },

    #[error("random sequence generation gave up after {0} attempts")]
    GenerationFailed(usize),
}
