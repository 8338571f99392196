//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("order {order} exceeds the supported maximum {max}")]
    OrderOverflow { order: u32, max: u32 },

    #[error("harmonic degree {m} is outside [-{n}, {n}]")]
    InvalidDegree { n: u32, m: i32 },

    #[error("expected {expected} coefficients for order {order}, got {actual}")]
    CoefficientCount {
        order: u32,
        expected: usize,
        actual: usize,
    },

    #[error("expected coefficients of order {expected}, got order {actual}")]
    OrderMismatch { expected: u32, actual: u32 },

    #[error("sample count {actual} does not match the grid's {expected} nodes")]
    SampleCount { expected: usize, actual: usize },

    #[error("grid of degree {degree} cannot integrate order {order} (degree >= {required} required)")]
    GridTooCoarse {
        degree: u32,
        order: u32,
        required: u32,
    },

    #[error("inclination {theta} is outside [0, pi]")]
    InvalidInclination { theta: f64 },

    #[error("direction components must be finite and nonzero")]
    InvalidDirection,

    #[error("axisymmetric profile must have at least one coefficient")]
    EmptyProfile,

    #[error("profile coefficients must be finite")]
    NonFiniteCoefficient,

    #[error("preset {kind} is not defined for order {order}")]
    UnsupportedPreset { kind: String, order: u32 },

    #[error("pattern is not real-valued on the sphere (max imaginary part {max_imag:.3e})")]
    NonRealPattern { max_imag: f64 },

    #[error("pattern has zero energy")]
    ZeroPattern,

    #[error("physical constants must be positive and finite")]
    InvalidConstants,

    #[error("power spectral density {value} must be finite and nonnegative")]
    InvalidPower { value: f64 },

    #[error("plane-wave and diffuse powers cannot both be zero")]
    NoPower,

    #[error("diffuseness is undefined for a zero-energy field")]
    UndefinedDiffuseness,

    #[error("direction of arrival is undefined for zero intensity")]
    UndefinedDoa,

    #[error("arrival bias is undefined when the predicted intensity vanishes")]
    UndefinedBias,

    #[error("mixture balance {value} must be nonnegative (infinity allowed)")]
    InvalidBalance { value: f64 },

    #[error("angle {value} must be finite")]
    NonFiniteAngle { value: f64 },

    #[error("frame set must contain at least one frame")]
    EmptyFrames,

    #[error("scene must carry power in at least one component")]
    SilentScene,

    #[error("malformed {what}: {detail}")]
    Parse { what: String, detail: String },
}

impl Error {
    pub(crate) fn parse(what: &str, detail: impl ToString) -> Self {
        Error::Parse {
            what: what.to_string(),
            detail: detail.to_string(),
        }
    }
}
