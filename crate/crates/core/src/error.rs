use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("radius {0} outside (0, 1]")]
    InvalidRadius(f64),

    #[error("non-finite derivative at r={r}, theta={theta}")]
    NonFiniteDerivative { r: f64, theta: f64 },

    #[error("jacobian {value} is not positive at r={r}, theta={theta}")]
    DegenerateJacobian { r: f64, theta: f64, value: f64 },

    #[error("finite-difference stencil leaves the disc at r={r} (h_r={h_r})")]
    StepTooLarge { r: f64, h_r: f64 },

    #[error("value jumps by {jump} between neighbouring samples near r={r}, theta={theta}")]
    Discontinuity { r: f64, theta: f64, jump: f64 },

    #[error("dilatation order p={0} is outside the admissible range {1}")]
    InvalidOrder(f64, &'static str),

    #[error("empty integration range [{lower}, {upper}]")]
    EmptyRange { lower: f64, upper: f64 },

    #[error("radius {0} is not a node of the sampled grid")]
    OffGrid(f64),

    #[error("invalid radial series: {0}")]
    InvalidSeries(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("radius {0} outside the sampled profile range")]
    OutsideProfile(f64),

    #[error("coefficient i*sigma is not real at r={r} (imaginary part {imag})")]
    ComplexDrift { r: f64, imag: f64 },

    #[error("radial solution blew up near r={0}")]
    BlowUp(f64),

    #[error("Im(conj(sigma)) = {value} is not positive at r={r}")]
    NonPositiveImag { r: f64, value: f64 },

    #[error("degenerate denominator |A w + 1| = {0}")]
    DegenerateDenominator(f64),

    #[error("unknown map or family `{0}`")]
    UnknownModel(String),

    #[error("missing or invalid parameter `{0}`")]
    BadParameter(String),

    #[error("csv: {0}")]
    Csv(String),

    #[error("json: {0}")]
    Json(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
