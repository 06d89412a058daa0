use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid curve specification: {0}")]
    InvalidSpec(String),

    #[error("cannot read {path}: {message}")]
    Input { path: String, message: String },

    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },

    #[error("parameter {t} outside domain [{t0}, {t1}]")]
    OutOfDomain { t: f64, t0: f64, t1: f64 },

    #[error("operation not supported for curve kind `{0}`")]
    UnsupportedKind(&'static str),

    #[error("degenerate speed {speed:e} at parameter {t}")]
    DegenerateSpeed { t: f64, speed: f64 },

    #[error("sampled curve is not unit speed: chord speed {speed} at sample {index}")]
    NotUnitSpeed { index: usize, speed: f64 },

    #[error("seed frame is not orthonormal (deviation {deviation:e})")]
    NonOrthonormalSeed { deviation: f64 },

    #[error("curvature `{name}` must be positive, got {value} at s = {s}")]
    NonPositiveCurvature { name: &'static str, s: f64, value: f64 },

    #[error("degenerate curvature at sample {index} (s = {s}): {cause}")]
    DegenerateCurvature { index: usize, s: f64, cause: String },

    #[error("sample {index} lies outside the stencil interior {start}..{end}")]
    BoundaryIndex { index: usize, start: usize, end: usize },

    #[error("too few samples: {got} (need at least {need})")]
    TooFewSamples { got: usize, need: usize },

    #[error("curvature profile is empty")]
    EmptyProfile,

    #[error("dimension mismatch: expected E{expected}, got E{got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("offset must be nonzero")]
    ZeroLambda,

    #[error("mu must be nonzero")]
    ZeroMu,

    #[error("degenerate partner at sample {index} (s = {s}): speed {speed:e}")]
    DegeneratePartner { index: usize, s: f64, speed: f64 },

    #[error("partner speed domain violated at sample {index} (s = {s}): 1 - lambda K = {value}")]
    PartnerSpeedDomain { index: usize, s: f64, value: f64 },

    #[error("correspondence is not strictly increasing at row {row}")]
    NonMonotoneCorrespondence { row: usize },

    #[error("correspondence covers {coverage_alpha:.3} of the first curve and {coverage_beta:.3} of the second (need {required})")]
    CorrespondenceGap { coverage_alpha: f64, coverage_beta: f64, required: f64 },
}

impl Error {
    /// True for failures caused by the geometry of the input rather than its encoding.
    pub fn is_geometric(&self) -> bool {
        matches!(
            self,
            Error::DegenerateSpeed { .. }
                | Error::NotUnitSpeed { .. }
                | Error::NonOrthonormalSeed { .. }
                | Error::NonPositiveCurvature { .. }
                | Error::DegenerateCurvature { .. }
                | Error::BoundaryIndex { .. }
                | Error::TooFewSamples { .. }
                | Error::EmptyProfile
                | Error::ZeroLambda
                | Error::ZeroMu
                | Error::DegeneratePartner { .. }
                | Error::PartnerSpeedDomain { .. }
        )
    }

    pub fn is_correspondence(&self) -> bool {
        matches!(self, Error::NonMonotoneCorrespondence { .. } | Error::CorrespondenceGap { .. })
    }
}
