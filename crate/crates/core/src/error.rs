use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures raised by the numerical modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("negative entry at index {0}")]
    NegativeEntry(usize),
    #[error("interlacing violated at index {0}")]
    NonInterlacing(usize),
    #[error("spectrum degenerate at index {0}: gap below tolerance")]
    DegenerateSpectrum(usize),
    #[error("weight product overflowed at index {0}")]
    Overflow(usize),
    #[error("weight product underflowed at index {0}")]
    Underflow(usize),
    #[error("evaluation point within pole tolerance of atom {0}")]
    PoleProximity(usize),
    #[error("phase at level {0} is not unimodular")]
    NonUnimodularPhase(usize),
    #[error("invalid level data: {0}")]
    InvalidLevelData(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("vector is not *-cyclic on level {level} ({which})")]
    SupportNotCyclic { level: usize, which: &'static str },
    #[error("negative eigenvalue {value:e} below clamping tolerance")]
    SquareRootFailure { value: f64 },
    #[error("truncation {requested} cannot certify tail {tail:e}")]
    TruncationTooSmall { requested: usize, tail: f64 },
    #[error("matrix is not Hankel (residual {residual:e})")]
    NotHankel { residual: f64 },
    #[error("singular values {a} and {b} fall inside the ambiguous cluster gap")]
    ClusterAmbiguity { a: f64, b: f64 },
    #[error("u is not numerically cyclic on level {level}")]
    RankDeficientH0 { level: usize },
    #[error("recovered spectrum inconsistent: {0}")]
    InconsistentSpectrum(String),
    #[error("inner function does not vanish at the origin")]
    ThetaAtOriginNonzero,
    #[error("zero {0} does not lie in the open unit disk")]
    ZeroOutsideDisk(usize),
    #[error("root {index} lies off the unit circle by {deviation:e}")]
    RootOffCircle { index: usize, deviation: f64 },
    #[error("measure has coincident atoms {0} and {1}")]
    DegenerateMeasure(usize, usize),
    #[error("eigenvalue computation did not converge")]
    NoConvergence,
    #[error("dimension error: {0}")]
    Dimension(String),
}

impl Error {
    /// Stable variant name, used in structured error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyInput => "EmptyInput",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::NonFinite(_) => "NonFinite",
            Error::NegativeEntry(_) => "NegativeEntry",
            Error::NonInterlacing(_) => "NonInterlacing",
            Error::DegenerateSpectrum(_) => "DegenerateSpectrum",
            Error::Overflow(_) => "Overflow",
            Error::Underflow(_) => "Underflow",
            Error::PoleProximity(_) => "PoleProximity",
            Error::NonUnimodularPhase(_) => "NonUnimodularPhase",
            Error::InvalidLevelData(_) => "InvalidLevelData",
            Error::InvalidMeasure(_) => "InvalidMeasure",
            Error::SupportNotCyclic { .. } => "SupportNotCyclic",
            Error::SquareRootFailure { .. } => "SquareRootFailure",
            Error::TruncationTooSmall { .. } => "TruncationTooSmall",
            Error::NotHankel { .. } => "NotHankel",
            Error::ClusterAmbiguity { .. } => "ClusterAmbiguity",
            Error::RankDeficientH0 { .. } => "RankDeficientH0",
            Error::InconsistentSpectrum(_) => "InconsistentSpectrum",
            Error::ThetaAtOriginNonzero => "ThetaAtOriginNonzero",
            Error::ZeroOutsideDisk(_) => "ZeroOutsideDisk",
            Error::RootOffCircle { .. } => "RootOffCircle",
            Error::DegenerateMeasure(..) => "DegenerateMeasure",
            Error::NoConvergence => "NoConvergence",
            Error::Dimension(_) => "Dimension",
        }
    }
}
