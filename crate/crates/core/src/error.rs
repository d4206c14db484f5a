use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("grid mismatch between fields")]
    GridMismatch,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("wavevector is not commensurate with the periodic grid: {0}")]
    NotCommensurate(String),

    #[error("zero wavevector has no propagating mode")]
    ZeroMode,

    #[error("invalid plasma profile: {0}")]
    InvalidProfile(String),

    #[error("perturbation exceeds density: sum of amplitudes {sum} >= n0 {n0}")]
    PerturbationExceedsDensity { sum: f64, n0: f64 },

    #[error("singular denominator: {0}")]
    SingularDenominator(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unstable time step: dt = {dt} exceeds bound {bound}")]
    UnstableTimeStep { dt: f64, bound: f64 },

    #[error("too few snapshots: {got} (need at least {need})")]
    TooFewSnapshots { got: usize, need: usize },

    #[error("degenerate sample set: {0}")]
    DegenerateSamples(String),

    #[error("matrix is not Hermitean (max defect {0:e})")]
    NotHermitean(f64),
}
