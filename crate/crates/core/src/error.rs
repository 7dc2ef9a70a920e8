use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not symmetric: |H[{row}][{col}] - H[{col}][{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },

    #[error("eigensolver failed to converge: {0}")]
    NoConvergence(String),

    #[error("wavenumber {0} outside [-pi, pi]")]
    WavenumberOutOfRange(f64),

    #[error("trajectory needs at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("time grid not ascending at sample {0}")]
    NonAscendingTimes(usize),

    #[error("unphysical amplitude |alpha| = {0} > 1")]
    UnphysicalAmplitude(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("horizon search exceeded the cap of {cap} (last residual gap {gap:e})")]
    HorizonCapExceeded { cap: f64, gap: f64 },

    #[error("chain of {n_cavities} cavities too short for horizon {horizon}: need {required}")]
    LightCone {
        n_cavities: usize,
        horizon: f64,
        required: usize,
    },

    #[error("realization {index} (master seed {seed}) failed: {source}")]
    Realization {
        index: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("sweep cell (sigma[{sigma_index}], g[{g_index}]) failed: {source}")]
    Cell {
        sigma_index: usize,
        g_index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("worker pool: {0}")]
    Pool(String),
}
