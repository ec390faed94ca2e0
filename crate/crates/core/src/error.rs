use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("momentum grid too small: {truncated:.3e} of the packet mass falls outside the grid")]
    GridTooSmall { truncated: f64 },

    #[error("stepper constraint violated: {0}")]
    StepperConstraint(String),

    #[error("boundary contamination: {mass:.3e} of the packet mass lies within 3 cells of the grid edge")]
    BoundaryContamination { mass: f64 },

    #[error("prediction undefined at a CDT point (J0 = {j0:.3e}): ZB frequency is zero")]
    CdtPoint { j0: f64 },

    #[error("resonance condition violated: detuning {detuning:.4} exceeds momentum width {sigma:.4}")]
    OffResonance { detuning: f64, sigma: f64 },

    #[error("no oscillation found: spectral peak {peak:.3e} is below 3x noise floor {floor:.3e}")]
    NoOscillation { peak: f64, floor: f64 },

    #[error("series too short: spans {periods:.2} ZB periods, need at least 3")]
    SeriesTooShort { periods: f64 },

    #[error("fit failed after {iterations} iterations: {reason}")]
    FitFailure { iterations: usize, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit status: 1 scientific-check failure, 2 usage or
    /// configuration error, 3 runtime failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_)
            | Error::Config(_)
            | Error::StepperConstraint(_)
            | Error::GridTooSmall { .. }
            | Error::OffResonance { .. } => 2,
            Error::BoundaryContamination { .. }
            | Error::CdtPoint { .. }
            | Error::NoOscillation { .. }
            | Error::SeriesTooShort { .. }
            | Error::FitFailure { .. } => 1,
            Error::Io { .. } => 3,
        }
    }
}
