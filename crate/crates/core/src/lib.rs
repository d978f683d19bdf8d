//! Driven-dissipative single-emitter cavity QED: master-equation steady
//! states, polarization-resolved emission spectra, fitting utilities and a
//! configuration-driven runner.

pub mod analysis;
pub mod angle;
pub mod config;
pub mod detection;
pub mod linalg;
pub mod model;
pub mod run;
pub mod spectra;
pub mod steady;

pub use analysis::AnalysisError;
pub use config::{parse_config, ConfigError, Mode, RunConfig};
pub use detection::{detected_spectrum, hwp_to_theta, DetectedSpectrum, DetectionParams};
pub use linalg::{ComplexMatrix, HilbertSpace, LinalgError};
pub use model::{build_liouvillian, effective_g, Liouvillian, ModelError, PhiSign, QedParams};
pub use spectra::{FrequencyGrid, RawSpectrum, SpectrumError};
pub use steady::{solve_steady, DensityMatrix, SteadyStateError};

pub use num_complex::Complex64 as C64;

/// Any failure surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    SteadyState(#[from] SteadyStateError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for malformed or invalid input, as opposed to numerical failure.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Model(_)
                | Error::Spectrum(SpectrumError::InvalidGrid(_) | SpectrumError::GridTooCoarse { .. })
        )
    }
}
