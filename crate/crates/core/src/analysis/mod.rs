//! Closed-form splittings, peak extraction, least-squares fits and the
//! zero-delay intensity correlation.

mod doublet;
mod g2;
pub mod lm;
mod peaks;
mod polarization;
mod splitting;

pub use doublet::{asymmetry, doublet_model, fit_doublet, DoubletFit, LorentzianPeak};
pub use g2::{g2_zero, Channel};
pub use peaks::{central_dip_ratio, find_peaks, find_peaks_with_prominence, Peak, DEFAULT_PROMINENCE};
pub use polarization::{fit_polarization, polarization_curve, PolarizationFit};
pub use splitting::{cui_raymer_splittings, Splittings};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("{which} radicand is negative ({value}); the system is below the strong-coupling threshold")]
    BelowThreshold { which: &'static str, value: f64 },
    #[error("fit diverged: {0}")]
    FitDiverged(String),
    #[error("no peak found in spectrum")]
    NoPeak,
    #[error("population ⟨O†O⟩ = {0:e} too small to normalize g²(0)")]
    ZeroPopulation(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
