//! Polarizer-projected detection: the cavity channel, the emitter channel and
//! the two interference channels between them.
//!
//! The detected field after the half-wave plate and polarizer is
//! `E = E_x^c cosΘ + E_x^a cosΘ + E_y^a sinΘ` with
//!
//! ```text
//! E_x^a = √(Aγ) cosθ_a σ,  E_y^a = √(Aγ) sinθ_a e^{±iφ_QD} σ,
//! E_x^c = √(Bκ) (−i e^{−iθ_c}) a
//! ```
//!
//! Its spectrum splits into `S_c + S_a + S_I1 + S_I2`. With `F_XY` the
//! one-sided transform of `⟨X†(0) Y(τ)⟩`:
//!
//! ```text
//! S_c  = Bκ cos²Θ · Re F_aa
//! S_a  = Aγ |cosθ_a cosΘ + e^{±iφ} sinθ_a sinΘ|² · Re F_σσ
//! S_I1 = Re[w₁ F_σa + w₁* F_aσ],  w₁ = √(AB)√(κγp) cosθ_a cos²Θ e^{−i(π/2+θ_c)}
//! S_I2 = Re[w₂ F_σa + w₂* F_aσ],  w₂ = √(AB)√(κγp) sinθ_a sinΘ cosΘ e^{−i(π/2+θ_c±φ)}
//! ```
//!
//! Detected spectra are averaged over the two signs of φ_QD.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::angle::{cis_deg, cos_deg, sin_deg, wrap_180};
use crate::linalg::{build_operators, HilbertSpace};
use crate::model::{build_liouvillian, ModelError, PhiSign, QedParams};
use crate::spectra::{convolve_instrument, correlation_spectra, FrequencyGrid, RawSpectrum, SpectrumError};
use crate::steady::solve_steady;
use crate::Error;

/// Detection geometry and instrument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionParams {
    /// Projection angle Θ (degrees).
    pub theta_proj: f64,
    /// Emitter-channel intensity scale A (arbitrary units).
    pub amp_a: f64,
    /// Cavity-channel intensity scale B (arbitrary units).
    pub amp_b: f64,
    /// Field overlap p ∈ [0, 1].
    pub overlap_p: f64,
    /// Cavity–free-space coupling phase θ_c (degrees).
    pub theta_c: f64,
    /// Gaussian instrument FWHM (µeV).
    pub instrument_fwhm: f64,
    /// Average over both signs of φ_QD; otherwise use the sign in `QedParams`.
    pub sign_average: bool,
}

impl DetectionParams {
    pub const MEASURED_AB_RATIO: f64 = 2.85;
    pub const MEASURED_RESOLUTION: f64 = 13.5;

    /// A = 1, A/B = 2.85, p = 1, θ_c = 0°, 13.5 µeV resolution, Θ = 0°.
    pub fn measured() -> Self {
        Self {
            theta_proj: 0.0,
            amp_a: 1.0,
            amp_b: 1.0 / Self::MEASURED_AB_RATIO,
            overlap_p: 1.0,
            theta_c: 0.0,
            instrument_fwhm: Self::MEASURED_RESOLUTION,
            sign_average: true,
        }
    }

    pub fn with_theta(mut self, theta_proj: f64) -> Self {
        self.theta_proj = theta_proj;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |name: &'static str, reason: String| Err(ModelError::InvalidParameter { name, reason });
        for (name, v) in [
            ("theta_proj", self.theta_proj),
            ("amp_a", self.amp_a),
            ("amp_b", self.amp_b),
            ("overlap_p", self.overlap_p),
            ("theta_c", self.theta_c),
            ("instrument_fwhm", self.instrument_fwhm),
        ] {
            if !v.is_finite() {
                return bad(name, format!("must be finite, got {v}"));
            }
        }
        if !(0.0..=1.0).contains(&self.overlap_p) {
            return bad("overlap_p", format!("must lie in [0, 1], got {}", self.overlap_p));
        }
        if self.amp_a < 0.0 {
            return bad("amp_a", format!("must be non-negative, got {}", self.amp_a));
        }
        if self.amp_b < 0.0 {
            return bad("amp_b", format!("must be non-negative, got {}", self.amp_b));
        }
        if self.instrument_fwhm < 0.0 {
            return bad("instrument_fwhm", format!("must be non-negative, got {}", self.instrument_fwhm));
        }
        Ok(())
    }
}

/// Projection angle for a half-wave-plate angle: `Θ = 2(α − 5.5°) mod 180°`.
///
/// α = 5.5° passes mostly the cavity field (Θ = 0°); α = 50.5° rejects it
/// (Θ = 90°).
pub fn hwp_to_theta(alpha_deg: f64) -> f64 {
    wrap_180(2.0 * (alpha_deg - 5.5))
}

/// Channel weights; the interference weights multiply `F_σa` and their
/// conjugates multiply `F_aσ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelWeights {
    pub cavity: f64,
    pub emitter: f64,
    pub interference_x: C64,
    pub interference_y: C64,
}

pub fn channel_prefactors(qed: &QedParams, det: &DetectionParams, sign: PhiSign) -> ChannelWeights {
    let (ct, st) = (cos_deg(det.theta_proj), sin_deg(det.theta_proj));
    let (ca, sa) = (cos_deg(qed.theta_a), sin_deg(qed.theta_a));
    let signed_phi = sign.value() * qed.phi_qd;
    let cavity = det.amp_b * qed.kappa * ct * ct;
    let projection = C64::new(ca * ct, 0.0) + cis_deg(signed_phi) * (sa * st);
    let emitter = det.amp_a * qed.gamma * projection.norm_sqr();
    let cross = (det.amp_a * det.amp_b).sqrt() * (qed.kappa * qed.gamma * det.overlap_p).sqrt();
    let interference_x = cis_deg(-(90.0 + det.theta_c)) * (cross * ca * ct * ct);
    let interference_y = cis_deg(-(90.0 + det.theta_c + signed_phi)) * (cross * sa * st * ct);
    ChannelWeights {
        cavity,
        emitter,
        interference_x,
        interference_y,
    }
}

/// Four one-sided spectra for one sign of φ_QD:
/// `F_aa`, `F_σσ`, `F_σa = F[⟨σ†(0)a(τ)⟩]`, `F_aσ = F[⟨a†(0)σ(τ)⟩]`.
#[derive(Debug, Clone)]
pub struct ChannelCorrelators {
    pub grid: FrequencyGrid,
    pub sign: PhiSign,
    pub f_aa: Vec<C64>,
    pub f_ss: Vec<C64>,
    pub f_sa: Vec<C64>,
    pub f_as: Vec<C64>,
    /// Steady-state ⟨a†a⟩ and ⟨σ†σ⟩.
    pub cavity_population: f64,
    pub emitter_population: f64,
}

/// Builds the Liouvillian for `qed` with `sign`, solves the steady state and
/// evaluates the four correlators. Independent of Θ, A, B, p and θ_c.
pub fn compute_correlators(
    qed: &QedParams,
    sign: PhiSign,
    space: HilbertSpace,
    grid: &FrequencyGrid,
) -> Result<ChannelCorrelators, Error> {
    qed.validate()?;
    let params = qed.with_sign(sign);
    let l = build_liouvillian(&params, space);
    let rho = solve_steady(&l)?;
    let ops = build_operators(space);
    let a_dag = ops.a_c.dagger();
    let s_dag = ops.sigma.dagger();
    let mut f = correlation_spectra(&l, &rho, &[&a_dag, &s_dag], &[&ops.a_c, &ops.sigma], grid)?;
    let mut from_sigma = f.pop().expect("two lefts");
    let mut from_a = f.pop().expect("two lefts");
    let f_ss = from_sigma.pop().expect("two rights");
    let f_sa = from_sigma.pop().expect("two rights");
    let f_as = from_a.pop().expect("two rights");
    let f_aa = from_a.pop().expect("two rights");
    Ok(ChannelCorrelators {
        grid: *grid,
        sign,
        f_aa,
        f_ss,
        f_sa,
        f_as,
        cavity_population: rho.expect(&a_dag.matmul(&ops.a_c)).re,
        emitter_population: rho.expect(&s_dag.matmul(&ops.sigma)).re,
    })
}

/// Detected spectrum resolved by channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpectra {
    pub grid: FrequencyGrid,
    pub s_c: Vec<f64>,
    pub s_a: Vec<f64>,
    pub s_i1: Vec<f64>,
    pub s_i2: Vec<f64>,
    pub total: Vec<f64>,
}

impl ChannelSpectra {
    fn from_channels(grid: FrequencyGrid, s_c: Vec<f64>, s_a: Vec<f64>, s_i1: Vec<f64>, s_i2: Vec<f64>) -> Self {
        let total = (0..grid.len()).map(|k| s_c[k] + s_a[k] + s_i1[k] + s_i2[k]).collect();
        Self {
            grid,
            s_c,
            s_a,
            s_i1,
            s_i2,
            total,
        }
    }

    /// Channel-wise mean of two spectra on the same grid.
    pub fn average(a: &Self, b: &Self) -> Self {
        assert_eq!(a.grid, b.grid, "averaging spectra on different grids");
        let mean = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| 0.5 * (p + q)).collect::<Vec<f64>>();
        Self::from_channels(a.grid, mean(&a.s_c, &b.s_c), mean(&a.s_a, &b.s_a), mean(&a.s_i1, &b.s_i1), mean(&a.s_i2, &b.s_i2))
    }

    /// Every channel convolved with the instrument Gaussian.
    pub fn convolved(&self, fwhm: f64) -> Result<Self, SpectrumError> {
        let conv = |v: &[f64]| -> Result<Vec<f64>, SpectrumError> {
            Ok(convolve_instrument(&RawSpectrum::new(self.grid, v.to_vec())?, fwhm)?.into_values())
        };
        Ok(Self::from_channels(self.grid, conv(&self.s_c)?, conv(&self.s_a)?, conv(&self.s_i1)?, conv(&self.s_i2)?))
    }

    pub fn total_spectrum(&self) -> RawSpectrum {
        RawSpectrum::new(self.grid, self.total.clone()).expect("finite total")
    }
}

/// Weights one sign's correlators into channel spectra.
pub fn combine_channels(qed: &QedParams, det: &DetectionParams, corr: &ChannelCorrelators) -> ChannelSpectra {
    let w = channel_prefactors(qed, det, corr.sign);
    let n = corr.grid.len();
    let s_c = (0..n).map(|k| w.cavity * corr.f_aa[k].re).collect();
    let s_a = (0..n).map(|k| w.emitter * corr.f_ss[k].re).collect();
    let cross = |wt: C64| -> Vec<f64> {
        (0..n)
            .map(|k| (wt * corr.f_sa[k] + wt.conj() * corr.f_as[k]).re)
            .collect()
    };
    ChannelSpectra::from_channels(corr.grid, s_c, s_a, cross(w.interference_x), cross(w.interference_y))
}

/// Raw and instrument-broadened channel spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectedSpectrum {
    pub raw: ChannelSpectra,
    pub convolved: ChannelSpectra,
}

/// Correlators for every sign the detection settings ask for.
pub fn correlators_for(
    qed: &QedParams,
    det: &DetectionParams,
    space: HilbertSpace,
    grid: &FrequencyGrid,
) -> Result<Vec<ChannelCorrelators>, Error> {
    let signs: Vec<PhiSign> = if det.sign_average {
        PhiSign::BOTH.to_vec()
    } else {
        vec![qed.phi_sign]
    };
    signs
        .into_par_iter()
        .map(|s| compute_correlators(qed, s, space, grid))
        .collect()
}

/// Combines precomputed correlators into the detected spectrum.
pub fn assemble_detected(
    qed: &QedParams,
    det: &DetectionParams,
    correlators: &[ChannelCorrelators],
) -> Result<DetectedSpectrum, Error> {
    det.validate()?;
    let per_sign: Vec<ChannelSpectra> = correlators.iter().map(|c| combine_channels(qed, det, c)).collect();
    let raw = match per_sign.as_slice() {
        [one] => one.clone(),
        [a, b] => ChannelSpectra::average(a, b),
        _ => unreachable!("one or two signs"),
    };
    let convolved = raw.convolved(det.instrument_fwhm)?;
    Ok(DetectedSpectrum { raw, convolved })
}

pub fn detected_spectrum(
    qed: &QedParams,
    det: &DetectionParams,
    space: HilbertSpace,
    grid: &FrequencyGrid,
) -> Result<DetectedSpectrum, Error> {
    det.validate()?;
    let corr = correlators_for(qed, det, space, grid)?;
    assemble_detected(qed, det, &corr)
}

/// Detected spectra with ω_a fixed and `ω_c = ω_a − δ` for each detuning δ.
/// With `grid = None` each entry uses the default grid around its own mean
/// energy.
pub fn detuning_sweep(
    qed: &QedParams,
    det: &DetectionParams,
    detunings: &[f64],
    space: HilbertSpace,
    grid: Option<&FrequencyGrid>,
    n_points: usize,
) -> Result<Vec<DetectedSpectrum>, Error> {
    detunings
        .iter()
        .map(|&delta| {
            let p = QedParams {
                omega_c: qed.omega_a - delta,
                ..*qed
            };
            let g = grid.copied().unwrap_or_else(|| FrequencyGrid::default_with_points(&p, n_points));
            detected_spectrum(&p, det, space, &g)
        })
        .collect()
}
