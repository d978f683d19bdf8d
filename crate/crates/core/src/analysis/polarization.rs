use super::lm::{minimize, LmOptions};
use super::AnalysisError;
use crate::angle::{cos_deg, sin_deg, wrap_360};

/// Starting dipole angles for the multi-start fit (degrees).
const THETA_STARTS: [f64; 4] = [10.0, 30.0, 50.0, 70.0];

/// Below this `|sin 2θ_a|` the curve carries no information about φ_QD.
const PHI_IDENTIFIABILITY: f64 = 1e-2;

/// θ_a ∈ [0°, 90°], φ_QD ∈ [0°, 180°].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationFit {
    pub theta_a: f64,
    pub phi_qd: f64,
    pub amplitude: f64,
    pub residual_norm: f64,
    pub phi_identifiable: bool,
}

/// `|cosθ·cos2α + e^{iφ}·sinθ·sin2α|²` for angles in degrees.
pub fn polarization_curve(alpha: f64, theta_a: f64, phi_qd: f64) -> f64 {
    let (c2a, s2a) = (cos_deg(2.0 * alpha), sin_deg(2.0 * alpha));
    let (ct, st) = (cos_deg(theta_a), sin_deg(theta_a));
    let re = ct * c2a + cos_deg(phi_qd) * st * s2a;
    let im = sin_deg(phi_qd) * st * s2a;
    re * re + im * im
}

/// Least-squares fit of `amplitude · polarization_curve` to `(α°, counts)`
/// samples. Needs at least 6 samples whose α values span 90° or more.
pub fn fit_polarization(samples: &[(f64, f64)]) -> Result<PolarizationFit, AnalysisError> {
    if samples.len() < 6 {
        return Err(AnalysisError::InvalidInput(format!("need ≥ 6 samples, got {}", samples.len())));
    }
    if samples.iter().any(|(a, c)| !a.is_finite() || !c.is_finite()) {
        return Err(AnalysisError::InvalidInput("non-finite sample".into()));
    }
    let lo = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < 90.0 {
        return Err(AnalysisError::InvalidInput(format!(
            "α samples span {:.3}°, need ≥ 90°",
            hi - lo
        )));
    }
    let norm = samples.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
    if norm == 0.0 {
        return Err(AnalysisError::InvalidInput("all counts are zero".into()));
    }

    let residuals = |p: &[f64], out: &mut [f64]| {
        for (o, &(alpha, counts)) in out.iter_mut().zip(samples) {
            *o = p[0] * polarization_curve(alpha, p[1], p[2]) - counts / norm;
        }
    };
    let mut best: Option<(f64, [f64; 3])> = None;
    let mut last_err = None;
    for &theta0 in &THETA_STARTS {
        match minimize(residuals, &[1.0, theta0, 90.0], &[1.0, 45.0, 90.0], samples.len(), LmOptions::default()) {
            Ok(r) => {
                if best.is_none_or(|(b, _)| r.residual_norm < b) {
                    best = Some((r.residual_norm, [r.params[0], r.params[1], r.params[2]]));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let (res, [amp, theta, phi]) = best.ok_or_else(|| last_err.unwrap_or(AnalysisError::FitDiverged("no start converged".into())))?;
    let (theta_a, phi_qd) = canonical_angles(theta, phi);
    Ok(PolarizationFit {
        theta_a,
        phi_qd,
        amplitude: amp * norm,
        residual_norm: res * norm,
        phi_identifiable: sin_deg(2.0 * theta_a).abs() >= PHI_IDENTIFIABILITY,
    })
}

/// Maps an equivalent `(θ, φ)` pair into θ ∈ [0°, 90°], φ ∈ [0°, 180°].
/// The curve depends on θ through cos²θ, sin²θ and sin2θ·cosφ only.
fn canonical_angles(theta: f64, phi: f64) -> (f64, f64) {
    let mut t = wrap_360(theta);
    if t >= 180.0 {
        t -= 180.0;
    }
    let w = wrap_360(phi);
    let mut p = if w > 180.0 { 360.0 - w } else { w };
    if t > 90.0 {
        t = 180.0 - t;
        p = 180.0 - p;
    }
    (t, p)
}
