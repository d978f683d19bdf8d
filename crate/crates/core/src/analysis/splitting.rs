use super::AnalysisError;

/// Doublet separations seen through the two detection channels (µeV).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Splittings {
    pub cavity: f64,
    pub emitter: f64,
}

/// Closed-form vacuum Rabi splittings of the cavity and emitter spectra:
///
/// ```text
/// cavity  = 2 √(|g|² − (κ² + γ²)/8)
/// emitter = 2 √( √(|g|⁴ + 2|g|²κ(κ+γ)/4) − κ²/4 )
/// ```
pub fn cui_raymer_splittings(g: f64, kappa: f64, gamma: f64) -> Result<Splittings, AnalysisError> {
    for (name, v) in [("g", g), ("kappa", kappa), ("gamma", gamma)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(AnalysisError::InvalidInput(format!("{name} must be finite and ≥ 0, got {v}")));
        }
    }
    let g2 = g * g;
    let cavity_rad = g2 - (kappa * kappa + gamma * gamma) / 8.0;
    if cavity_rad < 0.0 {
        return Err(AnalysisError::BelowThreshold {
            which: "cavity",
            value: cavity_rad,
        });
    }
    let emitter_rad = (g2 * g2 + 2.0 * g2 * kappa * (kappa + gamma) / 4.0).sqrt() - kappa * kappa / 4.0;
    if emitter_rad < 0.0 {
        return Err(AnalysisError::BelowThreshold {
            which: "emitter",
            value: emitter_rad,
        });
    }
    Ok(Splittings {
        cavity: 2.0 * cavity_rad.sqrt(),
        emitter: 2.0 * emitter_rad.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measured_parameters() {
        let s = cui_raymer_splittings(41.0, 66.0, 0.28).unwrap();
        assert!((s.cavity - 67.42).abs() < 0.01, "{}", s.cavity);
        assert!((s.emitter - 76.45).abs() < 0.01, "{}", s.emitter);
    }

    #[test]
    fn lossless_limit() {
        let s = cui_raymer_splittings(30.0, 0.0, 0.0).unwrap();
        assert_eq!(s.cavity, 60.0);
        assert_eq!(s.emitter, 60.0);
    }

    #[test]
    fn weak_coupling_is_rejected() {
        assert!(matches!(
            cui_raymer_splittings(10.0, 66.0, 0.28),
            Err(AnalysisError::BelowThreshold { which: "cavity", .. })
        ));
    }

    #[test]
    fn cavity_splitting_shrinks_with_kappa() {
        let mut last = f64::INFINITY;
        for k in 0..100 {
            let s = cui_raymer_splittings(41.0, k as f64, 0.28).unwrap();
            assert!(s.cavity < last);
            last = s.cavity;
        }
    }
}
