//! Closed-form oracles and qualitative signatures of the detected spectra.

use vrs_core::analysis::{asymmetry, central_dip_ratio, find_peaks, fit_doublet, Peak};
use vrs_core::detection::detuning_sweep;
use vrs_core::linalg::{build_operators, expm};
use vrs_core::spectra::convolve_instrument;
use vrs_core::{
    build_liouvillian, detected_spectrum, solve_steady, ComplexMatrix, DetectionParams, FrequencyGrid, HilbertSpace, PhiSign,
    QedParams, RawSpectrum,
};

fn quiet() -> QedParams {
    QedParams {
        omega_a: 0.0,
        omega_c: 0.0,
        g_tilde: 0.0,
        theta_a: 0.0,
        phi_qd: 0.0,
        phi_sign: PhiSign::Plus,
        beta: 0.0,
        gamma: 0.0,
        kappa: 0.0,
        gamma_ph: 0.0,
        p_a: 0.0,
        p_c: 0.0,
    }
}

fn two_highest(s: &RawSpectrum) -> (Peak, Peak) {
    let mut p = find_peaks(s);
    assert!(p.len() >= 2, "expected two peaks, found {}", p.len());
    p.sort_by(|a, b| b.height.total_cmp(&a.height));
    let (a, b) = (p[0], p[1]);
    if a.energy < b.energy {
        (a, b)
    } else {
        (b, a)
    }
}

#[test]
fn excited_population_decays_at_gamma() {
    let gamma = 0.28;
    let space = HilbertSpace::new(1).unwrap();
    let l = build_liouvillian(&QedParams { gamma, ..quiet() }, space);
    let excited = space.projector(true, 0);
    let ops = build_operators(space);
    let n_op = ops.sigma.dagger().matmul(&ops.sigma);
    for t in [0.5, 3.0, 10.0] {
        let prop = expm(&l.generator().scale_real(t));
        let rho = ComplexMatrix::unvectorize(space.dim(), &prop.matvec(&excited.vectorize())).unwrap();
        let pop = rho.matmul(&n_op).trace().re;
        let rate = -pop.ln() / t;
        assert!((rate - gamma).abs() < 1e-10, "t = {t}: rate {rate}");
    }
}

#[test]
fn incoherent_cavity_pump_gives_thermal_occupation() {
    // (P_c/2)(D[a] + D[a†]) adds P_c to both the loss and gain rates, so the
    // detailed-balance ratio is P_c/(κ + P_c) and ⟨a†a⟩ = P_c/κ.
    let (kappa, p_c) = (66.0, 5.0);
    let space = HilbertSpace::new(14).unwrap();
    let rho = solve_steady(&build_liouvillian(&QedParams { kappa, p_c, ..quiet() }, space)).unwrap();
    let ops = build_operators(space);
    let n = rho.expect(&ops.a_c.dagger().matmul(&ops.a_c)).re;
    assert!((n - p_c / kappa).abs() < 1e-12, "⟨a†a⟩ = {n}");
    let x = p_c / (kappa + p_c);
    for k in 0..4 {
        let pk = rho.expect(&space.projector(false, k)).re;
        assert!((pk - (1.0 - x) * x.powi(k as i32)).abs() < 1e-12, "p({k}) = {pk}");
    }
}

#[test]
fn instrument_keeps_64_uev_doublet_resolved() {
    let grid = FrequencyGrid::new(-150.0, 150.0, 3001).unwrap();
    let mut v = vec![0.0; grid.len()];
    let (lo, hi) = (1180, 1820);
    v[lo] = 1.0;
    v[hi] = 1.0;
    assert!((grid.point(hi) - grid.point(lo) - 64.0).abs() < 1e-9);
    let c = convolve_instrument(&RawSpectrum::new(grid, v).unwrap(), 13.5).unwrap();
    let (a, b) = two_highest(&c);
    assert!((b.energy - a.energy - 64.0).abs() <= grid.spacing(), "separation {}", b.energy - a.energy);
    assert!(central_dip_ratio(&c).unwrap() < 1e-6);
}

#[test]
fn zero_overlap_removes_interference() {
    let qed = QedParams::measured();
    let det = DetectionParams {
        overlap_p: 0.0,
        ..DetectionParams::measured().with_theta(30.0)
    };
    let grid = FrequencyGrid::default_with_points(&qed, 401);
    let s = detected_spectrum(&qed, &det, HilbertSpace::new(3).unwrap(), &grid).unwrap();
    assert!(s.raw.s_i1.iter().chain(&s.raw.s_i2).all(|&v| v == 0.0));
    assert!(s.raw.s_c.iter().any(|&v| v > 0.0) && s.raw.s_a.iter().any(|&v| v > 0.0));
}

#[test]
fn cavity_projection_gives_blue_weighted_doublet() {
    let qed = QedParams::measured();
    let det = DetectionParams::measured().with_theta(0.0);
    let grid = FrequencyGrid::default_for(&qed);
    let s = detected_spectrum(&qed, &det, HilbertSpace::new(4).unwrap(), &grid).unwrap();
    let total = s.convolved.total_spectrum();
    let (lo, hi) = two_highest(&total);
    assert!(hi.height > lo.height, "low {} high {}", lo.height, hi.height);
    let separation = hi.energy - lo.energy;
    assert!((63.0..=68.0).contains(&separation), "separation {separation}");
    let fit = fit_doublet(&total, det.instrument_fwhm).unwrap();
    assert!(asymmetry(&fit).unwrap() > 0.0);
    // Observed 64 µeV; the Lorentzian pair fitted to the interference
    // lineshape sits within 10% of it.
    let split = fit.splitting().unwrap();
    assert!((split - 64.0).abs() <= 6.4, "fitted splitting {split}");
}

#[test]
fn far_detuned_emitter_projection_shows_one_line_near_emitter() {
    let qed = QedParams {
        omega_c: -300.0,
        ..QedParams::measured()
    };
    let det = DetectionParams::measured().with_theta(90.0);
    let grid = FrequencyGrid::new(-400.0, 150.0, 2751).unwrap();
    let s = detected_spectrum(&qed, &det, HilbertSpace::new(3).unwrap(), &grid).unwrap();
    let total = s.convolved.total_spectrum();
    let mut peaks = find_peaks(&total);
    peaks.sort_by(|a, b| b.height.total_cmp(&a.height));
    // Dispersive shift g²/δ ≈ 5.6 µeV away from ω_a.
    assert!((peaks[0].energy - qed.omega_a).abs() < 8.0, "main peak at {}", peaks[0].energy);
    for p in &peaks[1..] {
        assert!(p.height < 0.05 * peaks[0].height, "secondary peak {} at {}", p.height, p.energy);
    }
}

#[test]
fn resonance_is_an_anticrossing() {
    let detunings = [-40.0, -20.0, 0.0, 20.0, 40.0];
    let qed = QedParams::measured();
    for theta in [0.0, 90.0] {
        let det = DetectionParams::measured().with_theta(theta);
        let runs = detuning_sweep(&qed, &det, &detunings, HilbertSpace::new(3).unwrap(), None, 2001).unwrap();
        let (lo, hi) = two_highest(&runs[2].convolved.total_spectrum());
        assert!(hi.energy - lo.energy >= 60.0, "Θ = {theta}: resonant gap {}", hi.energy - lo.energy);
        let fitted: Vec<f64> = runs
            .iter()
            .map(|r| fit_doublet(&r.convolved.total_spectrum(), det.instrument_fwhm).unwrap().splitting().unwrap())
            .collect();
        for (k, g) in fitted.iter().enumerate() {
            assert!(*g >= fitted[2], "Θ = {theta}: fitted gap {g} at δ = {} below resonance {}", detunings[k], fitted[2]);
        }
    }
}

#[test]
fn emitter_projection_mirrors_under_detuning_reversal() {
    // Θ = 90° keeps only the emitter channel, whose spectrum depends on |g|;
    // conjugating the master equation maps δ → −δ and ω → −ω about the mean.
    let delta = 30.0;
    let qed = QedParams::measured();
    let det = DetectionParams::measured().with_theta(90.0);
    let space = HilbertSpace::new(3).unwrap();
    let runs = detuning_sweep(&qed, &det, &[delta, -delta], space, None, 2001).unwrap();
    let plus = &runs[0].convolved.total;
    let minus = &runs[1].convolved.total;
    let scale = plus.iter().cloned().fold(0.0, f64::max);
    let worst = plus
        .iter()
        .zip(minus.iter().rev())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-9 * scale, "mirror defect {worst}");

    let mean = |d: f64| qed.omega_a - 0.5 * d;
    let fits: Vec<Vec<f64>> = runs
        .iter()
        .zip([delta, -delta])
        .map(|(r, d)| {
            let f = fit_doublet(&r.convolved.total_spectrum(), det.instrument_fwhm).unwrap();
            f.peak_energies().iter().map(|e| e - mean(d)).collect()
        })
        .collect();
    assert_eq!(fits[0].len(), fits[1].len());
    for (a, b) in fits[0].iter().zip(fits[1].iter().rev()) {
        assert!((a + b).abs() < 0.05, "mirrored centers {a} and {b}");
    }
}

#[test]
fn phi_sign_average_is_symmetric_in_sign() {
    let qed = QedParams::measured();
    let grid = FrequencyGrid::default_with_points(&qed, 401);
    let space = HilbertSpace::new(3).unwrap();
    let det = DetectionParams::measured().with_theta(45.0);
    let avg = detected_spectrum(&qed, &det, space, &grid).unwrap();
    let swapped = detected_spectrum(&qed.with_sign(PhiSign::Minus), &det, space, &grid).unwrap();
    let d = avg.raw.total.iter().zip(&swapped.raw.total).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(d < 1e-12, "{d}");
}
