use nalgebra::DMatrix;
use proptest::prelude::*;
use vrs_core::analysis::{
    cui_raymer_splittings, doublet_model, find_peaks, fit_doublet, fit_polarization, polarization_curve, LorentzianPeak,
};
use vrs_core::config::{parse_config, FitTarget, Mode, RunConfig};
use vrs_core::detection::{correlators_for, detected_spectrum, DetectionParams};
use vrs_core::linalg::{build_operators, kron, ComplexMatrix, HilbertSpace};
use vrs_core::model::{build_hamiltonian, build_liouvillian, effective_g, PhiSign, QedParams};
use vrs_core::spectra::{correlation_spectrum, FrequencyGrid};
use vrs_core::steady::{solve_steady, solve_steady_with_trace_row};
use vrs_core::C64;

fn rate() -> impl Strategy<Value = f64> {
    0.1f64..100.0
}

prop_compose! {
    fn qed_params()(
        omega_a in -50.0f64..50.0,
        omega_c in -50.0f64..50.0,
        g_tilde in rate(),
        theta_a in 0.0f64..=90.0,
        phi_qd in 0.0f64..=180.0,
        plus in any::<bool>(),
        beta in -180.0f64..180.0,
        gamma in rate(),
        kappa in rate(),
        gamma_ph in 0.0f64..20.0,
        p_a in 0.0f64..5.0,
        p_c in 0.0f64..5.0,
    ) -> QedParams {
        QedParams {
            omega_a,
            omega_c,
            g_tilde,
            theta_a,
            phi_qd,
            phi_sign: if plus { PhiSign::Plus } else { PhiSign::Minus },
            beta,
            gamma,
            kappa,
            gamma_ph,
            p_a,
            p_c,
        }
    }
}

fn complex_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| ComplexMatrix::from_vec(n, n, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap())
}

fn integer_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-9i32..10, -9i32..10), n * n).prop_map(move |v| {
        ComplexMatrix::from_vec(n, n, v.into_iter().map(|(a, b)| C64::new(a as f64, b as f64)).collect()).unwrap()
    })
}

fn unit(m: ComplexMatrix) -> ComplexMatrix {
    let f = m.frobenius_norm();
    m.scale_real(1.0 / f)
}

fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative_on_integers(a in integer_matrix(2), b in integer_matrix(3), c in integer_matrix(2)) {
        prop_assert_eq!(kron(&kron(&a, &b), &c), kron(&a, &kron(&b, &c)));
    }

    #[test]
    fn kron_trace_factorizes(a in complex_matrix(3), b in complex_matrix(4)) {
        let (a, b) = (unit(a), unit(b));
        let lhs = kron(&a, &b).trace();
        let rhs = a.trace() * b.trace();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn ladder_operators(n_max in 1usize..8) {
        let space = HilbertSpace::new(n_max).unwrap();
        let ops = build_operators(space);
        prop_assert_eq!(ops.sigma.matmul(&ops.sigma).max_abs(), 0.0);
        for excited in [false, true] {
            for n in 0..=n_max {
                let out = ops.a_c.matvec(&space.basis_vector(excited, n));
                let mut want = vec![C64::new(0.0, 0.0); space.dim()];
                if n > 0 {
                    want[space.index(excited, n - 1)] = C64::new((n as f64).sqrt(), 0.0);
                }
                prop_assert_eq!(out, want);
            }
        }
    }

    #[test]
    fn hamiltonian_conserves_excitations(p in qed_params(), n_max in 1usize..5) {
        let space = HilbertSpace::new(n_max).unwrap();
        let ops = build_operators(space);
        let number = &ops.a_c.dagger().matmul(&ops.a_c) + &ops.sigma.dagger().matmul(&ops.sigma);
        let h = build_hamiltonian(&p, space);
        prop_assert!(h.commutator(&number).max_abs() < 1e-12 * h.max_abs().max(1.0));
    }

    #[test]
    fn generator_preserves_trace_and_hermiticity(p in qed_params(), n_max in 1usize..4, x in complex_matrix(8)) {
        let space = HilbertSpace::new(n_max).unwrap();
        let d = space.dim();
        let l = build_liouvillian(&p, space);
        let scale = l.generator().max_abs();
        // Trace annihilation: Σ_i 𝓛[(ii), c] = 0 for every column.
        for c in 0..l.liouville_dim() {
            let s: C64 = (0..d).map(|i| l.generator()[(i * d + i, c)]).sum();
            prop_assert!(s.norm() <= 1e-12 * scale);
        }
        let block = ComplexMatrix::from_vec(d, d, x.as_slice()[..d * d].to_vec()).unwrap();
        let herm = &block + &block.dagger();
        prop_assert!(l.apply(&herm).hermiticity_defect() <= 1e-12 * scale);
    }

    #[test]
    fn effective_g_invariant_under_beta_shift(p in qed_params()) {
        let shifted = QedParams { beta: p.beta + 180.0, ..p };
        prop_assert!((effective_g(&p) - effective_g(&shifted)).abs() <= 1e-12 * effective_g(&p).max(1.0));
    }

    #[test]
    fn cavity_splitting_decreases_with_kappa(g in 20.0f64..80.0, k1 in 0.0f64..50.0, dk in 0.01f64..10.0, gamma in 0.0f64..5.0) {
        let a = cui_raymer_splittings(g, k1, gamma).unwrap();
        let b = cui_raymer_splittings(g, k1 + dk, gamma).unwrap();
        prop_assert!(b.cavity < a.cavity);
    }

    #[test]
    fn polarization_fit_ignores_intensity_scale(theta in 5.0f64..85.0, phi in 5.0f64..175.0, scale in 1e-3f64..1e3) {
        let samples: Vec<(f64, f64)> = (0..36).map(|i| {
            let a = i as f64 * 5.0;
            (a, polarization_curve(a, theta, phi) * (1.0 + 0.02 * (a * 0.37).sin()))
        }).collect();
        let scaled: Vec<(f64, f64)> = samples.iter().map(|&(a, c)| (a, c * scale)).collect();
        let f1 = fit_polarization(&samples).unwrap();
        let f2 = fit_polarization(&scaled).unwrap();
        prop_assert!((f1.theta_a - f2.theta_a).abs() < 1e-6, "{f1:?} {f2:?}");
        prop_assert!((f1.phi_qd - f2.phi_qd).abs() < 1e-6, "{f1:?} {f2:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn liouvillian_is_stable(p in qed_params(), n_max in 1usize..4) {
        let l = build_liouvillian(&p, HilbertSpace::new(n_max).unwrap());
        let eig = to_nalgebra(l.generator()).schur().eigenvalues().expect("complex Schur form");
        let worst = eig.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(worst <= 1e-8, "max Re λ = {worst}");
    }

    #[test]
    fn vacuum_is_dark(p in qed_params(), n_max in 1usize..5) {
        let p = QedParams { p_a: 0.0, p_c: 0.0, ..p };
        let space = HilbertSpace::new(n_max).unwrap();
        let l = build_liouvillian(&p, space);
        prop_assert!(l.apply(&space.projector(false, 0)).max_abs() < 1e-12);
    }

    #[test]
    fn steady_state_invariants(p in qed_params(), n_max in 1usize..4, pick in 0usize..64) {
        let space = HilbertSpace::new(n_max).unwrap();
        let l = build_liouvillian(&p, space);
        let rho = solve_steady(&l).unwrap();
        prop_assert!((rho.matrix().trace() - C64::new(1.0, 0.0)).norm() < 1e-10);
        prop_assert!(rho.matrix().hermiticity_defect() < 1e-10);
        prop_assert!(rho.min_eigenvalue() > -1e-8);
        let d = space.dim();
        let row = (pick % d) * (d + 1);
        let other = solve_steady_with_trace_row(&l, row).unwrap();
        prop_assert!((rho.matrix() - other.matrix()).max_abs() < 1e-9);
    }

    #[test]
    fn emission_spectra_are_nonnegative(p in qed_params()) {
        let space = HilbertSpace::new(2).unwrap();
        let l = build_liouvillian(&p, space);
        let rho = solve_steady(&l).unwrap();
        let ops = build_operators(space);
        let grid = FrequencyGrid::default_with_points(&p, 201);
        for b in [&ops.a_c, &ops.sigma] {
            let f = correlation_spectrum(&l, &rho, &b.dagger(), b, &grid).unwrap();
            let max = f.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
            for z in &f {
                prop_assert!(z.re >= -1e-9 * max);
            }
        }
    }

    #[test]
    fn sign_average_is_linear(p in qed_params(), theta in 0.0f64..180.0) {
        let space = HilbertSpace::new(2).unwrap();
        let grid = FrequencyGrid::default_with_points(&p, 101);
        let det = DetectionParams { theta_proj: theta, instrument_fwhm: 0.0, ..DetectionParams::measured() };
        let avg = detected_spectrum(&p, &det, space, &grid).unwrap();
        let single = DetectionParams { sign_average: false, ..det };
        let plus = detected_spectrum(&p.with_sign(PhiSign::Plus), &single, space, &grid).unwrap();
        let minus = detected_spectrum(&p.with_sign(PhiSign::Minus), &single, space, &grid).unwrap();
        let scale = avg.raw.total.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        for k in 0..grid.len() {
            let mean_total = 0.5 * (plus.raw.total[k] + minus.raw.total[k]);
            let channel_sum = avg.raw.s_c[k] + avg.raw.s_a[k] + avg.raw.s_i1[k] + avg.raw.s_i2[k];
            prop_assert!((avg.raw.total[k] - mean_total).abs() <= 1e-12 * scale);
            prop_assert!((avg.raw.total[k] - channel_sum).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn beta_shift_flips_only_interference(p in qed_params(), theta in 0.0f64..180.0) {
        // β → β + 180° reverses g: direct channels are unchanged, both
        // interference channels change sign (equivalent to θ_c → θ_c + 180°).
        let space = HilbertSpace::new(2).unwrap();
        let grid = FrequencyGrid::default_with_points(&p, 101);
        let det = DetectionParams { instrument_fwhm: 0.0, ..DetectionParams::measured().with_theta(theta) };
        let a = detected_spectrum(&p, &det, space, &grid).unwrap().raw;
        let b = detected_spectrum(&QedParams { beta: p.beta + 180.0, ..p }, &det, space, &grid).unwrap().raw;
        let rotated = DetectionParams { theta_c: det.theta_c + 180.0, ..det };
        let c = detected_spectrum(&p, &rotated, space, &grid).unwrap().raw;
        let scale = [&a.s_c, &a.s_a, &a.s_i1, &a.s_i2]
            .iter()
            .flat_map(|v| v.iter())
            .fold(f64::MIN_POSITIVE, |m, v| m.max(v.abs()));
        for k in 0..grid.len() {
            prop_assert!((a.s_c[k] - b.s_c[k]).abs() <= 1e-9 * scale);
            prop_assert!((a.s_a[k] - b.s_a[k]).abs() <= 1e-9 * scale);
            prop_assert!((a.s_i1[k] + b.s_i1[k]).abs() <= 1e-9 * scale);
            prop_assert!((a.s_i2[k] + b.s_i2[k]).abs() <= 1e-9 * scale);
            prop_assert!((b.total[k] - c.total[k]).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn doublet_fit_recovers_centers(
        center in -30.0f64..30.0,
        w1 in 10.0f64..40.0,
        w2 in 10.0f64..40.0,
        sep_factor in 0.55f64..3.0,
        ratio in 0.3f64..3.0,
    ) {
        let sep = sep_factor * w1.max(w2);
        let truth = [
            LorentzianPeak { center: center - sep / 2.0, fwhm: w1, area: 1.0 },
            LorentzianPeak { center: center + sep / 2.0, fwhm: w2, area: ratio },
        ];
        let grid = FrequencyGrid::new(-250.0, 250.0, 2001).unwrap();
        let s = doublet_model(&truth, &grid, 13.5).unwrap();
        let fit = fit_doublet(&s, 13.5).unwrap();
        prop_assert!(fit.is_doublet(), "{fit:?}");
        for (f, t) in fit.peaks.iter().zip(&truth) {
            prop_assert!((f.center - t.center).abs() < 0.01 * sep, "{fit:?}");
        }
    }

    #[test]
    fn config_round_trip(
        p in qed_params(),
        n_max in 1usize..6,
        theta in -180.0f64..180.0,
        fwhm in 0.0f64..30.0,
        sign_average in any::<bool>(),
        explicit_grid in any::<bool>(),
        points in 3usize..5000,
        mode in 0usize..5,
        sweep in prop::collection::vec(-100.0f64..100.0, 1..6),
    ) {
        let mode = [Mode::Resonance, Mode::DetuningSweep, Mode::HwpSweep, Mode::Complementarity, Mode::Fit][mode];
        let cfg = RunConfig {
            qed: p,
            det: DetectionParams { theta_proj: theta, instrument_fwhm: fwhm, sign_average, ..DetectionParams::measured() },
            n_max,
            grid: explicit_grid.then(|| FrequencyGrid::new(-123.25, 97.5, points).unwrap()),
            grid_points: points,
            mode,
            sweep,
            out_dir: "some dir/out".into(),
            input: Some("data.csv".into()),
            fit_target: FitTarget::Polarization,
            drive_rate: p.p_c,
        };
        prop_assert_eq!(parse_config(&cfg.serialize()).unwrap(), cfg);
    }
}

#[test]
fn peak_positions_stable_under_grid_refinement() {
    let qed = QedParams::measured();
    let space = HilbertSpace::new(3).unwrap();
    for theta in [0.0, 90.0] {
        let det = DetectionParams::measured().with_theta(theta);
        let coarse = FrequencyGrid::default_with_points(&qed, 1001);
        let fine = FrequencyGrid::default_with_points(&qed, 2001);
        let pc = find_peaks(&detected_spectrum(&qed, &det, space, &coarse).unwrap().raw.total_spectrum());
        let pf = find_peaks(&detected_spectrum(&qed, &det, space, &fine).unwrap().raw.total_spectrum());
        assert_eq!(pc.len(), pf.len());
        for (a, b) in pc.iter().zip(&pf) {
            assert!((a.energy - b.energy).abs() < coarse.spacing(), "Θ={theta}: {a:?} vs {b:?}");
        }
    }
}

#[test]
fn cross_polarized_intensity_is_much_weaker() {
    let qed = QedParams::measured();
    let grid = FrequencyGrid::default_for(&qed);
    let corr = correlators_for(&qed, &DetectionParams::measured(), HilbertSpace::new(4).unwrap(), &grid).unwrap();
    let integral = |theta: f64| {
        vrs_core::detection::assemble_detected(&qed, &DetectionParams::measured().with_theta(theta), &corr)
            .unwrap()
            .raw
            .total_spectrum()
            .integral()
    };
    let ratio = integral(0.0) / integral(90.0);
    assert!(ratio > 20.0, "integrated ratio {ratio}");
}
