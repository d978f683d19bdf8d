use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use vrs_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(vrs_last_error_message()) }.to_string_lossy().into_owned()
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

#[test]
fn closed_forms_and_angle_mapping() {
    let (mut cav, mut emi) = (0.0, 0.0);
    assert_eq!(unsafe { vrs_cui_raymer(41.0, 66.0, 0.28, &mut cav, &mut emi) }, VrsStatus::Ok);
    assert!((cav - 67.424).abs() < 1e-3 && (emi - 76.446).abs() < 1e-3);
    assert_eq!(unsafe { vrs_cui_raymer(10.0, 66.0, 0.28, &mut cav, &mut emi) }, VrsStatus::InvalidArgument);
    assert_eq!(unsafe { vrs_cui_raymer(41.0, 66.0, 0.28, ptr::null_mut(), &mut emi) }, VrsStatus::NullPointer);
    assert_eq!(vrs_hwp_to_theta(5.5), 0.0);
    assert!((vrs_hwp_to_theta(50.5) - 90.0).abs() < 1e-12);
}

#[test]
fn config_round_trip_through_text() {
    let cfg = vrs_config_default();
    let mut g = 0.0;
    assert_eq!(unsafe { vrs_effective_g(cfg, &mut g) }, VrsStatus::Ok);
    assert!((g - 41.0).abs() < 1e-9);
    unsafe {
        assert_eq!(vrs_config_set(cfg, c("physics.g").as_ptr(), 30.0), VrsStatus::Ok);
        assert_eq!(vrs_effective_g(cfg, &mut g), VrsStatus::Ok);
        assert!((g - 30.0).abs() < 1e-9);
        assert_eq!(vrs_config_set(cfg, c("detection.theta_proj").as_ptr(), 33.0), VrsStatus::Ok);
    }

    let mut len = 0usize;
    assert_eq!(unsafe { vrs_config_to_string(cfg, ptr::null_mut(), 0, &mut len) }, VrsStatus::BufferTooSmall);
    let mut buf = vec![0u8; len];
    assert_eq!(
        unsafe { vrs_config_to_string(cfg, buf.as_mut_ptr().cast(), buf.len(), &mut len) },
        VrsStatus::Ok
    );
    let text = CStr::from_bytes_with_nul(&buf).unwrap();
    assert!(text.to_str().unwrap().contains("theta_proj = 33"));

    let mut copy = ptr::null_mut();
    assert_eq!(unsafe { vrs_config_from_str(text.as_ptr(), &mut copy) }, VrsStatus::Ok);
    let mut g2 = 0.0;
    assert_eq!(unsafe { vrs_effective_g(copy, &mut g2) }, VrsStatus::Ok);
    assert_eq!(g, g2);
    unsafe {
        vrs_config_free(copy);
        vrs_config_free(cfg);
    }
}

#[test]
fn invalid_settings_leave_config_unchanged() {
    let cfg = vrs_config_default();
    unsafe {
        assert_eq!(vrs_config_set(cfg, c("physics.gamma").as_ptr(), -1.0), VrsStatus::ConfigError);
        assert!(last_error().contains("gamma"), "{}", last_error());
        assert_eq!(vrs_config_set(cfg, c("physics.gama").as_ptr(), 1.0), VrsStatus::InvalidArgument);
        assert_eq!(vrs_config_set(cfg, c("physics.n_max").as_ptr(), 2.5), VrsStatus::ConfigError);
        assert_eq!(vrs_config_set(ptr::null_mut(), c("physics.gamma").as_ptr(), 1.0), VrsStatus::NullPointer);
        assert_eq!(vrs_config_set(cfg, [0xffu8, 0].as_ptr().cast(), 1.0), VrsStatus::InvalidUtf8);
    }
    let mut len = 0usize;
    unsafe { vrs_config_to_string(cfg, ptr::null_mut(), 0, &mut len) };
    let mut buf = vec![0u8; len];
    unsafe { vrs_config_to_string(cfg, buf.as_mut_ptr().cast(), len, &mut len) };
    assert!(CStr::from_bytes_with_nul(&buf).unwrap().to_str().unwrap().contains("gamma = 0.28"));
    unsafe { vrs_config_free(cfg) };
}

#[test]
fn parse_errors_are_reported() {
    let mut cfg = ptr::null_mut();
    let status = unsafe { vrs_config_from_str(c("[physics]\ngamma = fast\n").as_ptr(), &mut cfg) };
    assert_eq!(status, VrsStatus::ConfigError);
    assert!(cfg.is_null());
    assert!(last_error().contains("line 2"), "{}", last_error());
    assert_eq!(unsafe { vrs_config_from_str(ptr::null(), &mut cfg) }, VrsStatus::NullPointer);
}

#[test]
fn spectrum_matches_core() {
    let cfg = vrs_config_default();
    unsafe {
        vrs_config_set(cfg, c("physics.n_max").as_ptr(), 2.0);
        vrs_config_set(cfg, c("grid.n_points").as_ptr(), 301.0);
    }
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { vrs_spectrum_compute(cfg, &mut s) }, VrsStatus::Ok);
    let n = unsafe { vrs_spectrum_len(s) };
    assert_eq!(n, 301);

    let column = |ch: VrsChannel| -> Vec<f64> {
        let mut out = vec![0.0; n];
        let mut len = 0usize;
        assert_eq!(unsafe { vrs_spectrum_channel(s, ch, out.as_mut_ptr(), n, &mut len) }, VrsStatus::Ok);
        assert_eq!(len, n);
        out
    };
    let parts: Vec<Vec<f64>> = [VrsChannel::Cavity, VrsChannel::Emitter, VrsChannel::Interference1, VrsChannel::Interference2]
        .into_iter()
        .map(column)
        .collect();
    let total = column(VrsChannel::Total);
    for k in 0..n {
        let sum: f64 = parts.iter().map(|p| p[k]).sum();
        assert!((sum - total[k]).abs() <= 1e-12 * total[k].abs().max(1e-30));
    }

    let cfg_core = vrs_core::config::RunConfig {
        n_max: 2,
        grid_points: 301,
        ..Default::default()
    };
    let grid = cfg_core.grid_for(&cfg_core.qed);
    let reference = vrs_core::detected_spectrum(
        &cfg_core.qed,
        &cfg_core.det,
        vrs_core::HilbertSpace::new(2).unwrap(),
        &grid,
    )
    .unwrap();
    assert_eq!(column(VrsChannel::Omega), grid.points());
    assert_eq!(column(VrsChannel::TotalConvolved), reference.convolved.total);

    let mut short = [0.0; 4];
    let mut len = 0usize;
    assert_eq!(
        unsafe { vrs_spectrum_channel(s, VrsChannel::Total, short.as_mut_ptr(), 4, &mut len) },
        VrsStatus::BufferTooSmall
    );
    assert_eq!(len, n);
    unsafe {
        vrs_spectrum_free(s);
        vrs_config_free(cfg);
        vrs_spectrum_free(ptr::null_mut());
        vrs_config_free(ptr::null_mut());
    }
    assert_eq!(unsafe { vrs_spectrum_len(ptr::null()) }, 0);
}

#[test]
fn coarse_grid_is_a_config_error() {
    let cfg = vrs_config_default();
    unsafe { vrs_config_set(cfg, c("grid.n_points").as_ptr(), 41.0) };
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { vrs_spectrum_compute(cfg, &mut s) }, VrsStatus::ConfigError);
    assert!(s.is_null());
    assert!(last_error().contains("coarser"), "{}", last_error());
    unsafe { vrs_config_free(cfg) };
}

/// Directory holding the library artifacts of the current profile.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(|deps| deps.parent()).unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let header = include.join("vrs_sim.h");
    assert!(header.exists(), "build script did not write {}", header.display());
    let lib = artifact_dir().join("libvrs_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let src = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let out = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Wextra", "-Werror", "-I"])
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .output()
        .expect("C compiler available");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
