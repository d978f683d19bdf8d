//! C ABI over `vrs-core`.
//!
//! Handles are opaque heap objects owned by the caller and released with the
//! matching `*_free`. Every fallible call returns a [`VrsStatus`]; on failure
//! a description is available from [`vrs_last_error_message`] on the same
//! thread. Output pointers are written only on success. Panics never cross
//! the boundary; they surface as [`VrsStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vrs_core::analysis::cui_raymer_splittings;
use vrs_core::config::RunConfig;
use vrs_core::linalg::HilbertSpace;
use vrs_core::model::PhiSign;
use vrs_core::{detected_spectrum, effective_g, hwp_to_theta, parse_config, DetectedSpectrum};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VrsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Unparseable or out-of-range configuration.
    ConfigError = 3,
    /// Singular system or failed numerical procedure.
    NumericError = 4,
    /// The caller's buffer is shorter than required; the required length is
    /// reported through the length output.
    BufferTooSmall = 5,
    InvalidArgument = 6,
    Panic = 7,
}

/// Columns of a computed spectrum.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VrsChannel {
    /// Frequency grid (µeV).
    Omega = 0,
    Cavity = 1,
    Emitter = 2,
    Interference1 = 3,
    Interference2 = 4,
    Total = 5,
    TotalConvolved = 6,
}

/// Run configuration: physics, detection geometry and grid.
pub struct VrsConfig {
    inner: RunConfig,
}

/// Detected spectrum on its frequency grid.
pub struct VrsSpectrum {
    omega: Vec<f64>,
    inner: DetectedSpectrum,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("interior NULs removed"));
}

fn fail(status: VrsStatus, msg: impl Into<String>) -> VrsStatus {
    set_error(msg);
    status
}

fn core_status(e: &vrs_core::Error) -> VrsStatus {
    if e.is_config() {
        VrsStatus::ConfigError
    } else {
        VrsStatus::NumericError
    }
}

/// Runs `f`, converting a panic into [`VrsStatus::Panic`].
fn guard(f: impl FnOnce() -> VrsStatus) -> VrsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let what = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(VrsStatus::Panic, format!("internal panic: {what}"))
        }
    }
}

/// # Safety
/// `p` is NULL or a NUL-terminated string valid for reads.
unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, VrsStatus> {
    if p.is_null() {
        return Err(fail(VrsStatus::NullPointer, "string argument is NULL"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| fail(VrsStatus::InvalidUtf8, format!("string argument is not UTF-8: {e}")))
}

/// Message for the most recent failure on this thread, or an empty string.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn vrs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Configuration with the measured parameter set. Never NULL.
#[no_mangle]
pub extern "C" fn vrs_config_default() -> *mut VrsConfig {
    Box::into_raw(Box::new(VrsConfig {
        inner: RunConfig::default(),
    }))
}

/// Parses INI text (sections `physics`, `detection`, `grid`, `run`).
///
/// # Safety
/// `text` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn vrs_config_from_str(text: *const c_char, out: *mut *mut VrsConfig) -> VrsStatus {
    guard(|| {
        if out.is_null() {
            return fail(VrsStatus::NullPointer, "`out` is NULL");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_config(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(VrsConfig { inner }));
                VrsStatus::Ok
            }
            Err(e) => fail(VrsStatus::ConfigError, e.to_string()),
        }
    })
}

/// Sets a numeric parameter named `section.key`, e.g. `physics.kappa` or
/// `detection.theta_proj`. `physics.g` recalibrates `g_tilde` to the given
/// effective coupling. The configuration is unchanged unless the result
/// validates.
///
/// # Safety
/// `cfg` is a live handle; `key` is a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn vrs_config_set(cfg: *mut VrsConfig, key: *const c_char, value: f64) -> VrsStatus {
    guard(|| {
        let Some(cfg) = cfg.as_mut() else {
            return fail(VrsStatus::NullPointer, "`cfg` is NULL");
        };
        let key = match read_str(key) {
            Ok(k) => k,
            Err(s) => return s,
        };
        let mut next = cfg.inner.clone();
        if let Err(s) = assign(&mut next, key, value) {
            return s;
        }
        match next.validate() {
            Ok(()) => {
                cfg.inner = next;
                VrsStatus::Ok
            }
            Err(e) => fail(VrsStatus::ConfigError, e.to_string()),
        }
    })
}

fn as_count(key: &str, v: f64) -> Result<usize, VrsStatus> {
    if v.fract() == 0.0 && v >= 0.0 && v <= u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(fail(VrsStatus::ConfigError, format!("`{key}`: expected a non-negative integer, got {v}")))
    }
}

fn assign(c: &mut RunConfig, key: &str, v: f64) -> Result<(), VrsStatus> {
    let (q, d) = (&mut c.qed, &mut c.det);
    match key {
        "physics.omega_a" => q.omega_a = v,
        "physics.omega_c" => q.omega_c = v,
        "physics.g_tilde" => q.g_tilde = v,
        "physics.g" => *q = q.with_effective_g(v).map_err(|e| fail(VrsStatus::ConfigError, e.to_string()))?,
        "physics.theta_a" => q.theta_a = v,
        "physics.phi_qd" => q.phi_qd = v,
        "physics.phi_sign" => {
            q.phi_sign = PhiSign::from_value(v)
                .ok_or_else(|| fail(VrsStatus::ConfigError, format!("`phi_sign`: must be 1 or -1, got {v}")))?
        }
        "physics.beta" => q.beta = v,
        "physics.gamma" => q.gamma = v,
        "physics.kappa" => q.kappa = v,
        "physics.gamma_ph" => q.gamma_ph = v,
        "physics.p_a" => q.p_a = v,
        "physics.p_c" => q.p_c = v,
        "physics.n_max" => c.n_max = as_count(key, v)?,
        "detection.theta_proj" => d.theta_proj = v,
        "detection.amp_a" => d.amp_a = v,
        "detection.amp_b" => d.amp_b = v,
        "detection.overlap_p" => d.overlap_p = v,
        "detection.theta_c" => d.theta_c = v,
        "detection.instrument_fwhm" => d.instrument_fwhm = v,
        "detection.sign_average" => d.sign_average = v != 0.0,
        "grid.n_points" => {
            c.grid_points = as_count(key, v)?;
            c.grid = None;
        }
        _ => return Err(fail(VrsStatus::InvalidArgument, format!("unknown numeric key `{key}`"))),
    }
    Ok(())
}

/// Canonical INI text of `cfg`, NUL-terminated. `*len` receives the
/// required size including the terminator; with `buf` NULL or too short,
/// nothing is written and [`VrsStatus::BufferTooSmall`] is returned.
///
/// # Safety
/// `cfg` is a live handle; `buf` is NULL or writable for `cap` bytes; `len`
/// is writable.
#[no_mangle]
pub unsafe extern "C" fn vrs_config_to_string(cfg: *const VrsConfig, buf: *mut c_char, cap: usize, len: *mut usize) -> VrsStatus {
    guard(|| {
        let (Some(cfg), false) = (cfg.as_ref(), len.is_null()) else {
            return fail(VrsStatus::NullPointer, "`cfg` or `len` is NULL");
        };
        let text = cfg.inner.serialize();
        let need = text.len() + 1;
        *len = need;
        if buf.is_null() || cap < need {
            return fail(VrsStatus::BufferTooSmall, format!("{need} bytes required, {cap} given"));
        }
        ptr::copy_nonoverlapping(text.as_ptr(), buf.cast::<u8>(), text.len());
        *buf.add(text.len()) = 0;
        VrsStatus::Ok
    })
}

/// Effective coupling |g| (µeV) of the configured geometry.
///
/// # Safety
/// `cfg` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn vrs_effective_g(cfg: *const VrsConfig, out: *mut f64) -> VrsStatus {
    guard(|| match (cfg.as_ref(), out.is_null()) {
        (Some(c), false) => {
            *out = effective_g(&c.inner.qed);
            VrsStatus::Ok
        }
        _ => fail(VrsStatus::NullPointer, "`cfg` or `out` is NULL"),
    })
}

/// # Safety
/// `cfg` is NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vrs_config_free(cfg: *mut VrsConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Detected spectrum for the configured parameters on the configured grid.
///
/// # Safety
/// `cfg` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn vrs_spectrum_compute(cfg: *const VrsConfig, out: *mut *mut VrsSpectrum) -> VrsStatus {
    guard(|| {
        let (Some(cfg), false) = (cfg.as_ref(), out.is_null()) else {
            return fail(VrsStatus::NullPointer, "`cfg` or `out` is NULL");
        };
        let c = &cfg.inner;
        if let Err(e) = c.validate() {
            return fail(VrsStatus::ConfigError, e.to_string());
        }
        let result = HilbertSpace::new(c.n_max)
            .map_err(vrs_core::Error::from)
            .and_then(|space| {
                let grid = c.grid_for(&c.qed);
                detected_spectrum(&c.qed, &c.det, space, &grid).map(|s| (grid.points(), s))
            });
        match result {
            Ok((omega, inner)) => {
                *out = Box::into_raw(Box::new(VrsSpectrum { omega, inner }));
                VrsStatus::Ok
            }
            Err(e) => fail(core_status(&e), e.to_string()),
        }
    })
}

/// Number of grid points; 0 for NULL.
///
/// # Safety
/// `s` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vrs_spectrum_len(s: *const VrsSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.omega.len())
}

/// Copies one column into `buf`. `*len` receives the column length; with
/// `cap` shorter than that, nothing is copied and
/// [`VrsStatus::BufferTooSmall`] is returned.
///
/// # Safety
/// `s` is a live handle; `buf` is NULL or writable for `cap` doubles; `len`
/// is writable.
#[no_mangle]
pub unsafe extern "C" fn vrs_spectrum_channel(
    s: *const VrsSpectrum,
    channel: VrsChannel,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> VrsStatus {
    guard(|| {
        let (Some(s), false) = (s.as_ref(), len.is_null()) else {
            return fail(VrsStatus::NullPointer, "`s` or `len` is NULL");
        };
        let col: &[f64] = match channel {
            VrsChannel::Omega => &s.omega,
            VrsChannel::Cavity => &s.inner.raw.s_c,
            VrsChannel::Emitter => &s.inner.raw.s_a,
            VrsChannel::Interference1 => &s.inner.raw.s_i1,
            VrsChannel::Interference2 => &s.inner.raw.s_i2,
            VrsChannel::Total => &s.inner.raw.total,
            VrsChannel::TotalConvolved => &s.inner.convolved.total,
        };
        *len = col.len();
        if buf.is_null() || cap < col.len() {
            return fail(VrsStatus::BufferTooSmall, format!("{} values required, {cap} given", col.len()));
        }
        ptr::copy_nonoverlapping(col.as_ptr(), buf, col.len());
        VrsStatus::Ok
    })
}

/// # Safety
/// `s` is NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vrs_spectrum_free(s: *mut VrsSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Closed-form cavity- and emitter-channel splittings (µeV).
///
/// # Safety
/// `cavity` and `emitter` are writable.
#[no_mangle]
pub unsafe extern "C" fn vrs_cui_raymer(g: f64, kappa: f64, gamma: f64, cavity: *mut f64, emitter: *mut f64) -> VrsStatus {
    guard(|| {
        if cavity.is_null() || emitter.is_null() {
            return fail(VrsStatus::NullPointer, "output pointer is NULL");
        }
        match cui_raymer_splittings(g, kappa, gamma) {
            Ok(s) => {
                *cavity = s.cavity;
                *emitter = s.emitter;
                VrsStatus::Ok
            }
            Err(e) => fail(VrsStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Projection angle Θ (degrees, [0, 180)) selected by a half-wave-plate
/// angle α.
#[no_mangle]
pub extern "C" fn vrs_hwp_to_theta(alpha_deg: f64) -> f64 {
    hwp_to_theta(alpha_deg)
}

/// Crate version, NUL-terminated, static.
#[no_mangle]
pub extern "C" fn vrs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
