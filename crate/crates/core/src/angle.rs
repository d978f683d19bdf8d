//! Degree-based trigonometry that is exact on multiples of 90°.

use num_complex::Complex64 as C64;

/// Reduces `deg` to `[0, 360)`.
pub fn wrap_360(deg: f64) -> f64 {
    let r = deg.rem_euclid(360.0);
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Reduces `deg` to `[0, 180)`.
pub fn wrap_180(deg: f64) -> f64 {
    let r = deg.rem_euclid(180.0);
    if r >= 180.0 {
        0.0
    } else {
        r
    }
}

fn quadrant(deg: f64) -> Option<u8> {
    let w = wrap_360(deg);
    if w % 90.0 == 0.0 {
        Some((w / 90.0) as u8)
    } else {
        None
    }
}

pub fn cos_deg(deg: f64) -> f64 {
    match quadrant(deg) {
        Some(0) => 1.0,
        Some(1) | Some(3) => 0.0,
        Some(2) => -1.0,
        _ => deg.to_radians().cos(),
    }
}

pub fn sin_deg(deg: f64) -> f64 {
    match quadrant(deg) {
        Some(0) | Some(2) => 0.0,
        Some(1) => 1.0,
        Some(3) => -1.0,
        _ => deg.to_radians().sin(),
    }
}

/// `e^{i·deg}`.
pub fn cis_deg(deg: f64) -> C64 {
    C64::new(cos_deg(deg), sin_deg(deg))
}
