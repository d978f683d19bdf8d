//! INI-style run configuration.
//!
//! ```text
//! [physics]   omega_a omega_c g | g_tilde theta_a phi_qd phi_sign beta
//!             gamma kappa gamma_ph p_a p_c n_max
//! [detection] theta_proj amp_a amp_b overlap_p theta_c instrument_fwhm
//!             sign_average
//! [grid]      start stop n_points
//! [run]       mode sweep out_dir input fit_target drive_rate
//! ```
//!
//! Lines are `key = value`; `#` and `;` start comments. Every key is
//! optional and defaults to the measured parameter set. `g` sets the
//! effective coupling and is converted to `g_tilde` once all physics keys are
//! known; serialization always writes `g_tilde`.

use crate::detection::DetectionParams;
use crate::model::{ModelError, PhiSign, QedParams};
use crate::spectra::FrequencyGrid;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("`{key}`: {message}")]
    Validation { key: String, message: String },
}

impl ConfigError {
    fn validation(key: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Validation {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl From<ModelError> for ConfigError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::InvalidParameter { name, reason } => ConfigError::validation(name, reason),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Resonance,
    DetuningSweep,
    HwpSweep,
    Complementarity,
    Fit,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Resonance => "resonance",
            Mode::DetuningSweep => "detuning-sweep",
            Mode::HwpSweep => "hwp-sweep",
            Mode::Complementarity => "complementarity",
            Mode::Fit => "fit",
        }
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "resonance" => Mode::Resonance,
            "detuning-sweep" => Mode::DetuningSweep,
            "hwp-sweep" => Mode::HwpSweep,
            "complementarity" => Mode::Complementarity,
            "fit" => Mode::Fit,
            _ => {
                return Err(format!(
                    "unknown mode `{s}` (expected resonance, detuning-sweep, hwp-sweep, complementarity or fit)"
                ))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitTarget {
    /// Two-column `omega_ueV,counts` spectrum on a uniform grid.
    Doublet,
    /// Two-column `alpha_deg,counts` polarization curve.
    Polarization,
}

impl FitTarget {
    pub fn as_str(self) -> &'static str {
        match self {
            FitTarget::Doublet => "doublet",
            FitTarget::Polarization => "polarization",
        }
    }
}

impl FromStr for FitTarget {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "doublet" => Ok(FitTarget::Doublet),
            "polarization" => Ok(FitTarget::Polarization),
            _ => Err(format!("unknown fit target `{s}` (expected doublet or polarization)")),
        }
    }
}

pub const DEFAULT_N_MAX: usize = 4;
pub const DEFAULT_GRID_POINTS: usize = 2001;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub qed: QedParams,
    pub det: DetectionParams,
    /// Photon-number cutoff.
    pub n_max: usize,
    /// Explicit grid; `None` centers ±250 µeV on each spectrum's mean
    /// transition energy.
    pub grid: Option<FrequencyGrid>,
    pub grid_points: usize,
    pub mode: Mode,
    /// Detunings ω_a − ω_c (µeV) or HWP angles (degrees), by mode.
    pub sweep: Vec<f64>,
    pub out_dir: PathBuf,
    /// Data file for `fit` mode.
    pub input: Option<PathBuf>,
    pub fit_target: FitTarget,
    /// Pump rate applied to the driven mode in `complementarity` (µeV).
    pub drive_rate: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let qed = QedParams::measured();
        Self {
            qed,
            det: DetectionParams::measured(),
            n_max: DEFAULT_N_MAX,
            grid: None,
            grid_points: DEFAULT_GRID_POINTS,
            mode: Mode::Resonance,
            sweep: Vec::new(),
            out_dir: PathBuf::from("out"),
            input: None,
            fit_target: FitTarget::Doublet,
            drive_rate: qed.p_a,
        }
    }
}

impl RunConfig {
    /// Grid for a spectrum of `qed`.
    pub fn grid_for(&self, qed: &QedParams) -> FrequencyGrid {
        self.grid.unwrap_or_else(|| FrequencyGrid::default_with_points(qed, self.grid_points))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.qed.validate()?;
        self.det.validate()?;
        if self.n_max < 1 {
            return Err(ConfigError::validation("n_max", "must be ≥ 1"));
        }
        if self.grid_points < 3 {
            return Err(ConfigError::validation("n_points", "must be ≥ 3"));
        }
        if !(self.drive_rate.is_finite() && self.drive_rate >= 0.0) {
            return Err(ConfigError::validation("drive_rate", "must be finite and non-negative"));
        }
        if let Some(v) = self.sweep.iter().find(|v| !v.is_finite()) {
            return Err(ConfigError::validation("sweep", format!("non-finite entry {v}")));
        }
        match self.mode {
            Mode::DetuningSweep | Mode::HwpSweep if self.sweep.is_empty() => {
                Err(ConfigError::validation("sweep", format!("required for mode {}", self.mode.as_str())))
            }
            Mode::Fit if self.input.is_none() => Err(ConfigError::validation("input", "required for mode fit")),
            _ => Ok(()),
        }
    }

    /// Canonical text form; `parse_config(&c.serialize()) == Ok(c)`.
    pub fn serialize(&self) -> String {
        let q = &self.qed;
        let d = &self.det;
        let mut s = String::new();
        let _ = writeln!(s, "[physics]");
        for (k, v) in [
            ("omega_a", q.omega_a),
            ("omega_c", q.omega_c),
            ("g_tilde", q.g_tilde),
            ("theta_a", q.theta_a),
            ("phi_qd", q.phi_qd),
            ("phi_sign", q.phi_sign.value()),
            ("beta", q.beta),
            ("gamma", q.gamma),
            ("kappa", q.kappa),
            ("gamma_ph", q.gamma_ph),
            ("p_a", q.p_a),
            ("p_c", q.p_c),
        ] {
            let _ = writeln!(s, "{k} = {v}");
        }
        let _ = writeln!(s, "n_max = {}", self.n_max);
        let _ = writeln!(s, "\n[detection]");
        for (k, v) in [
            ("theta_proj", d.theta_proj),
            ("amp_a", d.amp_a),
            ("amp_b", d.amp_b),
            ("overlap_p", d.overlap_p),
            ("theta_c", d.theta_c),
            ("instrument_fwhm", d.instrument_fwhm),
        ] {
            let _ = writeln!(s, "{k} = {v}");
        }
        let _ = writeln!(s, "sign_average = {}", d.sign_average);
        let _ = writeln!(s, "\n[grid]");
        match &self.grid {
            Some(g) => {
                let _ = writeln!(s, "start = {}\nstop = {}\nn_points = {}", g.start(), g.stop(), g.len());
            }
            None => {
                let _ = writeln!(s, "n_points = {}", self.grid_points);
            }
        }
        let _ = writeln!(s, "\n[run]");
        let _ = writeln!(s, "mode = {}", self.mode.as_str());
        if !self.sweep.is_empty() {
            let list: Vec<String> = self.sweep.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "sweep = {}", list.join(", "));
        }
        let _ = writeln!(s, "out_dir = {}", self.out_dir.display());
        if let Some(p) = &self.input {
            let _ = writeln!(s, "input = {}", p.display());
        }
        let _ = writeln!(s, "fit_target = {}", self.fit_target.as_str());
        let _ = writeln!(s, "drive_rate = {}", self.drive_rate);
        s
    }
}

#[derive(Default)]
struct GridKeys {
    start: Option<f64>,
    stop: Option<f64>,
    n_points: Option<usize>,
}

struct Entry<'a> {
    key: &'a str,
    value: &'a str,
    line: usize,
    column: usize,
}

impl Entry<'_> {
    fn parse_err(&self, message: String) -> ConfigError {
        ConfigError::Parse {
            line: self.line,
            column: self.column,
            message: format!("`{}`: {message}", self.key),
        }
    }

    fn f64(&self) -> Result<f64, ConfigError> {
        self.value
            .parse::<f64>()
            .map_err(|_| self.parse_err(format!("expected a number, got `{}`", self.value)))
    }

    fn usize(&self) -> Result<usize, ConfigError> {
        self.value
            .parse::<usize>()
            .map_err(|_| self.parse_err(format!("expected a non-negative integer, got `{}`", self.value)))
    }

    fn bool(&self) -> Result<bool, ConfigError> {
        match self.value {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            v => Err(self.parse_err(format!("expected true or false, got `{v}`"))),
        }
    }
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut g_override: Option<f64> = None;
    let mut g_tilde_set = false;
    let mut drive_set = false;
    let mut grid = GridKeys::default();
    let mut section: Option<&str> = None;
    let mut seen: Vec<(String, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split(['#', ';']).next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(ConfigError::Parse {
                    line,
                    column: indent + trimmed.len() + 1,
                    message: "expected `]` to close section header".into(),
                });
            };
            let name = name.trim();
            if !matches!(name, "physics" | "detection" | "grid" | "run") {
                return Err(ConfigError::validation(name, "unknown section"));
            }
            section = Some(match name {
                "physics" => "physics",
                "detection" => "detection",
                "grid" => "grid",
                _ => "run",
            });
            continue;
        }
        let Some(eq) = content.find('=') else {
            return Err(ConfigError::Parse {
                line,
                column: indent + 1,
                message: "expected `key = value`".into(),
            });
        };
        let key = content[..eq].trim();
        let value = content[eq + 1..].trim();
        if key.is_empty() {
            return Err(ConfigError::Parse {
                line,
                column: indent + 1,
                message: "missing key before `=`".into(),
            });
        }
        let value_col = eq + 2 + (content[eq + 1..].len() - content[eq + 1..].trim_start().len());
        let Some(sec) = section else {
            return Err(ConfigError::Parse {
                line,
                column: indent + 1,
                message: format!("key `{key}` appears before any section header"),
            });
        };
        if seen.iter().any(|(s, k)| s == sec && k == key) {
            return Err(ConfigError::validation(key, format!("duplicate key in [{sec}]")));
        }
        seen.push((sec.to_string(), key.to_string()));
        let e = Entry {
            key,
            value,
            line,
            column: value_col,
        };
        let q = &mut cfg.qed;
        let d = &mut cfg.det;
        match (sec, key) {
            ("physics", "omega_a") => q.omega_a = e.f64()?,
            ("physics", "omega_c") => q.omega_c = e.f64()?,
            ("physics", "g") => g_override = Some(e.f64()?),
            ("physics", "g_tilde") => {
                q.g_tilde = e.f64()?;
                g_tilde_set = true;
            }
            ("physics", "theta_a") => q.theta_a = e.f64()?,
            ("physics", "phi_qd") => q.phi_qd = e.f64()?,
            ("physics", "phi_sign") => {
                let v = e.f64()?;
                q.phi_sign = PhiSign::from_value(v).ok_or_else(|| ConfigError::validation(key, format!("must be 1 or -1, got {v}")))?;
            }
            ("physics", "beta") => q.beta = e.f64()?,
            ("physics", "gamma") => q.gamma = e.f64()?,
            ("physics", "kappa") => q.kappa = e.f64()?,
            ("physics", "gamma_ph") => q.gamma_ph = e.f64()?,
            ("physics", "p_a") => q.p_a = e.f64()?,
            ("physics", "p_c") => q.p_c = e.f64()?,
            ("physics", "n_max") => cfg.n_max = e.usize()?,
            ("detection", "theta_proj") => d.theta_proj = e.f64()?,
            ("detection", "amp_a") => d.amp_a = e.f64()?,
            ("detection", "amp_b") => d.amp_b = e.f64()?,
            ("detection", "overlap_p") => d.overlap_p = e.f64()?,
            ("detection", "theta_c") => d.theta_c = e.f64()?,
            ("detection", "instrument_fwhm") => d.instrument_fwhm = e.f64()?,
            ("detection", "sign_average") => d.sign_average = e.bool()?,
            ("grid", "start") => grid.start = Some(e.f64()?),
            ("grid", "stop") => grid.stop = Some(e.f64()?),
            ("grid", "n_points") => grid.n_points = Some(e.usize()?),
            ("run", "mode") => cfg.mode = value.parse().map_err(|m| ConfigError::validation(key, m))?,
            ("run", "sweep") => {
                cfg.sweep = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<f64>()
                            .map_err(|_| e.parse_err(format!("expected a comma-separated list of numbers, got `{s}`")))
                    })
                    .collect::<Result<_, _>>()?;
            }
            ("run", "out_dir") => cfg.out_dir = PathBuf::from(value),
            ("run", "input") => cfg.input = Some(PathBuf::from(value)),
            ("run", "fit_target") => cfg.fit_target = value.parse().map_err(|m| ConfigError::validation(key, m))?,
            ("run", "drive_rate") => {
                cfg.drive_rate = e.f64()?;
                drive_set = true;
            }
            _ => return Err(ConfigError::validation(key, format!("unknown key in [{sec}]"))),
        }
    }

    if let Some(g) = g_override {
        if g_tilde_set {
            return Err(ConfigError::validation("g", "`g` and `g_tilde` are mutually exclusive"));
        }
        cfg.qed = cfg.qed.with_effective_g(g)?;
    } else if !g_tilde_set {
        // Geometry keys change the factor relating g̃ to |g|; keep |g| fixed.
        cfg.qed = cfg.qed.with_effective_g(QedParams::MEASURED_G)?;
    }
    if !drive_set {
        cfg.drive_rate = cfg.qed.p_a;
    }
    if let Some(n) = grid.n_points {
        cfg.grid_points = n;
    }
    match (grid.start, grid.stop) {
        (Some(a), Some(b)) => {
            cfg.grid = Some(FrequencyGrid::new(a, b, cfg.grid_points).map_err(|e| ConfigError::validation("grid", e.to_string()))?);
        }
        (None, None) => {}
        (Some(_), None) => return Err(ConfigError::validation("stop", "required when `start` is given")),
        (None, Some(_)) => return Err(ConfigError::validation("start", "required when `stop` is given")),
    }
    cfg.validate()?;
    Ok(cfg)
}
