//! Mode dispatch and CSV/SVG output.
//!
//! Spectrum files share the header `omega_ueV,s_c,s_a,s_i1,s_i2,total,total_convolved`
//! (channel columns unconvolved); sweep files prepend `sweep_value`. Numbers
//! use Rust's shortest round-trip formatting, so identical inputs give
//! identical bytes.

use crate::analysis::{self, central_dip_ratio, cui_raymer_splittings, find_peaks, fit_doublet, fit_polarization, DoubletFit};
use crate::config::{FitTarget, Mode, RunConfig};
use crate::detection::{assemble_detected, correlators_for, detected_spectrum, detuning_sweep, hwp_to_theta, DetectedSpectrum};
use crate::linalg::HilbertSpace;
use crate::model::{effective_g, QedParams};
use crate::spectra::{FrequencyGrid, RawSpectrum};
use crate::Error;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const SPECTRUM_HEADER: &str = "omega_ueV,s_c,s_a,s_i1,s_i2,total,total_convolved";

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub svg: bool,
}

/// Files written by a run, in creation order.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
}

pub fn run(cfg: &RunConfig, opts: RunOptions) -> Result<RunReport, Error> {
    cfg.validate()?;
    let space = HilbertSpace::new(cfg.n_max)?;
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| io_err(&cfg.out_dir, e))?;
    let mut out = Output {
        dir: &cfg.out_dir,
        svg: opts.svg,
        report: RunReport::default(),
    };
    match cfg.mode {
        Mode::Resonance => resonance(cfg, space, &mut out)?,
        Mode::HwpSweep => hwp_sweep(cfg, space, &mut out)?,
        Mode::DetuningSweep => detuning(cfg, space, &mut out)?,
        Mode::Complementarity => complementarity(cfg, space, &mut out)?,
        Mode::Fit => fit(cfg, &mut out)?,
    }
    Ok(out.report)
}

struct Output<'a> {
    dir: &'a Path,
    svg: bool,
    report: RunReport,
}

impl Output<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Result<(), Error> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| io_err(&path, e))?;
        self.report.files.push(path);
        Ok(())
    }

    fn plot(&mut self, name: &str, series: &[Series<'_>]) -> Result<(), Error> {
        if self.svg {
            self.write(name, &svg_plot(series))?;
        }
        Ok(())
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        context: path.display().to_string(),
        source,
    }
}

fn spectrum_rows(s: &DetectedSpectrum, prefix: Option<f64>, csv: &mut String) {
    let r = &s.raw;
    for k in 0..r.grid.len() {
        if let Some(p) = prefix {
            let _ = write!(csv, "{p},");
        }
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.grid.point(k),
            r.s_c[k],
            r.s_a[k],
            r.s_i1[k],
            r.s_i2[k],
            r.total[k],
            s.convolved.total[k]
        );
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), |x| x.to_string())
}

const FIT_COLUMNS: &str = "fitted_splitting_ueV,peak_low_ueV,peak_high_ueV,fwhm_low_ueV,fwhm_high_ueV,area_low,area_high,asymmetry";

fn fit_columns(fit: &DoubletFit) -> String {
    let get = |i: usize, f: fn(&analysis::LorentzianPeak) -> f64| fit.peaks.get(i).map(f);
    let (lo, hi) = if fit.is_doublet() { (0, 1) } else { (0, usize::MAX) };
    [
        opt(fit.splitting()),
        opt(get(lo, |p| p.center)),
        opt(get(hi, |p| p.center)),
        opt(get(lo, |p| p.fwhm)),
        opt(get(hi, |p| p.fwhm)),
        opt(get(lo, |p| p.area)),
        opt(get(hi, |p| p.area)),
        opt(analysis::asymmetry(fit)),
    ]
    .join(",")
}

/// Separation of the two highest raw peaks of the total spectrum.
fn raw_separation(s: &RawSpectrum) -> Option<f64> {
    let mut p = find_peaks(s);
    if p.len() < 2 {
        return None;
    }
    p.sort_by(|a, b| b.height.total_cmp(&a.height));
    Some((p[0].energy - p[1].energy).abs())
}

fn resonance(cfg: &RunConfig, space: HilbertSpace, out: &mut Output<'_>) -> Result<(), Error> {
    let grid = cfg.grid_for(&cfg.qed);
    let s = detected_spectrum(&cfg.qed, &cfg.det, space, &grid)?;
    let mut csv = format!("{SPECTRUM_HEADER}\n");
    spectrum_rows(&s, None, &mut csv);
    out.write("spectrum.csv", &csv)?;

    let fit = fit_doublet(&s.convolved.total_spectrum(), cfg.det.instrument_fwhm)?;
    let g = effective_g(&cfg.qed);
    let cr = cui_raymer_splittings(g, cfg.qed.kappa, cfg.qed.gamma).ok();
    let summary = format!(
        "theta_proj_deg,{FIT_COLUMNS},raw_peak_separation_ueV,effective_g_ueV,cui_raymer_cavity_ueV,cui_raymer_emitter_ueV\n{},{},{},{},{},{}\n",
        cfg.det.theta_proj,
        fit_columns(&fit),
        opt(raw_separation(&s.raw.total_spectrum())),
        g,
        opt(cr.map(|c| c.cavity)),
        opt(cr.map(|c| c.emitter)),
    );
    out.write("summary.csv", &summary)?;
    let w = grid.points();
    out.plot(
        "spectrum.svg",
        &[Series::new("total", &w, &s.raw.total), Series::new("convolved", &w, &s.convolved.total)],
    )
}

fn hwp_sweep(cfg: &RunConfig, space: HilbertSpace, out: &mut Output<'_>) -> Result<(), Error> {
    let grid = cfg.grid_for(&cfg.qed);
    // Correlators do not depend on the projection angle.
    let corr = correlators_for(&cfg.qed, &cfg.det, space, &grid)?;
    let mut csv = format!("sweep_value,{SPECTRUM_HEADER}\n");
    let mut summary = format!("alpha_deg,theta_proj_deg,{FIT_COLUMNS},peak_total\n");
    let mut spectra = Vec::with_capacity(cfg.sweep.len());
    for &alpha in &cfg.sweep {
        let theta = hwp_to_theta(alpha);
        let det = cfg.det.with_theta(theta);
        let s = assemble_detected(&cfg.qed, &det, &corr)?;
        spectrum_rows(&s, Some(alpha), &mut csv);
        let total = s.convolved.total_spectrum();
        let fit = fit_doublet(&total, det.instrument_fwhm)?;
        let _ = writeln!(summary, "{alpha},{theta},{},{}", fit_columns(&fit), total.max());
        spectra.push(s);
    }
    out.write("hwp_sweep.csv", &csv)?;
    out.write("hwp_summary.csv", &summary)?;
    plot_sweep(out, "hwp_sweep.svg", &grid, &cfg.sweep, &spectra)
}

fn detuning(cfg: &RunConfig, space: HilbertSpace, out: &mut Output<'_>) -> Result<(), Error> {
    let spectra = detuning_sweep(&cfg.qed, &cfg.det, &cfg.sweep, space, cfg.grid.as_ref(), cfg.grid_points)?;
    let mut csv = format!("sweep_value,{SPECTRUM_HEADER}\n");
    let mut summary = format!("detuning_ueV,omega_c_ueV,{FIT_COLUMNS},raw_peak_separation_ueV\n");
    for (&delta, s) in cfg.sweep.iter().zip(&spectra) {
        spectrum_rows(s, Some(delta), &mut csv);
        let fit = fit_doublet(&s.convolved.total_spectrum(), cfg.det.instrument_fwhm)?;
        let _ = writeln!(
            summary,
            "{delta},{},{},{}",
            cfg.qed.omega_a - delta,
            fit_columns(&fit),
            opt(raw_separation(&s.raw.total_spectrum()))
        );
    }
    out.write("detuning_sweep.csv", &csv)?;
    out.write("detuning_summary.csv", &summary)?;
    if out.svg {
        // Per-entry grids may differ; plot each on its own abscissa.
        let ws: Vec<Vec<f64>> = spectra.iter().map(|s| s.raw.grid.points()).collect();
        let labels: Vec<String> = cfg.sweep.iter().map(|d| format!("δ={d}")).collect();
        let series: Vec<Series<'_>> = spectra
            .iter()
            .zip(&ws)
            .zip(&labels)
            .map(|((s, w), l)| Series::new(l, w, &s.convolved.total))
            .collect();
        out.plot("detuning_sweep.svg", &series)?;
    }
    Ok(())
}

/// Emitter-channel spectrum `Re F[⟨σ†(0)σ(τ)⟩]`, averaged over the signs the
/// detection settings request. Its shape does not depend on Θ.
fn emitter_channel(qed: &QedParams, cfg: &RunConfig, space: HilbertSpace, grid: &FrequencyGrid) -> Result<RawSpectrum, Error> {
    let corr = correlators_for(qed, &cfg.det, space, grid)?;
    let n = corr.len() as f64;
    let v = (0..grid.len()).map(|k| corr.iter().map(|c| c.f_ss[k].re).sum::<f64>() / n).collect();
    Ok(RawSpectrum::new(*grid, v)?)
}

fn complementarity(cfg: &RunConfig, space: HilbertSpace, out: &mut Output<'_>) -> Result<(), Error> {
    let emitter_driven = QedParams {
        p_a: cfg.drive_rate,
        p_c: 0.0,
        ..cfg.qed
    };
    let cavity_driven = QedParams {
        p_a: 0.0,
        p_c: cfg.drive_rate,
        ..cfg.qed
    };
    let grid = cfg.grid_for(&cfg.qed);
    let mut summary = String::from("drive,emitter_channel_peak_separation_ueV,emitter_channel_central_dip_ratio\n");
    let mut plots = Vec::new();
    for (label, qed, file) in [
        ("emitter", &emitter_driven, "emitter_driven.csv"),
        ("cavity", &cavity_driven, "cavity_driven.csv"),
    ] {
        let s = detected_spectrum(qed, &cfg.det, space, &grid)?;
        let mut csv = format!("{SPECTRUM_HEADER}\n");
        spectrum_rows(&s, None, &mut csv);
        out.write(file, &csv)?;
        let e = emitter_channel(qed, cfg, space, &grid)?;
        let _ = writeln!(summary, "{label},{},{}", opt(raw_separation(&e)), opt(central_dip_ratio(&e)));
        plots.push((label, normalized(e.values())));
    }
    out.write("complementarity_summary.csv", &summary)?;
    let w = grid.points();
    let series: Vec<Series<'_>> = plots.iter().map(|(l, v)| Series::new(l, &w, v)).collect();
    out.plot("complementarity.svg", &series)
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let m = v.iter().copied().fold(0.0, f64::max);
    if m > 0.0 {
        v.iter().map(|x| x / m).collect()
    } else {
        v.to_vec()
    }
}

/// Reads two numeric columns, skipping a non-numeric first line.
fn read_pairs(path: &Path) -> Result<Vec<(f64, f64)>, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = (cols.len() >= 2)
            .then(|| Some((cols[0].parse::<f64>().ok()?, cols[1].parse::<f64>().ok()?)))
            .flatten();
        match parsed {
            Some(p) => rows.push(p),
            None if i == 0 => {}
            None => {
                return Err(analysis::AnalysisError::InvalidInput(format!("{}: line {}: expected two numbers", path.display(), i + 1)).into())
            }
        }
    }
    Ok(rows)
}

fn fit(cfg: &RunConfig, out: &mut Output<'_>) -> Result<(), Error> {
    let path = cfg.input.as_ref().expect("validated");
    let rows = read_pairs(path)?;
    let mut csv = String::from("parameter,value\n");
    match cfg.fit_target {
        FitTarget::Doublet => {
            if rows.len() < 3 {
                return Err(analysis::AnalysisError::InvalidInput("need ≥ 3 spectrum samples".into()).into());
            }
            let grid = FrequencyGrid::new(rows[0].0, rows[rows.len() - 1].0, rows.len())?;
            let tol = 1e-6 * grid.spacing();
            if rows.iter().enumerate().any(|(k, r)| (r.0 - grid.point(k)).abs() > tol) {
                return Err(analysis::AnalysisError::InvalidInput("spectrum energies must be uniformly spaced and ascending".into()).into());
            }
            let s = RawSpectrum::new(grid, rows.iter().map(|r| r.1).collect())?;
            let f = fit_doublet(&s, cfg.det.instrument_fwhm)?;
            for (name, value) in FIT_COLUMNS.split(',').zip(fit_columns(&f).split(',')) {
                let _ = writeln!(csv, "{name},{value}");
            }
            let _ = writeln!(csv, "residual_norm,{}", f.residual_norm);
        }
        FitTarget::Polarization => {
            let f = fit_polarization(&rows)?;
            let _ = writeln!(
                csv,
                "theta_a_deg,{}\nphi_qd_deg,{}\namplitude,{}\nresidual_norm,{}\nphi_identifiable,{}",
                f.theta_a, f.phi_qd, f.amplitude, f.residual_norm, f.phi_identifiable
            );
        }
    }
    out.write("fit.csv", &csv)
}

fn plot_sweep(out: &mut Output<'_>, name: &str, grid: &FrequencyGrid, values: &[f64], spectra: &[DetectedSpectrum]) -> Result<(), Error> {
    if !out.svg {
        return Ok(());
    }
    let w = grid.points();
    let labels: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    let series: Vec<Series<'_>> = spectra
        .iter()
        .zip(&labels)
        .map(|(s, l)| Series::new(l, &w, &s.convolved.total))
        .collect();
    out.plot(name, &series)
}

pub struct Series<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

impl<'a> Series<'a> {
    pub fn new(label: &'a str, x: &'a [f64], y: &'a [f64]) -> Self {
        Self { label, x, y }
    }
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Line plot with axes, tick labels at the extremes and a legend.
pub fn svg_plot(series: &[Series<'_>]) -> String {
    let (w, h, m) = (640.0, 400.0, 50.0);
    let finite = |v: &&f64| v.is_finite();
    let xs = series.iter().flat_map(|s| s.x.iter()).filter(finite);
    let ys = series.iter().flat_map(|s| s.y.iter()).filter(finite);
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (y0, y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (x0, x1) = if x0 < x1 { (x0, x1) } else { (0.0, 1.0) };
    let (y0, y1) = if y0 < y1 { (y0, y1) } else { (y0.min(0.0), y0.max(0.0) + 1.0) };
    let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut s = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n");
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<path d=\"M{m} {m} V{} H{}\" fill=\"none\" stroke=\"black\"/>",
        h - m,
        w - m
    );
    let _ = writeln!(s, "<text x=\"{m}\" y=\"{}\" font-size=\"11\">{x0:.1}</text>", h - m + 15.0);
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{x1:.1}</text>", w - m, h - m + 15.0);
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">energy (µeV)</text>", w / 2.0, h - 12.0);
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{y1:.3e}</text>", m - 4.0, m + 4.0);
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{y0:.3e}</text>", m - 4.0, h - m);
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = ser
            .x
            .iter()
            .zip(ser.y)
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(s, "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\" points=\"{}\"/>", pts.join(" "));
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{color}\">{}</text>",
            w - m - 100.0,
            m + 14.0 * (i as f64 + 1.0),
            escape(ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
