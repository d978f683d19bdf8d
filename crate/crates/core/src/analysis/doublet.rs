use super::lm::{minimize, LmOptions};
use super::peaks::{find_peaks_with_prominence, Peak};
use super::AnalysisError;
use crate::spectra::{convolve_values, gaussian_kernel, FrequencyGrid, RawSpectrum};
use std::f64::consts::PI;

/// Lorentzian line `area · (w/2)/π / ((ω − center)² + (w/2)²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianPeak {
    pub center: f64,
    /// FWHM (µeV), always > 0.
    pub fwhm: f64,
    pub area: f64,
}

impl LorentzianPeak {
    pub fn eval(&self, omega: f64) -> f64 {
        let hw = 0.5 * self.fwhm;
        self.area * hw / PI / ((omega - self.center).powi(2) + hw * hw)
    }
}

/// One or two fitted lines sorted by ascending center.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubletFit {
    pub peaks: Vec<LorentzianPeak>,
    pub residual_norm: f64,
}

impl DoubletFit {
    pub fn is_doublet(&self) -> bool {
        self.peaks.len() == 2
    }

    pub fn peak_energies(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.center).collect()
    }

    pub fn linewidths(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.fwhm).collect()
    }

    pub fn areas(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.area).collect()
    }

    /// Center separation; `None` after the one-line fallback.
    pub fn splitting(&self) -> Option<f64> {
        self.is_doublet().then(|| self.peaks[1].center - self.peaks[0].center)
    }
}

/// `(A_high − A_low)/(A_high + A_low)` of the fitted areas, where "high" is
/// the line at larger energy. `None` for a single line.
pub fn asymmetry(fit: &DoubletFit) -> Option<f64> {
    if !fit.is_doublet() {
        return None;
    }
    let (lo, hi) = (fit.peaks[0].area, fit.peaks[1].area);
    let sum = hi + lo;
    (sum != 0.0).then(|| (hi - lo) / sum)
}

/// Sum of the lines sampled on `grid`, convolved with the discrete
/// instrument Gaussian.
pub fn doublet_model(
    peaks: &[LorentzianPeak],
    grid: &FrequencyGrid,
    instrument_fwhm: f64,
) -> Result<RawSpectrum, AnalysisError> {
    let kernel = gaussian_kernel(grid.spacing(), instrument_fwhm).map_err(|e| AnalysisError::InvalidInput(e.to_string()))?;
    let omegas = grid.points();
    let mut out = vec![0.0; omegas.len()];
    model_into(peaks, &omegas, &kernel, &mut out);
    RawSpectrum::new(*grid, out).map_err(|e| AnalysisError::InvalidInput(e.to_string()))
}

fn model_into(peaks: &[LorentzianPeak], omegas: &[f64], kernel: &[f64], out: &mut [f64]) {
    let raw: Vec<f64> = omegas.iter().map(|&w| peaks.iter().map(|p| p.eval(w)).sum()).collect();
    if kernel.len() == 1 {
        out.copy_from_slice(&raw);
    } else {
        out.copy_from_slice(&convolve_values(&raw, kernel));
    }
}

fn unpack(p: &[f64]) -> Vec<LorentzianPeak> {
    p.chunks(3)
        .map(|c| LorentzianPeak {
            center: c[0],
            fwhm: c[1].abs(),
            area: c[2],
        })
        .collect()
}

/// Width of the sampled line at half its height, walking outward from
/// `index`; falls back to a few grid steps when the half level is never
/// reached.
fn half_width_estimate(y: &[f64], index: usize, spacing: f64) -> f64 {
    let half = 0.5 * y[index];
    let left = (0..index).rev().find(|&k| y[k] <= half).map(|k| index - k);
    let right = (index + 1..y.len()).find(|&k| y[k] <= half).map(|k| k - index);
    let steps = match (left, right) {
        (Some(l), Some(r)) => 2 * l.min(r),
        (Some(s), None) | (None, Some(s)) => 2 * s,
        (None, None) => 8,
    };
    (steps.max(2) as f64) * spacing
}

struct Problem<'a> {
    omegas: Vec<f64>,
    data: &'a [f64],
    kernel: Vec<f64>,
    norm: f64,
}

impl Problem<'_> {
    fn fit(&self, start: &[LorentzianPeak], span: f64) -> Result<(Vec<LorentzianPeak>, f64), AnalysisError> {
        let p0: Vec<f64> = start.iter().flat_map(|p| [p.center, p.fwhm, p.area]).collect();
        let scales: Vec<f64> = start
            .iter()
            .flat_map(|p| [span.max(p.fwhm), p.fwhm, p.area.abs().max(1e-300)])
            .collect();
        let mut buf = vec![0.0; self.omegas.len()];
        let res = minimize(
            |p, out| {
                let peaks = unpack(p);
                model_into(&peaks, &self.omegas, &self.kernel, &mut buf);
                for ((o, m), d) in out.iter_mut().zip(&buf).zip(self.data) {
                    *o = (m - d) / self.norm;
                }
            },
            &p0,
            &scales,
            self.omegas.len(),
            LmOptions::default(),
        )?;
        let mut peaks = unpack(&res.params);
        if peaks.iter().any(|p| p.fwhm.is_nan() || p.fwhm <= 0.0 || !p.center.is_finite() || !p.area.is_finite()) {
            return Err(AnalysisError::FitDiverged("degenerate line parameters".into()));
        }
        peaks.sort_by(|a, b| a.center.total_cmp(&b.center));
        Ok((peaks, res.residual_norm * self.norm))
    }
}

/// Fits two Lorentzians convolved with a Gaussian of `instrument_fwhm`.
///
/// Falls back to a single line when the two-line fit fails, when the fitted
/// centers lie closer than half the mean FWHM, or when one area is below 1%
/// of the other.
pub fn fit_doublet(s: &RawSpectrum, instrument_fwhm: f64) -> Result<DoubletFit, AnalysisError> {
    let grid = *s.grid();
    let y = s.values();
    let kernel = gaussian_kernel(grid.spacing(), instrument_fwhm).map_err(|e| AnalysisError::InvalidInput(e.to_string()))?;
    let mut found = find_peaks_with_prominence(s, 0.02);
    if found.is_empty() {
        return Err(AnalysisError::NoPeak);
    }
    let problem = Problem {
        omegas: grid.points(),
        data: y,
        kernel,
        norm: s.max(),
    };
    let spacing = grid.spacing();
    let seed = |p: &Peak, width: f64| LorentzianPeak {
        center: p.energy,
        fwhm: width,
        area: p.height * PI * width / 2.0,
    };

    found.sort_by(|a, b| b.prominence.total_cmp(&a.prominence));
    let main = found[0];
    let main_width = half_width_estimate(y, main.index, spacing);
    let single_start = [seed(&main, main_width)];

    let pair_start: [LorentzianPeak; 2] = if found.len() >= 2 {
        let second = found[1];
        let sep = (second.energy - main.energy).abs();
        let w1 = half_width_estimate(y, main.index, spacing).min(sep);
        let w2 = half_width_estimate(y, second.index, spacing).min(sep);
        [seed(&main, w1), seed(&second, w2)]
    } else {
        // Unresolved: split the single maximum symmetrically.
        let w = main_width / 2.0;
        let off = main_width / 4.0;
        let half_height = Peak {
            height: main.height / 2.0,
            ..main
        };
        [
            seed(&Peak { energy: main.energy - off, ..half_height }, w),
            seed(&Peak { energy: main.energy + off, ..half_height }, w),
        ]
    };

    let span = grid.stop() - grid.start();
    if let Ok((peaks, residual_norm)) = problem.fit(&pair_start, span) {
        let sep = peaks[1].center - peaks[0].center;
        let mean_width = 0.5 * (peaks[0].fwhm + peaks[1].fwhm);
        let (a0, a1) = (peaks[0].area.abs(), peaks[1].area.abs());
        let inside = peaks.iter().all(|p| p.center >= grid.start() && p.center <= grid.stop());
        if inside && sep >= 0.5 * mean_width && a0.min(a1) >= 0.01 * a0.max(a1) {
            return Ok(DoubletFit { peaks, residual_norm });
        }
    }
    let (peaks, residual_norm) = problem.fit(&single_start, span)?;
    Ok(DoubletFit { peaks, residual_norm })
}
