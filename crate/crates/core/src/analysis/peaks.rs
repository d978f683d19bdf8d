use crate::spectra::RawSpectrum;

/// Minimum prominence as a fraction of the global maximum. Low enough that a
/// weak central third peak between the doublet still registers.
pub const DEFAULT_PROMINENCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Interpolated peak energy (µeV).
    pub energy: f64,
    pub height: f64,
    pub prominence: f64,
    /// Grid index of the sampled maximum.
    pub index: usize,
}

pub fn find_peaks(s: &RawSpectrum) -> Vec<Peak> {
    find_peaks_with_prominence(s, DEFAULT_PROMINENCE)
}

/// Local maxima whose topographic prominence is at least
/// `fraction · max(values)`, in ascending energy. Positions are refined by a
/// parabola through the three samples around each maximum.
pub fn find_peaks_with_prominence(s: &RawSpectrum, fraction: f64) -> Vec<Peak> {
    let y = s.values();
    let n = y.len();
    let global = s.max();
    if n < 3 || global.is_nan() || global <= 0.0 {
        return Vec::new();
    }
    let threshold = fraction * global;
    let grid = s.grid();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if y[i] > y[i - 1] && y[i] >= y[i + 1] {
            // Walk across a flat top.
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < n && y[j + 1] < y[i] {
                let top = (i + j) / 2;
                let prominence = prominence(y, i, j);
                if prominence >= threshold {
                    let (offset, height) = if i == j { refine(y[i - 1], y[i], y[i + 1]) } else { (0.0, y[i]) };
                    peaks.push(Peak {
                        energy: grid.point(top) + offset * grid.spacing(),
                        height,
                        prominence,
                        index: top,
                    });
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

fn prominence(y: &[f64], first: usize, last: usize) -> f64 {
    let h = y[first];
    let mut left_min = h;
    for k in (0..first).rev() {
        if y[k] > h {
            break;
        }
        left_min = left_min.min(y[k]);
    }
    let mut right_min = h;
    for &v in &y[last + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

fn refine(a: f64, b: f64, c: f64) -> (f64, f64) {
    let denom = a - 2.0 * b + c;
    if denom >= 0.0 {
        return (0.0, b);
    }
    let offset = 0.5 * (a - c) / denom;
    (offset, b - 0.25 * (a - c) * offset)
}

/// Ratio of the minimum between the two highest peaks to their mean height.
/// 0 is a full dip, values near 1 a barely resolved doublet. `None` with
/// fewer than two peaks.
pub fn central_dip_ratio(s: &RawSpectrum) -> Option<f64> {
    let mut peaks = find_peaks(s);
    if peaks.len() < 2 {
        return None;
    }
    peaks.sort_by(|a, b| b.height.total_cmp(&a.height));
    let (mut lo, mut hi) = (peaks[0].index, peaks[1].index);
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let valley = s.values()[lo..=hi].iter().copied().fold(f64::INFINITY, f64::min);
    Some(valley / (0.5 * (peaks[0].height + peaks[1].height)))
}
