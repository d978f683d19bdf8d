//! Stationary two-time correlation spectra and instrument broadening.
//!
//! For operators `A`, `B` and steady state `ρ`, the regression prescription
//! gives `⟨A(0) B(τ)⟩ = tr(B e^{𝓛τ}[ρ A])`. Spectra use the one-sided
//! transform
//!
//! ```text
//! F(ω) = (1/π) ∫₀^∞ dτ e^{iωτ} ⟨A(0) B(τ)⟩
//!      = −(1/π) tr(B · unvec[(iω + 𝓛)⁻¹ vec(ρA)])
//! ```
//!
//! so that for `A = B†` the physical spectrum is `Re F`, a unit-area
//! Lorentzian when ⟨B†B⟩ = 1. The integration bounds of the transform are a
//! convention; the two-sided `1/2π` form differs only by the overall
//! constant absorbed into detection amplitudes.
//!
//! The steady-state component `ρ·tr(ρA)` of the source is removed, so `F`
//! is the transform of the connected correlator `⟨A(0)B(τ)⟩ − ⟨A⟩⟨B⟩`. The
//! generator's zero mode is shifted to eigenvalue 1 by adding
//! `vec(ρ) ⊗ tr(·)`; on the projected source this leaves the resolvent
//! unchanged and keeps `iω + 𝓛` invertible at ω = 0.
//!
//! Two independent evaluation routes are provided: the frequency-domain
//! resolvent (production) and a time-domain route that propagates
//! `e^{𝓛τ}` and integrates the Fourier integral numerically.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{expm, vec_norm, ComplexMatrix, LuDecomposition, ZERO};
use crate::model::{Liouvillian, QedParams};
use crate::steady::DensityMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
    #[error("resolvent (iω + 𝓛) is singular at ω = {omega} µeV")]
    ResolventSingular { omega: f64 },
    #[error("grid spacing {spacing} µeV is coarser than FWHM/6 = {limit} µeV")]
    GridTooCoarse { spacing: f64, limit: f64 },
    #[error("correlation did not decay within {steps} steps")]
    NotDecaying { steps: usize },
    #[error("operator dimension {got} does not match Hilbert dimension {want}")]
    OperatorShape { got: usize, want: usize },
    #[error("spectrum values must be finite and match the grid length")]
    InvalidValues,
}

/// Uniform frequency grid (µeV, rotating frame).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    start: f64,
    stop: f64,
    n_points: usize,
}

impl FrequencyGrid {
    pub const DEFAULT_HALF_WIDTH: f64 = 250.0;
    pub const DEFAULT_POINTS: usize = 2001;

    pub fn new(start: f64, stop: f64, n_points: usize) -> Result<Self, SpectrumError> {
        if !start.is_finite() || !stop.is_finite() {
            return Err(SpectrumError::InvalidGrid("bounds must be finite".into()));
        }
        if n_points < 2 {
            return Err(SpectrumError::InvalidGrid(format!("need at least 2 points, got {n_points}")));
        }
        if stop <= start {
            return Err(SpectrumError::InvalidGrid(format!("stop {stop} must exceed start {start}")));
        }
        Ok(Self { start, stop, n_points })
    }

    pub fn centered(center: f64, half_width: f64, n_points: usize) -> Result<Self, SpectrumError> {
        Self::new(center - half_width, center + half_width, n_points)
    }

    /// ±250 µeV around the mean of the emitter and cavity energies, 2001 points.
    pub fn default_for(params: &QedParams) -> Self {
        Self::default_with_points(params, Self::DEFAULT_POINTS)
    }

    pub fn default_with_points(params: &QedParams, n_points: usize) -> Self {
        let center = 0.5 * (params.omega_a + params.omega_c);
        Self::centered(center, Self::DEFAULT_HALF_WIDTH, n_points.max(2)).expect("valid default grid")
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn stop(&self) -> f64 {
        self.stop
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.stop - self.start) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.stop
        } else {
            self.start + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }
}

/// Real spectrum sampled on a grid. Interference components may be negative.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSpectrum {
    grid: FrequencyGrid,
    values: Vec<f64>,
}

impl RawSpectrum {
    pub fn new(grid: FrequencyGrid, values: Vec<f64>) -> Result<Self, SpectrumError> {
        if values.len() != grid.len() || values.iter().any(|v| !v.is_finite()) {
            return Err(SpectrumError::InvalidValues);
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Riemann-sum integral over the grid.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.spacing()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn check_operator(op: &ComplexMatrix, dim: usize) -> Result<(), SpectrumError> {
    if op.rows() != dim || op.cols() != dim {
        return Err(SpectrumError::OperatorShape { got: op.rows(), want: dim });
    }
    Ok(())
}

/// Row vector `b` with `b · vec(X) = tr(B X)` for row-major `vec`.
fn trace_functional(b: &ComplexMatrix) -> Vec<C64> {
    let d = b.rows();
    let mut f = vec![ZERO; d * d];
    for i in 0..d {
        for j in 0..d {
            // tr(BX) = Σ_ij B_ij X_ji and X_ji sits at j·d + i.
            f[j * d + i] = b[(i, j)];
        }
    }
    f
}

/// `vec(ρA) − vec(ρ)·tr(ρA)`.
fn connected_source(rho: &DensityMatrix, a: &ComplexMatrix) -> Vec<C64> {
    let mut x = rho.matrix().matmul(a).vectorize();
    let d = a.rows();
    let mean: C64 = (0..d).map(|i| x[i * d + i]).sum();
    for (xi, r) in x.iter_mut().zip(rho.matrix().as_slice()) {
        *xi -= r * mean;
    }
    x
}

/// `𝓛 + vec(ρ)·t`, with `t·vec(X) = tr X`: the zero mode moves to 1.
fn deflated_generator(liouvillian: &Liouvillian, rho: &DensityMatrix) -> ComplexMatrix {
    let d = liouvillian.space().dim();
    let mut m = liouvillian.generator().clone();
    for (r, &rv) in rho.matrix().as_slice().iter().enumerate() {
        for i in 0..d {
            m[(r, i * d + i)] += rv;
        }
    }
    m
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// All pairwise one-sided spectra `F_{ij}(ω)` for `⟨lefts[i](0) rights[j](τ)⟩`,
/// indexed `[i][j][ω]`. One factorization per frequency is shared by all
/// pairs. Frequencies are evaluated independently (in parallel) and
/// assembled in grid order.
pub fn correlation_spectra(
    liouvillian: &Liouvillian,
    rho: &DensityMatrix,
    lefts: &[&ComplexMatrix],
    rights: &[&ComplexMatrix],
    grid: &FrequencyGrid,
) -> Result<Vec<Vec<Vec<C64>>>, SpectrumError> {
    let d = liouvillian.space().dim();
    for op in lefts.iter().chain(rights) {
        check_operator(op, d)?;
    }
    let gen = deflated_generator(liouvillian, rho);
    let n = gen.rows();
    let sources: Vec<Vec<C64>> = lefts.iter().map(|a| connected_source(rho, a)).collect();
    let functionals: Vec<Vec<C64>> = rights.iter().map(|b| trace_functional(b)).collect();

    let per_point: Vec<Vec<Vec<C64>>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let omega = grid.point(k);
            let mut m = gen.clone();
            for i in 0..n {
                m[(i, i)] += C64::new(0.0, omega);
            }
            let lu = LuDecomposition::factor(&m).map_err(|_| SpectrumError::ResolventSingular { omega })?;
            Ok(sources
                .iter()
                .map(|src| {
                    let x = lu.solve(src);
                    functionals.iter().map(|f| -dot(f, &x) / PI).collect()
                })
                .collect())
        })
        .collect::<Result<_, SpectrumError>>()?;

    let mut out = vec![vec![Vec::with_capacity(grid.len()); rights.len()]; lefts.len()];
    for point in per_point {
        for (i, row) in point.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                out[i][j].push(v);
            }
        }
    }
    Ok(out)
}

/// One-sided spectrum of `⟨left(0) right(τ)⟩` by the resolvent route.
pub fn correlation_spectrum(
    liouvillian: &Liouvillian,
    rho: &DensityMatrix,
    left: &ComplexMatrix,
    right: &ComplexMatrix,
    grid: &FrequencyGrid,
) -> Result<Vec<C64>, SpectrumError> {
    let mut all = correlation_spectra(liouvillian, rho, &[left], &[right], grid)?;
    Ok(all.swap_remove(0).swap_remove(0))
}

/// Knobs of the time-domain route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeDomainOptions {
    /// Number of time derivatives matched at each end of a step; the
    /// interpolant has degree `2·derivatives + 1`.
    pub derivatives: usize,
    /// Step size as a multiple of `1/‖𝓛‖∞`.
    pub step_factor: f64,
    /// Stop once `‖e^{𝓛τ}vec(ρA)‖ ≤ decay_tolerance · ‖vec(ρA)‖`.
    pub decay_tolerance: f64,
    pub max_steps: usize,
}

impl Default for TimeDomainOptions {
    fn default() -> Self {
        Self {
            derivatives: 5,
            step_factor: 2.5,
            decay_tolerance: 1e-13,
            max_steps: 1_000_000,
        }
    }
}

/// One-sided spectrum of `⟨left(0) right(τ)⟩` by explicit time propagation.
///
/// The state `vec(ρA)` is advanced with the exact one-step propagator
/// `e^{𝓛h}` (scaling and squaring), the correlation and its first
/// `derivatives` time derivatives are recorded at every step, and the
/// Fourier integral is evaluated interval by interval against the two-point
/// Hermite interpolant with the oscillatory factor integrated exactly
/// (Filon quadrature). The horizon is set by the decay of the propagated
/// state.
pub fn correlation_spectrum_time_domain(
    liouvillian: &Liouvillian,
    rho: &DensityMatrix,
    left: &ComplexMatrix,
    right: &ComplexMatrix,
    grid: &FrequencyGrid,
    opts: &TimeDomainOptions,
) -> Result<Vec<C64>, SpectrumError> {
    let d = liouvillian.space().dim();
    check_operator(left, d)?;
    check_operator(right, d)?;
    let gen = liouvillian.generator();
    let norm = gen.norm_inf();
    let x0 = connected_source(rho, left);
    let x0_norm = vec_norm(&x0);
    if x0_norm == 0.0 {
        return Ok(vec![ZERO; grid.len()]);
    }
    if norm == 0.0 {
        return Err(SpectrumError::NotDecaying { steps: 0 });
    }
    let h = opts.step_factor / norm;
    let m = opts.derivatives;

    // b_j · X = d^j/dτ^j tr(B X(τ)), scaled by h^j.
    let mut functionals = vec![trace_functional(right)];
    for j in 1..=m {
        let next = gen.vecmat(&functionals[j - 1]);
        functionals.push(next.into_iter().map(|z| z * h).collect());
    }

    let propagator = expm(&gen.scale_real(h));
    let mut samples: Vec<C64> = Vec::new();
    let mut x = x0;
    let mut steps = 0usize;
    loop {
        samples.extend(functionals.iter().map(|f| dot(f, &x)));
        if steps > 0 && vec_norm(&x) <= opts.decay_tolerance * x0_norm {
            break;
        }
        if steps == opts.max_steps {
            return Err(SpectrumError::NotDecaying { steps });
        }
        x = propagator.matvec(&x);
        steps += 1;
    }
    let stride = m + 1;
    let n_intervals = steps;
    let basis = HermiteBasis::new(m);

    let values = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let omega = grid.point(k);
            let theta = omega * h;
            // U_j = Σ_{k=0}^{N} e^{iωkh} d_k^(j)
            let mut sums = vec![ZERO; stride];
            let step = C64::from_polar(1.0, theta);
            let mut phase = C64::new(1.0, 0.0);
            for (idx, chunk) in samples.chunks_exact(stride).enumerate() {
                if idx % 256 == 0 {
                    phase = C64::from_polar(1.0, theta * idx as f64);
                }
                for (s, &v) in sums.iter_mut().zip(chunk) {
                    *s += phase * v;
                }
                phase *= step;
            }
            let last = &samples[n_intervals * stride..];
            let first = &samples[..stride];
            let end_phase = C64::from_polar(1.0, theta * n_intervals as f64);
            let back = C64::from_polar(1.0, -theta);
            let (wl, wr) = basis.filon_weights(theta);
            let mut total = ZERO;
            for j in 0..stride {
                let left_sum = sums[j] - end_phase * last[j];
                let right_sum = back * (sums[j] - first[j]);
                total += wl[j] * left_sum + wr[j] * right_sum;
            }
            total * h / PI
        })
        .collect();
    Ok(values)
}

/// Two-point Hermite basis on [0, 1] in monomial form.
struct HermiteBasis {
    /// `left[j][n]`: coefficient of tⁿ in the basis function carrying the
    /// j-th derivative at t = 0; `right` likewise for t = 1.
    left: Vec<Vec<f64>>,
    right: Vec<Vec<f64>>,
}

impl HermiteBasis {
    fn new(m: usize) -> Self {
        let deg = 2 * m + 2;
        // Row r encodes the functional: r < m+1 → p^(r)(0), else p^(r−m−1)(1).
        let falling = |n: usize, j: usize| -> f64 { ((n - j + 1)..=n).map(|x| x as f64).product() };
        let mut cond = ComplexMatrix::zeros(deg, deg);
        for j in 0..=m {
            cond[(j, j)] = C64::new(falling(j, j), 0.0);
            for n in j..deg {
                cond[(m + 1 + j, n)] = C64::new(falling(n, j), 0.0);
            }
        }
        let lu = LuDecomposition::factor(&cond).expect("Hermite conditions are nonsingular");
        let mut left = Vec::new();
        let mut right = Vec::new();
        for r in 0..deg {
            let mut e = vec![ZERO; deg];
            e[r] = C64::new(1.0, 0.0);
            let coeffs: Vec<f64> = lu.solve(&e).iter().map(|z| z.re).collect();
            if r <= m {
                left.push(coeffs);
            } else {
                right.push(coeffs);
            }
        }
        Self { left, right }
    }

    fn filon_weights(&self, theta: f64) -> (Vec<C64>, Vec<C64>) {
        let mu = oscillatory_moments(theta, self.left[0].len());
        let apply = |c: &Vec<f64>| c.iter().zip(&mu).map(|(&a, &b)| b * a).sum::<C64>();
        (self.left.iter().map(apply).collect(), self.right.iter().map(apply).collect())
    }
}

/// `μ_n(θ) = ∫₀¹ tⁿ e^{iθt} dt` for `n < count`.
fn oscillatory_moments(theta: f64, count: usize) -> Vec<C64> {
    let i = C64::i();
    if theta.abs() >= count as f64 + 1.0 {
        // Upward recurrence is stable once |θ| exceeds the order.
        let e = C64::from_polar(1.0, theta);
        let mut mu = Vec::with_capacity(count);
        mu.push((e - 1.0) / (i * theta));
        for n in 1..count {
            let prev = mu[n - 1];
            mu.push((e - prev * n as f64) / (i * theta));
        }
        mu
    } else {
        // Σ_k (iθ)^k / (k! (n + k + 1)).
        (0..count)
            .map(|n| {
                let mut term = C64::new(1.0, 0.0);
                let mut acc = term / (n as f64 + 1.0);
                for k in 1..200 {
                    term *= i * theta / k as f64;
                    let add = term / (n + k + 1) as f64;
                    acc += add;
                    if add.norm() < 1e-18 * acc.norm() {
                        break;
                    }
                }
                acc
            })
            .collect()
    }
}

/// Discrete unit-sum Gaussian kernel sampled at the grid spacing, truncated
/// at ±8σ. A FWHM of at most a quarter spacing gives the identity kernel:
/// its sampled neighbor weight would be below 1e-19. Between that and
/// spacing·6 the Gaussian is undersampled and rejected.
pub fn gaussian_kernel(spacing: f64, fwhm: f64) -> Result<Vec<f64>, SpectrumError> {
    if !(fwhm.is_finite() && fwhm >= 0.0) {
        return Err(SpectrumError::InvalidGrid(format!("instrument FWHM must be ≥ 0, got {fwhm}")));
    }
    if fwhm <= 0.25 * spacing {
        return Ok(vec![1.0]);
    }
    let limit = fwhm / 6.0;
    if spacing > limit * (1.0 + 1e-12) {
        return Err(SpectrumError::GridTooCoarse { spacing, limit });
    }
    let sigma = fwhm / (8.0 * std::f64::consts::LN_2).sqrt();
    let half = (8.0 * sigma / spacing).ceil() as i64;
    let mut k: Vec<f64> = (-half..=half)
        .map(|i| {
            let x = i as f64 * spacing;
            (-0.5 * (x / sigma).powi(2)).exp()
        })
        .collect();
    let total: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= total);
    Ok(k)
}

/// Linear convolution with a centered odd-length kernel; samples outside the
/// grid are zero.
pub fn convolve_values(values: &[f64], kernel: &[f64]) -> Vec<f64> {
    let half = (kernel.len() / 2) as isize;
    let n = values.len() as isize;
    (0..n)
        .map(|i| {
            let lo = (i - half).max(0);
            let hi = (i + half).min(n - 1);
            (lo..=hi)
                .map(|j| values[j as usize] * kernel[(j - i + half) as usize])
                .sum()
        })
        .collect()
}

/// Convolves with a unit-area Gaussian of the given FWHM (µeV).
pub fn convolve_instrument(s: &RawSpectrum, fwhm: f64) -> Result<RawSpectrum, SpectrumError> {
    let kernel = gaussian_kernel(s.grid.spacing(), fwhm)?;
    RawSpectrum::new(s.grid, convolve_values(&s.values, &kernel))
}

/// Relative L2 distance `‖a − b‖ / ‖b‖`.
pub fn relative_l2(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}
