//! Counterexample diagnostics.
//!
//! Two phenomena are made measurable here.  First, the oscillating loop
//! sequence `c_k = ((−1)^k / k)·(cos θ, sin θ)` converges to the point
//! loop while its flat-metric length gradients alternate between the two
//! unit radial fields, so consecutive gradient gaps stay at `2√(2π)`:
//! gradient flows see no Cauchy behavior even along a convergent curve
//! sequence.  Second, the invariant-H¹ length gradient on an
//! arclength-parametrized curve splits as `γ − G*γ`; the smoothing part
//! `G*γ` gains two orders of spectral decay over `γ`, which the spectrum
//! report quantifies.

use crate::error::{Error, Result};
use crate::loopspace::{pack, LoopCurve, TangentField};
use crate::metrics::{self, MetricKind};
use crate::objectives::{self, Objective};
use crate::secondorder::least_squares_slope;
use crate::spectral;
use std::f64::consts::TAU;

/// Trace of the oscillating-gradient counterexample.
#[derive(Debug, Clone)]
pub struct SequenceReport {
    /// Sequence indices `1 … k_max`.
    pub ks: Vec<usize>,
    /// Flat norms of the curves viewed as fields; these decay like
    /// `√(2π)/k`.
    pub curve_norms: Vec<f64>,
    /// Flat norms of consecutive gradient differences (one fewer entry);
    /// these stay at `2√(2π)`.
    pub gradient_gaps: Vec<f64>,
    /// The flat length gradients themselves, `(−1)^k ·(cos θ, sin θ)`.
    pub gradients: Vec<TangentField>,
}

/// Build the oscillating sequence on an `n`-point grid up to index
/// `k_max ≥ 2` and record norms, gradients, and gradient gaps.
pub fn oscillating_sequence(k_max: usize, n: usize) -> Result<SequenceReport> {
    if k_max < 2 {
        return Err(Error::TraceTooShort {
            need: 2,
            got: k_max,
        });
    }
    let id = LoopCurve::identity(n)?;
    let mut ks = Vec::with_capacity(k_max);
    let mut curve_norms = Vec::with_capacity(k_max);
    let mut gradients = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let r = if k % 2 == 0 { 1.0 } else { -1.0 } / k as f64;
        let c = id.scaled(r)?;
        let g = Objective::Length.gradient(MetricKind::FlatL2, &c)?;
        ks.push(k);
        curve_norms.push(metrics::norm(MetricKind::FlatL2, &c, &c.as_field())?);
        gradients.push(g);
    }
    let mut gradient_gaps = Vec::with_capacity(k_max - 1);
    for pair in gradients.windows(2) {
        let diff = pair[1].sub(&pair[0])?;
        gradient_gaps.push(metrics::norm(MetricKind::FlatL2, &id, &diff)?);
    }
    Ok(SequenceReport {
        ks,
        curve_norms,
        gradient_gaps,
        gradients,
    })
}

/// Folded Fourier magnitudes of the curve, its invariant-H¹ length
/// gradient, and the smoothing contribution, with fitted decay exponents.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    /// Folded wavenumbers `0 … N/2`.
    pub wavenumbers: Vec<usize>,
    pub curve_mags: Vec<f64>,
    pub gradient_mags: Vec<f64>,
    /// Magnitudes of the smoothing part `G*γ`.
    pub smoothing_mags: Vec<f64>,
    /// Fitted decay exponents `a` in `mag ~ k^{-a}` (None when the
    /// spectrum sits at the roundoff floor).
    pub curve_exponent: Option<f64>,
    pub gradient_exponent: Option<f64>,
    pub smoothing_exponent: Option<f64>,
    /// Largest relative residual of the modewise identity
    /// `û_m (1 + k_s²) = (−γ_ss)^_m` for the reported gradient.
    pub max_modewise_residual: f64,
    /// Human-readable summary of what the spectra show.
    pub note: String,
}

fn fit_exponent(mags: &[f64]) -> Option<f64> {
    let max = mags.iter().copied().fold(0.0, f64::max);
    let floor = 1e-12 * max;
    let pts: Vec<(f64, f64)> = mags
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &m)| m > floor)
        .map(|(k, &m)| ((k as f64).ln(), m.ln()))
        .collect();
    if pts.len() >= 4 {
        Some(-least_squares_slope(&pts))
    } else {
        None
    }
}

/// Resample `c` by arclength and report the spectra of the curve, its
/// kernel-route H¹ length gradient, and the smoothing part `G*γ`.
pub fn h1_gradient_regularity(c: &LoopCurve) -> Result<SpectrumReport> {
    let gamma = c.resample_arclength()?;
    let n = gamma.n();
    let len = gamma.arclength();
    // Rough curves (for example curvature kinks) keep a residual speed
    // nonuniformity no resampling can remove at fixed resolution, so the
    // diagnostic uses the ungated kernel path: the resampled curve is
    // treated as arclength-parametrized as-is.
    let smooth = objectives::h1_kernel_parts_unchecked(&gamma)?;
    let grad = gamma.as_field().sub(&smooth)?;
    let curve_coeffs = spectral::forward(&pack(gamma.points()));
    let grad_coeffs = spectral::forward(&pack(grad.vecs()));
    let smooth_coeffs = spectral::forward(&pack(smooth.vecs()));
    let curve_mags = spectral::folded_magnitudes(&curve_coeffs);
    let gradient_mags = spectral::folded_magnitudes(&grad_coeffs);
    let smoothing_mags = spectral::folded_magnitudes(&smooth_coeffs);
    // Modewise residual of (1 + k_s²) û = k_s² γ̂ (the Fourier form of the
    // defining equation), relative to the largest right-hand side.
    let mut max_rhs = 0.0f64;
    let mut max_res = 0.0f64;
    for j in 0..n {
        if j == n / 2 {
            continue;
        }
        let m = spectral::signed_mode(n, j) as f64;
        let ks = TAU * m / len;
        let rhs = curve_coeffs[j] * (ks * ks);
        let lhs = grad_coeffs[j] * (1.0 + ks * ks);
        max_rhs = max_rhs.max(rhs.norm());
        max_res = max_res.max((lhs - rhs).norm());
    }
    let max_modewise_residual = if max_rhs > 0.0 { max_res / max_rhs } else { 0.0 };
    let curve_exponent = fit_exponent(&curve_mags);
    let gradient_exponent = fit_exponent(&gradient_mags);
    let smoothing_exponent = fit_exponent(&smoothing_mags);
    let note = match (curve_exponent, smoothing_exponent) {
        (Some(a), Some(b)) => format!(
            "algebraic decay: curve ~ k^-{a:.2}, smoothing part ~ k^-{b:.2} (gain {:.2} orders)",
            b - a
        ),
        _ => "spectra reach the roundoff floor: no finite-order obstruction at this resolution"
            .to_string(),
    };
    Ok(SpectrumReport {
        wavenumbers: (0..=n / 2).collect(),
        curve_mags,
        gradient_mags,
        smoothing_mags,
        curve_exponent,
        gradient_exponent,
        smoothing_exponent,
        max_modewise_residual,
        note,
    })
}
