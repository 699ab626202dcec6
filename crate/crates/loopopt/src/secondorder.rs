//! Second-order diagnostics: Taylor-model verification, coercivity
//! estimation by Rayleigh probing, and classification of critical points.

use crate::error::{Error, Result};
use crate::loopspace::{LoopCurve, TangentField};
use crate::metrics::{self, MetricKind};
use crate::objectives::Objective;
use crate::optimizer::default_grad_tol;
use crate::probes;

/// Remainders of the second-order Taylor model along a ray.
#[derive(Debug, Clone)]
pub struct TaylorReport {
    /// Step lengths actually used (inadmissible ones are dropped).
    pub t_values: Vec<f64>,
    /// `|f(c + t v) − f(c) − t g(∇f, v) − t²/2 g(Hv, v)|` per step.
    pub remainders: Vec<f64>,
    /// Least-squares slope of `log remainder` against `log t` over the
    /// remainders above the roundoff floor; `NaN` when fewer than two
    /// usable points remain (e.g. for exactly quadratic objectives).
    pub fitted_order: f64,
}

/// Compare `f(c + t v)` against the metric Taylor model built from the
/// gradient and Hessian action, for each step length in `ts`.
pub fn taylor_check(
    objective: &Objective,
    metric: MetricKind,
    c: &LoopCurve,
    v: &TangentField,
    ts: &[f64],
) -> Result<TaylorReport> {
    if ts.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::NonPositiveStep);
    }
    let needs_immersion = objective.requires_immersion() || metric.requires_immersion();
    let f0 = objective.value(c)?;
    let g = objective.gradient(metric, c)?;
    let gv = metrics::inner(metric, c, &g, v)?;
    let h = objective.hessian_apply(metric, c, v)?;
    let hv = metrics::inner(metric, c, &h, v)?;
    let mut t_values = Vec::new();
    let mut remainders = Vec::new();
    let eps = c.default_immersion_eps();
    for &t in ts {
        let cand = c.axpy(t, v)?;
        if needs_immersion && !cand.is_immersion(eps) {
            continue;
        }
        let model = f0 + t * gv + 0.5 * t * t * hv;
        remainders.push((objective.value(&cand)? - model).abs());
        t_values.push(t);
    }
    if t_values.is_empty() {
        return Err(Error::NoAdmissibleStep);
    }
    let floor = 1e-14 * (1.0 + f0.abs());
    let pts: Vec<(f64, f64)> = t_values
        .iter()
        .zip(&remainders)
        .filter(|(_, &r)| r > floor)
        .map(|(&t, &r)| (t.ln(), r.ln()))
        .collect();
    let fitted_order = if pts.len() >= 2 {
        least_squares_slope(&pts)
    } else {
        f64::NAN
    };
    Ok(TaylorReport {
        t_values,
        remainders,
        fitted_order,
    })
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

/// Result of Rayleigh-quotient probing of the Hessian.
#[derive(Debug, Clone)]
pub struct CoercivityEstimate {
    /// Smallest probed quotient `g(Hv, v) / g(v, v)`.
    pub mu_hat: f64,
    /// Number of probe directions actually evaluated.
    pub probes: usize,
    /// The direction attaining `mu_hat`.
    pub min_direction: TangentField,
    /// Seed used for the random part of the probe set.
    pub seed: u64,
}

/// Estimate the coercivity constant of the Hessian at `c` by probing
/// `n_random` seeded Gaussian fields plus the full Fourier field basis.
pub fn coercivity_estimate(
    objective: &Objective,
    metric: MetricKind,
    c: &LoopCurve,
    n_random: usize,
    seed: u64,
) -> Result<CoercivityEstimate> {
    let mut fields = probes::gaussian_fields(c.n(), n_random, seed)?;
    fields.extend(probes::fourier_fields(c.n())?);
    let mut mu_hat = f64::INFINITY;
    let mut min_direction = None;
    let mut used = 0usize;
    for v in fields {
        let vv = metrics::inner(metric, c, &v, &v)?;
        if vv <= 1e-14 {
            // Degenerate direction for this metric; skip.
            continue;
        }
        let h = objective.hessian_apply(metric, c, &v)?;
        let q = metrics::inner(metric, c, &h, &v)? / vv;
        used += 1;
        if q < mu_hat {
            mu_hat = q;
            min_direction = Some(v);
        }
    }
    let min_direction = min_direction.ok_or(Error::NoAdmissibleStep)?;
    Ok(CoercivityEstimate {
        mu_hat,
        probes: used,
        min_direction,
        seed,
    })
}

/// Tiers of critical-point quality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalClass {
    /// Gradient norm above tolerance.
    NotCritical,
    /// Critical, but some probed Rayleigh quotient is clearly negative.
    Critical,
    /// Critical with all probed quotients above `−1e-8`.
    SecondOrderCritical,
    /// Critical with probed coercivity at least `1e-6`.
    CoerciveMinimizerCandidate,
}

impl CriticalClass {
    pub fn name(self) -> &'static str {
        match self {
            CriticalClass::NotCritical => "NotCritical",
            CriticalClass::Critical => "Critical",
            CriticalClass::SecondOrderCritical => "SecondOrderCritical",
            CriticalClass::CoerciveMinimizerCandidate => "CoerciveMinimizerCandidate",
        }
    }
}

/// Classification outcome for a point.
#[derive(Debug, Clone)]
pub struct Classification {
    pub class: CriticalClass,
    pub grad_norm: f64,
    /// Smallest probed Rayleigh quotient; absent when the point is not
    /// critical (the Hessian is then not probed).
    pub mu_hat: Option<f64>,
    pub probes: usize,
    pub seed: u64,
}

/// Classify `c`: check criticality of the gradient (tolerance defaults to
/// `1e-8 (1 + ‖∇f(c)‖)`), then grade the probed Hessian quotients.
pub fn classify_point(
    objective: &Objective,
    metric: MetricKind,
    c: &LoopCurve,
    grad_tol: Option<f64>,
    n_random: usize,
    seed: u64,
) -> Result<Classification> {
    let g = objective.gradient(metric, c)?;
    let grad_norm = metrics::norm(metric, c, &g)?;
    let tol = grad_tol.unwrap_or_else(|| default_grad_tol(grad_norm));
    if grad_norm > tol {
        return Ok(Classification {
            class: CriticalClass::NotCritical,
            grad_norm,
            mu_hat: None,
            probes: 0,
            seed,
        });
    }
    let est = coercivity_estimate(objective, metric, c, n_random, seed)?;
    let class = if est.mu_hat >= 1e-6 {
        CriticalClass::CoerciveMinimizerCandidate
    } else if est.mu_hat >= -1e-8 {
        CriticalClass::SecondOrderCritical
    } else {
        CriticalClass::Critical
    };
    Ok(Classification {
        class,
        grad_norm,
        mu_hat: Some(est.mu_hat),
        probes: est.probes,
        seed,
    })
}
