//! Riemannian gradient descent on loop space, with a verifiable trace.
//!
//! Steps are taken in the global chart: `c_{k+1} = c_k − α ∇f(c_k)`, where
//! the gradient is with respect to the chosen metric.  The trace records,
//! per completed step, the objective value, metric gradient norm, step
//! size actually used, achieved decrease, and backtracking halvings; a
//! terminal row (step size and decrease zero) describes the final iterate.
//! The recorded values satisfy `decrease_k = f_k − f_{k+1}` bit for bit,
//! which the convergence checks rely on.

use crate::error::{Error, Result};
use crate::loopspace::LoopCurve;
use crate::metrics::{self, MetricKind};
use crate::objectives::Objective;

/// Step-size policy.
#[derive(Debug, Clone, Copy)]
pub enum StepRule {
    /// Fixed step; stepping outside the admissible set is an error.
    Constant { alpha: f64 },
    /// Start from `alpha` and multiply by `shrink` (at most `max_halvings`
    /// times) until the candidate is admissible.
    Backtracking {
        alpha: f64,
        shrink: f64,
        max_halvings: u32,
    },
}

impl StepRule {
    fn validate(&self) -> Result<()> {
        match *self {
            StepRule::Constant { alpha } => {
                if !(alpha > 0.0) {
                    return Err(Error::NonPositiveStep);
                }
            }
            StepRule::Backtracking { alpha, shrink, .. } => {
                if !(alpha > 0.0) {
                    return Err(Error::NonPositiveStep);
                }
                if !(shrink > 0.0 && shrink < 1.0) {
                    return Err(Error::BadShrink(shrink));
                }
            }
        }
        Ok(())
    }
}

/// One row of the descent trace.
#[derive(Debug, Clone, Copy)]
pub struct IterRecord {
    pub f_value: f64,
    pub grad_norm: f64,
    pub alpha: f64,
    pub decrease: f64,
    pub halvings: u32,
}

/// Full record of a descent run.
#[derive(Debug, Clone)]
pub struct DescentTrace {
    /// One record per completed step plus a terminal row, so
    /// `records.len() = steps + 1`.
    pub records: Vec<IterRecord>,
    /// Thinned iterate snapshots as `(step index, curve)`; runs of at most
    /// 1000 steps keep every iterate, longer runs every `⌈steps/1000⌉`-th.
    /// The final iterate is always present.
    pub iterates: Vec<(usize, LoopCurve)>,
}

impl DescentTrace {
    /// Number of completed steps.
    pub fn steps(&self) -> usize {
        self.records.len() - 1
    }

    pub fn final_curve(&self) -> &LoopCurve {
        &self.iterates.last().expect("trace has iterates").1
    }
}

/// Default gradient tolerance given the initial gradient norm.
pub fn default_grad_tol(grad_norm0: f64) -> f64 {
    1e-8 * (1.0 + grad_norm0)
}

/// Run gradient descent for at most `max_iter` steps, stopping early when
/// the metric gradient norm falls to `grad_tol` (default
/// `1e-8 (1 + ‖∇f(c_0)‖)`).
pub fn rgd(
    objective: &Objective,
    metric: MetricKind,
    c0: &LoopCurve,
    rule: &StepRule,
    max_iter: usize,
    grad_tol: Option<f64>,
) -> Result<DescentTrace> {
    rule.validate()?;
    let needs_immersion = objective.requires_immersion() || metric.requires_immersion();
    let stride = (max_iter.max(1) + 999) / 1000;
    let mut records = Vec::new();
    let mut iterates: Vec<(usize, LoopCurve)> = Vec::new();
    let mut c = c0.clone();
    let mut f = objective.value(&c)?;
    if !f.is_finite() {
        return Err(Error::NonFiniteValue);
    }
    let mut tol = grad_tol;
    for k in 0..max_iter {
        let g = objective.gradient(metric, &c)?;
        let gn = metrics::norm(metric, &c, &g)?;
        let tol_v = *tol.get_or_insert_with(|| default_grad_tol(gn));
        if gn <= tol_v {
            records.push(IterRecord {
                f_value: f,
                grad_norm: gn,
                alpha: 0.0,
                decrease: 0.0,
                halvings: 0,
            });
            iterates.push((k, c));
            return Ok(DescentTrace { records, iterates });
        }
        let mut alpha = match *rule {
            StepRule::Constant { alpha } | StepRule::Backtracking { alpha, .. } => alpha,
        };
        let mut halvings = 0u32;
        // Admissibility threshold from the current iterate's scale: a
        // candidate must not be judged by its own (possibly degenerate)
        // speeds.
        let eps = c.default_immersion_eps();
        let cand = loop {
            let cand = c.axpy(-alpha, &g)?;
            if !needs_immersion || cand.is_immersion(eps) {
                break cand;
            }
            match *rule {
                StepRule::Constant { .. } => return Err(Error::LeftAdmissibleSet),
                StepRule::Backtracking {
                    shrink,
                    max_halvings,
                    ..
                } => {
                    if halvings >= max_halvings {
                        return Err(Error::LeftAdmissibleSet);
                    }
                    alpha *= shrink;
                    halvings += 1;
                }
            }
        };
        let f_next = objective.value(&cand)?;
        if !f_next.is_finite() {
            return Err(Error::NonFiniteValue);
        }
        if k % stride == 0 {
            iterates.push((k, c.clone()));
        }
        records.push(IterRecord {
            f_value: f,
            grad_norm: gn,
            alpha,
            decrease: f - f_next,
            halvings,
        });
        c = cand;
        f = f_next;
    }
    let g = objective.gradient(metric, &c)?;
    let gn = metrics::norm(metric, &c, &g)?;
    records.push(IterRecord {
        f_value: f,
        grad_norm: gn,
        alpha: 0.0,
        decrease: 0.0,
        halvings: 0,
    });
    iterates.push((max_iter, c));
    Ok(DescentTrace { records, iterates })
}

/// Verify the sufficient-decrease inequality
/// `decrease_k ≥ c ‖∇f_k‖²` (with a `1e-12`-scale slack) for every
/// completed step; returns the first violating step if any.
pub fn check_sufficient_decrease(trace: &DescentTrace, c: f64) -> Result<(bool, Option<usize>)> {
    if !(c > 0.0) {
        return Err(Error::NonPositiveConstant(c));
    }
    for (k, r) in trace.records[..trace.steps()].iter().enumerate() {
        let slack = 1e-12 * (1.0 + r.f_value.abs());
        if r.decrease < c * r.grad_norm * r.grad_norm - slack {
            return Ok((false, Some(k)));
        }
    }
    Ok((true, None))
}

/// One row of the convergence certificate.
#[derive(Debug, Clone, Copy)]
pub struct BoundRow {
    /// Number of leading steps considered.
    pub k_limit: usize,
    /// Smallest recorded gradient norm among those steps.
    pub min_grad_norm: f64,
    /// Certified bound `√((f_0 − f_low) / (c K))`.
    pub bound: f64,
    /// Whether the minimum obeys the bound (with `1e-12`-scale slack).
    pub holds: bool,
}

/// The descent convergence certificate: under sufficient decrease with
/// constant `c`, the smallest gradient norm among the first `K` steps is
/// at most `√((f_0 − f_low)/(c K))`.  `f_low` must lower-bound every
/// recorded value.
pub fn convergence_bound(trace: &DescentTrace, f_low: f64, c: f64) -> Result<Vec<BoundRow>> {
    if !(c > 0.0) {
        return Err(Error::NonPositiveConstant(c));
    }
    if trace.records.len() < 2 {
        return Err(Error::TraceTooShort {
            need: 2,
            got: trace.records.len(),
        });
    }
    let f_min = trace
        .records
        .iter()
        .map(|r| r.f_value)
        .fold(f64::INFINITY, f64::min);
    if f_low > f_min + 1e-12 * (1.0 + f_min.abs()) {
        return Err(Error::BadLowerBound { f_low, f_min });
    }
    let f0 = trace.records[0].f_value;
    let mut rows = Vec::with_capacity(trace.steps());
    let mut min_g = f64::INFINITY;
    for k in 0..trace.steps() {
        min_g = min_g.min(trace.records[k].grad_norm);
        let kk = k + 1;
        let bound = ((f0 - f_low).max(0.0) / (c * kk as f64)).sqrt();
        rows.push(BoundRow {
            k_limit: kk,
            min_grad_norm: min_g,
            bound,
            holds: min_g <= bound + 1e-12 * (1.0 + bound),
        });
    }
    Ok(rows)
}
