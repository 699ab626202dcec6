//! Objective functionals on loop space and their derivatives.
//!
//! Every objective exposes its exact discrete differential through a *flat
//! representer* `w`, defined by `df(c; v) = (2π/N) Σ ⟨w_j, v_j⟩`.  The
//! gradient with respect to a metric is then the Riesz lift of `w`, and the
//! Hessian action is the Riesz lift of the derivative of `w` along the
//! direction — analytic where the representer is affine in the curve,
//! finite differences of the representer otherwise.
//!
//! For the length functional under the invariant H¹ metric on
//! arclength-parametrized curves there is an additional closed-form route:
//! the gradient is `γ − G*γ` with the periodic kernel
//! `G(x) = cosh(x − L/2) / (2 sinh(L/2))`, which integrates to one.  The
//! kernel quadrature carries Euler–Maclaurin corrections for the derivative
//! kinks of `G` at the diagonal, making it spectrally consistent with the
//! Fourier solve of `(1 − ∂_s²) u = −γ_ss`.

use crate::error::{Error, Result};
use crate::loopspace::{pack, same_grid, unpack, LoopCurve, TangentField};
use crate::metrics::{self, MetricKind};
use crate::spectral;
use nalgebra::Vector2;
use std::f64::consts::TAU;

/// Objective functional on discretized loops.
#[derive(Debug, Clone)]
pub enum Objective {
    /// Arclength `(2π/N) Σ |c′|`.
    Length,
    /// Squared flat distance to the unit circle.
    TrackIdentity,
    /// `‖c − target‖² + λ‖c‖²` in the flat metric.
    TrackRegularized { target: LoopCurve, lambda: f64 },
    /// Dirichlet energy `½ (2π/N) Σ |c′|²`.
    LoopEnergy,
}

impl Objective {
    pub fn track_regularized(target: LoopCurve, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::NegativeLambda(lambda));
        }
        Ok(Objective::TrackRegularized { target, lambda })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Objective::Length => "length",
            Objective::TrackIdentity => "track-id",
            Objective::TrackRegularized { .. } => "track-reg",
            Objective::LoopEnergy => "energy",
        }
    }

    /// Whether evaluating derivatives needs `c` to be an immersion.
    pub fn requires_immersion(&self) -> bool {
        matches!(self, Objective::Length)
    }

    /// A certified lower bound of the objective over the whole space, when
    /// one is known in closed form.
    pub fn lower_bound(&self) -> Option<f64> {
        match self {
            Objective::Length | Objective::TrackIdentity | Objective::LoopEnergy => Some(0.0),
            Objective::TrackRegularized { target, lambda } => {
                // Minimum of ‖c−g‖² + λ‖c‖² is attained at c = g/(1+λ).
                let g = target.as_field();
                let g2 = metrics::flat_pairing(&g, &g).ok()?;
                Some(lambda * g2 / (1.0 + lambda))
            }
        }
    }

    /// Objective value.
    pub fn value(&self, c: &LoopCurve) -> Result<f64> {
        match self {
            Objective::Length => Ok(c.arclength()),
            Objective::TrackIdentity => {
                let diff = c.sub(&LoopCurve::identity(c.n())?)?;
                metrics::flat_pairing(&diff, &diff)
            }
            Objective::TrackRegularized { target, lambda } => {
                let diff = c.sub(target)?;
                let cf = c.as_field();
                Ok(metrics::flat_pairing(&diff, &diff)?
                    + lambda * metrics::flat_pairing(&cf, &cf)?)
            }
            Objective::LoopEnergy => {
                let d = c.derivative();
                Ok(0.5 * metrics::flat_pairing(&d, &d)?)
            }
        }
    }

    /// The field `w` with `df(c; v) = (2π/N) Σ ⟨w_j, v_j⟩` for all `v`.
    /// This is the exact differential of the discretized functional, not a
    /// discretization of the continuum formula.
    pub fn flat_representer(&self, c: &LoopCurve) -> Result<TangentField> {
        match self {
            Objective::Length => {
                // d𝓛(v) = (2π/N) Σ ⟨T, v′⟩ = (2π/N) Σ ⟨−T′, v⟩ by
                // antisymmetry of the spectral derivative.
                let (t, _) = c.unit_tangent_normal()?;
                Ok(t.derivative().scaled(-1.0))
            }
            Objective::TrackIdentity => {
                c.sub(&LoopCurve::identity(c.n())?).map(|d| d.scaled(2.0))
            }
            Objective::TrackRegularized { target, lambda } => {
                let diff = c.sub(target)?;
                diff.axpy(*lambda, &c.as_field()).map(|d| d.scaled(2.0))
            }
            Objective::LoopEnergy => Ok(c.as_field().second_derivative().scaled(-1.0)),
        }
    }

    /// Directional derivative `df(c; v)`.
    pub fn differential(&self, c: &LoopCurve, v: &TangentField) -> Result<f64> {
        same_grid(c.n(), v.n())?;
        metrics::flat_pairing(&self.flat_representer(c)?, v)
    }

    /// Riemannian gradient with respect to `metric`.
    pub fn gradient(&self, metric: MetricKind, c: &LoopCurve) -> Result<TangentField> {
        metrics::riesz(metric, c, &self.flat_representer(c)?)
    }

    /// Derivative of the flat representer along `v`, i.e. the flat-chart
    /// Hessian of the functional applied to `v`.  Affine representers are
    /// differentiated exactly; the length representer by central
    /// differences with an immersion-guarded step.
    pub fn representer_derivative(&self, c: &LoopCurve, v: &TangentField) -> Result<TangentField> {
        same_grid(c.n(), v.n())?;
        match self {
            Objective::TrackIdentity => Ok(v.scaled(2.0)),
            Objective::TrackRegularized { lambda, .. } => Ok(v.scaled(2.0 * (1.0 + lambda))),
            Objective::LoopEnergy => Ok(v.second_derivative().scaled(-1.0)),
            Objective::Length => {
                let mut t = 1e-5 * (1.0 + c.linf_norm()) / (1.0 + v.linf_norm());
                let eps = c.default_immersion_eps();
                let mut halvings = 0u32;
                loop {
                    let cp = c.axpy(t, v)?;
                    let cm = c.axpy(-t, v)?;
                    if cp.is_immersion(eps) && cm.is_immersion(eps) {
                        let wp = self.flat_representer(&cp)?;
                        let wm = self.flat_representer(&cm)?;
                        return wp.sub(&wm).map(|d| d.scaled(0.5 / t));
                    }
                    halvings += 1;
                    if halvings > 40 {
                        return Err(Error::FdStencilNotImmersed(halvings - 1));
                    }
                    t *= 0.5;
                }
            }
        }
    }

    /// Hessian action `v ↦ ∇²f(c)[v]` with respect to `metric`: the Riesz
    /// lift of the representer derivative, so that
    /// `g_c(H v, u) = d²f(c)[v, u]` for all `u`.
    pub fn hessian_apply(
        &self,
        metric: MetricKind,
        c: &LoopCurve,
        v: &TangentField,
    ) -> Result<TangentField> {
        metrics::riesz(metric, c, &self.representer_derivative(c, v)?)
    }
}

/// Speed-uniformity threshold below which a curve counts as
/// arclength-parametrized for the kernel route.
const UNIFORM_SPEED_TOL: f64 = 1e-6;

/// Invariant-H¹ gradient of length on an arclength-parametrized curve via
/// the Fourier multiplier `k² / (1 + k²)` for the equation
/// `(1 − ∂_s²) u = −γ_ss`.  Serves as the independent oracle for the
/// kernel route.
pub fn h1_length_gradient_fourier(c: &LoopCurve) -> Result<TangentField> {
    let nonuni = c.speed_nonuniformity();
    if nonuni > UNIFORM_SPEED_TOL {
        return Err(Error::NotUniformSpeed(nonuni));
    }
    c.require_immersion()?;
    let n = c.n();
    let len = c.arclength();
    let mut coeffs = spectral::forward(&pack(c.points()));
    for (j, z) in coeffs.iter_mut().enumerate() {
        if j == n / 2 {
            // Differentiation annihilates the Nyquist mode, so the right
            // hand side −γ_ss has none and neither does the solution.
            *z = rustfft::num_complex::Complex64::new(0.0, 0.0);
            continue;
        }
        let m = spectral::signed_mode(n, j) as f64;
        let ks = TAU * m / len;
        *z *= ks * ks / (1.0 + ks * ks);
    }
    TangentField::new(unpack(&spectral::inverse(&coeffs)))
}

/// Invariant-H¹ gradient of length on an arclength-parametrized curve via
/// the periodic kernel: `u(s) = γ(s) − ∫ γ(t) G(|s−t|) dt` with
/// `G(x) = cosh(x − L/2) / (2 sinh(L/2))`.  The trapezoid sum is corrected
/// for the kinks of `G` at the diagonal, restoring high-order accuracy.
pub fn h1_length_gradient_kernel(c: &LoopCurve) -> Result<TangentField> {
    let parts = h1_kernel_parts(c)?;
    c.as_field().sub(&parts)
}

/// The smoothing contribution `G*γ` alone (the gradient is `γ − G*γ`).
pub fn h1_kernel_parts(c: &LoopCurve) -> Result<TangentField> {
    let nonuni = c.speed_nonuniformity();
    if nonuni > UNIFORM_SPEED_TOL {
        return Err(Error::NotUniformSpeed(nonuni));
    }
    h1_kernel_parts_unchecked(c)
}

/// `G*γ` without the uniform-speed gate, for diagnostics on rough curves
/// where resampling leaves residual parametrization error: the curve is
/// treated as arclength-parametrized as-is.
pub(crate) fn h1_kernel_parts_unchecked(c: &LoopCurve) -> Result<TangentField> {
    c.require_immersion()?;
    let n = c.n();
    let len = c.arclength();
    let h = len / n as f64;
    let half = 0.5 * len;
    let denom = 2.0 * half.sinh();
    // d²γ/ds² via the chain rule s = (L/2π) θ.
    let scale = TAU / len;
    let gamma_ss = c.as_field().second_derivative().scaled(scale * scale);
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = Vector2::zeros();
        for m in 0..n {
            let x = (j as isize - m as isize).unsigned_abs() as f64 * h;
            let g = (x - half).cosh() / denom;
            acc += g * c.point(m);
        }
        acc *= h;
        // Euler–Maclaurin corrections for the G′ and G‴ jumps (both −1)
        // at the node t = s_j: jumps of the integrand are −γ and
        // −(3γ″ + γ), contributing +(h²/12)[f′] − (h⁴/720)[f‴].
        acc -= h * h / 12.0 * c.point(j);
        acc += h.powi(4) / 720.0 * (3.0 * gamma_ss.get(j) + c.point(j));
        out.push(acc);
    }
    TangentField::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn wobbly(n: usize) -> LoopCurve {
        LoopCurve::from_fn(n, |t| {
            Vector2::new(
                1.1 * t.cos() + 0.2 * (2.0 * t).cos(),
                0.9 * t.sin() - 0.15 * (3.0 * t).cos(),
            )
        })
        .unwrap()
    }

    fn probe(n: usize, k: f64, phase: f64) -> TangentField {
        TangentField::from_fn(n, |t| {
            Vector2::new((k * t + phase).cos(), (k * t - 2.0 * phase).sin())
        })
        .unwrap()
    }

    #[test]
    fn length_value_of_circles() {
        for r in [0.5, 1.0, 3.0] {
            let c = LoopCurve::circle(Vector2::zeros(), r, 32).unwrap();
            assert_relative_eq!(
                Objective::Length.value(&c).unwrap(),
                TAU * r,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn length_flat_representer_on_scaled_circles_is_unit_radial() {
        // At c = r·(cos θ, sin θ) the representer is sgn(r)·(cos θ, sin θ).
        for r in [1.0, -1.0, 1.0 / 3.0, -1.0 / 3.0] {
            let c = LoopCurve::identity(64).unwrap().scaled(r).unwrap();
            let w = Objective::Length.flat_representer(&c).unwrap();
            for j in 0..64 {
                let t = c.theta(j);
                let expect = r.signum() * Vector2::new(t.cos(), t.sin());
                assert!(
                    (w.get(j) - expect).norm() < 1e-12,
                    "r = {r}, node {j}: {:?} vs {:?}",
                    w.get(j),
                    expect
                );
            }
        }
    }

    #[test]
    fn differentials_match_finite_differences() {
        let n = 64;
        let c = wobbly(n);
        let target = LoopCurve::ellipse(1.3, 0.8, n).unwrap();
        let objectives = [
            Objective::Length,
            Objective::TrackIdentity,
            Objective::track_regularized(target, 0.4).unwrap(),
            Objective::LoopEnergy,
        ];
        let t = 1e-6;
        for o in &objectives {
            for k in 0..3 {
                let v = probe(n, k as f64 + 1.0, 0.3 * k as f64);
                let fd = (o.value(&c.axpy(t, &v).unwrap()).unwrap()
                    - o.value(&c.axpy(-t, &v).unwrap()).unwrap())
                    / (2.0 * t);
                let an = o.differential(&c, &v).unwrap();
                assert_relative_eq!(an, fd, epsilon = 1e-9, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn track_identity_vanishes_on_identity() {
        let c = LoopCurve::identity(32).unwrap();
        assert!(Objective::TrackIdentity.value(&c).unwrap() < 1e-28);
        let g = Objective::TrackIdentity
            .gradient(MetricKind::FlatL2, &c)
            .unwrap();
        assert!(g.linf_norm() < 1e-14);
    }

    #[test]
    fn loop_energy_gradient_on_unit_circle_is_radial() {
        // E(c) = ½∫|c′|², representer −c″ = c on the unit circle.
        let c = LoopCurve::identity(32).unwrap();
        assert_relative_eq!(
            Objective::LoopEnergy.value(&c).unwrap(),
            PI,
            max_relative = 1e-13
        );
        let g = Objective::LoopEnergy
            .gradient(MetricKind::FlatL2, &c)
            .unwrap();
        for j in 0..32 {
            assert!((g.get(j) - c.point(j)).norm() < 1e-12);
        }
    }

    #[test]
    fn invariant_l2_length_gradient_is_c_over_r_squared() {
        for r in [0.5, 1.0, 2.0] {
            let c = LoopCurve::circle(Vector2::zeros(), r, 32).unwrap();
            let g = Objective::Length
                .gradient(MetricKind::InvariantL2, &c)
                .unwrap();
            for j in 0..32 {
                let expect = c.point(j) / (r * r);
                assert!((g.get(j) - expect).norm() < 1e-12, "r = {r}");
            }
        }
    }

    #[test]
    fn invariant_h1_length_gradient_on_circle() {
        // (1 − ∂_s²) u = −γ_ss gives u = c/(1 + r²) on a radius-r circle.
        for r in [0.5, 2.0] {
            let c = LoopCurve::circle(Vector2::zeros(), r, 64).unwrap();
            let g = Objective::Length
                .gradient(MetricKind::InvariantH1, &c)
                .unwrap();
            for j in 0..64 {
                let expect = c.point(j) / (1.0 + r * r);
                assert!((g.get(j) - expect).norm() < 1e-11, "r = {r}");
            }
        }
    }

    #[test]
    fn kernel_and_fourier_routes_agree_on_resampled_ellipse() {
        let c = LoopCurve::ellipse(2.0, 1.0, 128)
            .unwrap()
            .resample_arclength()
            .unwrap();
        let uk = h1_length_gradient_kernel(&c).unwrap();
        let uf = h1_length_gradient_fourier(&c).unwrap();
        let denom = uf.linf_norm();
        assert!(uk.sub(&uf).unwrap().linf_norm() / denom < 1e-6);
        // Both agree with the generic Riesz gradient.
        let ur = Objective::Length
            .gradient(MetricKind::InvariantH1, &c)
            .unwrap();
        assert!(ur.sub(&uf).unwrap().linf_norm() / denom < 1e-6);
    }

    #[test]
    fn kernel_route_rejects_nonuniform_curves() {
        let c = LoopCurve::ellipse(2.0, 1.0, 64).unwrap();
        assert!(matches!(
            h1_length_gradient_kernel(&c),
            Err(Error::NotUniformSpeed(_))
        ));
    }

    #[test]
    fn track_regularized_hessian_is_a_constant_multiple() {
        let n = 32;
        let target = LoopCurve::ellipse(1.0, 1.5, n).unwrap();
        let o = Objective::track_regularized(target, 0.7).unwrap();
        let c = wobbly(n);
        let v = probe(n, 2.0, 0.4);
        let h = o.hessian_apply(MetricKind::FlatL2, &c, &v).unwrap();
        for j in 0..n {
            assert!((h.get(j) - 3.4 * v.get(j)).norm() < 1e-13);
        }
    }

    #[test]
    fn loop_energy_h1_rayleigh_quotients_are_k2_over_1_plus_k2() {
        let n = 32;
        let c = LoopCurve::identity(n).unwrap();
        for k in 1..n / 2 {
            let v = TangentField::from_fn(n, |t| Vector2::new((k as f64 * t).cos(), 0.0)).unwrap();
            let h = Objective::LoopEnergy
                .hessian_apply(MetricKind::InvariantH1, &c, &v)
                .unwrap();
            let q = metrics::inner(MetricKind::InvariantH1, &c, &h, &v).unwrap()
                / metrics::inner(MetricKind::InvariantH1, &c, &v, &v).unwrap();
            let expect = (k * k) as f64 / (1.0 + (k * k) as f64);
            assert_relative_eq!(q, expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn hessian_bilinear_form_is_symmetric() {
        let n = 32;
        let c = wobbly(n);
        let u = probe(n, 1.0, 0.2);
        let v = probe(n, 3.0, 1.0);
        for o in [Objective::Length, Objective::LoopEnergy] {
            for m in [
                MetricKind::FlatL2,
                MetricKind::InvariantL2,
                MetricKind::InvariantH1,
            ] {
                let hu = o.hessian_apply(m, &c, &u).unwrap();
                let hv = o.hessian_apply(m, &c, &v).unwrap();
                let huv = metrics::inner(m, &c, &hu, &v).unwrap();
                let hvu = metrics::inner(m, &c, &hv, &u).unwrap();
                // Orthogonal probe pairs make both pairings vanish, so
                // scale by the product of norms rather than the values.
                let nu = metrics::norm(m, &c, &u).unwrap();
                let nv = metrics::norm(m, &c, &v).unwrap();
                let scale = (metrics::norm(m, &c, &hu).unwrap() * nv)
                    .max(metrics::norm(m, &c, &hv).unwrap() * nu)
                    .max(1e-30);
                assert!(
                    ((huv - hvu) / scale).abs() < 1e-6,
                    "{} / {m}: {huv} vs {hvu}",
                    o.name()
                );
            }
        }
    }

    #[test]
    fn elastic_gradient_rejects_tracking_objectives() {
        // Shift the curve so the tracking representer has a constant
        // component, which the SRVT pushforward cannot represent.
        let c = wobbly(32)
            .axpy(1.0, &TangentField::from_fn(32, |_| Vector2::new(0.3, -0.2)).unwrap())
            .unwrap();
        assert!(matches!(
            Objective::TrackIdentity.gradient(MetricKind::ElasticSrvt, &c),
            Err(Error::ElasticIncompatible(_))
        ));
        // Length and energy representers are exact θ-derivatives, hence
        // mean- and Nyquist-free, and lift fine.
        assert!(Objective::Length
            .gradient(MetricKind::ElasticSrvt, &c)
            .is_ok());
        assert!(Objective::LoopEnergy
            .gradient(MetricKind::ElasticSrvt, &c)
            .is_ok());
    }

    #[test]
    fn lower_bounds_are_below_values() {
        let n = 32;
        let c = wobbly(n);
        let target = LoopCurve::ellipse(1.0, 1.5, n).unwrap();
        let o = Objective::track_regularized(target.clone(), 0.7).unwrap();
        let lb = o.lower_bound().unwrap();
        assert!(lb <= o.value(&c).unwrap());
        // The bound is attained at g/(1+λ).
        let opt = target.scaled(1.0 / 1.7).unwrap();
        assert_relative_eq!(o.value(&opt).unwrap(), lb, max_relative = 1e-12);
    }
}
