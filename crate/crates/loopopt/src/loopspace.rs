//! Discretized loops in the plane and their tangent fields.
//!
//! A loop is stored as `N` samples at the uniform angles `θ_j = 2πj/N`
//! with `N` even and at least 8.  Derivatives are spectral, so every
//! geometric quantity (speed, tangent, curvature, arclength) is accurate
//! to roundoff for band-limited curves.

use crate::error::{Error, Result};
use crate::interp::Pchip;
use crate::spectral;
use nalgebra::Vector2;
use rustfft::num_complex::Complex64;
use std::f64::consts::TAU;

/// Rotate a plane vector by +90 degrees.
pub fn rot90(v: Vector2<f64>) -> Vector2<f64> {
    Vector2::new(-v.y, v.x)
}

pub(crate) fn theta_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| TAU * j as f64 / n as f64).collect()
}

pub(crate) fn pack(vs: &[Vector2<f64>]) -> Vec<Complex64> {
    vs.iter().map(|v| Complex64::new(v.x, v.y)).collect()
}

pub(crate) fn unpack(zs: &[Complex64]) -> Vec<Vector2<f64>> {
    zs.iter().map(|z| Vector2::new(z.re, z.im)).collect()
}

fn validate_grid(n: usize) -> Result<()> {
    if n < 8 || n % 2 != 0 {
        return Err(Error::BadGridSize(n));
    }
    Ok(())
}

/// A tangent field along a loop: one plane vector per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentField {
    vecs: Vec<Vector2<f64>>,
}

impl TangentField {
    pub fn new(vecs: Vec<Vector2<f64>>) -> Result<Self> {
        validate_grid(vecs.len())?;
        if vecs.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(TangentField { vecs })
    }

    pub fn zero(n: usize) -> Result<Self> {
        validate_grid(n)?;
        Ok(TangentField {
            vecs: vec![Vector2::zeros(); n],
        })
    }

    /// Sample `f(θ_j)` on the standard grid.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> Vector2<f64>) -> Result<Self> {
        validate_grid(n)?;
        Self::new(theta_grid(n).into_iter().map(f).collect())
    }

    pub fn n(&self) -> usize {
        self.vecs.len()
    }

    pub fn vecs(&self) -> &[Vector2<f64>] {
        &self.vecs
    }

    pub fn get(&self, j: usize) -> Vector2<f64> {
        self.vecs[j]
    }

    pub fn scaled(&self, a: f64) -> TangentField {
        TangentField {
            vecs: self.vecs.iter().map(|v| a * v).collect(),
        }
    }

    /// `self + a · other`.
    pub fn axpy(&self, a: f64, other: &TangentField) -> Result<TangentField> {
        same_grid(self.n(), other.n())?;
        Ok(TangentField {
            vecs: self
                .vecs
                .iter()
                .zip(&other.vecs)
                .map(|(u, v)| u + a * v)
                .collect(),
        })
    }

    pub fn sub(&self, other: &TangentField) -> Result<TangentField> {
        self.axpy(-1.0, other)
    }

    pub fn linf_norm(&self) -> f64 {
        self.vecs.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Spectral derivative in the curve parameter θ.
    pub fn derivative(&self) -> TangentField {
        TangentField {
            vecs: unpack(&spectral::derivative(&pack(&self.vecs))),
        }
    }

    /// Spectral second derivative in θ.
    pub fn second_derivative(&self) -> TangentField {
        TangentField {
            vecs: unpack(&spectral::second_derivative(&pack(&self.vecs))),
        }
    }
}

pub(crate) fn same_grid(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch(a, b));
    }
    Ok(())
}

/// A closed plane curve sampled on the uniform angular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopCurve {
    points: Vec<Vector2<f64>>,
}

impl LoopCurve {
    /// Validate and wrap a list of sample points.
    pub fn new(points: Vec<Vector2<f64>>) -> Result<Self> {
        validate_grid(points.len())?;
        if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(LoopCurve { points })
    }

    /// Sample `c(θ_j)` on the standard grid.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> Vector2<f64>) -> Result<Self> {
        validate_grid(n)?;
        Self::new(theta_grid(n).into_iter().map(f).collect())
    }

    /// Counterclockwise circle.
    pub fn circle(center: Vector2<f64>, radius: f64, n: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::NonPositiveRadius(radius));
        }
        Self::from_fn(n, |t| center + radius * Vector2::new(t.cos(), t.sin()))
    }

    /// Origin-centered axis-aligned ellipse `(a cos θ, b sin θ)`.
    pub fn ellipse(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::NonPositiveAxis(a));
        }
        if !(b > 0.0) {
            return Err(Error::NonPositiveAxis(b));
        }
        Self::from_fn(n, |t| Vector2::new(a * t.cos(), b * t.sin()))
    }

    /// The unit circle, i.e. the identity loop `θ ↦ (cos θ, sin θ)`.
    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, |t| Vector2::new(t.cos(), t.sin()))
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Vector2<f64>] {
        &self.points
    }

    pub fn point(&self, j: usize) -> Vector2<f64> {
        self.points[j]
    }

    pub fn theta(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n() as f64
    }

    pub fn linf_norm(&self) -> f64 {
        self.points.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// Pointwise `r · c`.
    pub fn scaled(&self, r: f64) -> Result<LoopCurve> {
        LoopCurve::new(self.points.iter().map(|p| r * p).collect())
    }

    /// `c + a · field`, the chart step used by descent methods.
    pub fn axpy(&self, a: f64, field: &TangentField) -> Result<LoopCurve> {
        same_grid(self.n(), field.n())?;
        LoopCurve::new(
            self.points
                .iter()
                .zip(field.vecs())
                .map(|(p, v)| p + a * v)
                .collect(),
        )
    }

    /// Difference of two loops on the same grid, as a tangent field.
    pub fn sub(&self, other: &LoopCurve) -> Result<TangentField> {
        same_grid(self.n(), other.n())?;
        TangentField::new(
            self.points
                .iter()
                .zip(&other.points)
                .map(|(p, q)| p - q)
                .collect(),
        )
    }

    /// The loop viewed as a tangent field (its own position vectors).
    pub fn as_field(&self) -> TangentField {
        TangentField {
            vecs: self.points.clone(),
        }
    }

    /// Spectral derivative `c′(θ_j)`.
    pub fn derivative(&self) -> TangentField {
        TangentField {
            vecs: unpack(&spectral::derivative(&pack(&self.points))),
        }
    }

    /// Pointwise speed `|c′(θ_j)|`.
    pub fn speed(&self) -> Vec<f64> {
        self.derivative().vecs().iter().map(|v| v.norm()).collect()
    }

    /// Default immersion threshold: `1e-8 ·` max speed.
    pub fn default_immersion_eps(&self) -> f64 {
        1e-8 * self.speed().into_iter().fold(0.0, f64::max)
    }

    /// True when the minimum speed exceeds `eps`.
    pub fn is_immersion(&self, eps: f64) -> bool {
        self.speed().into_iter().all(|s| s > eps)
    }

    pub(crate) fn require_immersion(&self) -> Result<Vec<f64>> {
        let sigma = self.speed();
        let eps = 1e-8 * sigma.iter().copied().fold(0.0, f64::max);
        if sigma.iter().any(|&s| !(s > eps)) {
            return Err(Error::NotImmersion);
        }
        Ok(sigma)
    }

    /// Total length `(2π/N) Σ_j |c′(θ_j)|`.
    pub fn arclength(&self) -> f64 {
        let n = self.n() as f64;
        TAU / n * self.speed().iter().sum::<f64>()
    }

    /// Unit tangent and leftward unit normal (tangent rotated by +90°).
    pub fn unit_tangent_normal(&self) -> Result<(TangentField, TangentField)> {
        let sigma = self.require_immersion()?;
        let deriv = self.derivative();
        let t: Vec<Vector2<f64>> = deriv
            .vecs()
            .iter()
            .zip(&sigma)
            .map(|(d, &s)| d / s)
            .collect();
        let nrm: Vec<Vector2<f64>> = t.iter().map(|v| rot90(*v)).collect();
        Ok((TangentField { vecs: t }, TangentField { vecs: nrm }))
    }

    /// Signed curvature `κ = (x′y″ − y′x″)/|c′|³`; positive for a
    /// counterclockwise circle.
    pub fn signed_curvature(&self) -> Result<Vec<f64>> {
        let sigma = self.require_immersion()?;
        let d1 = self.derivative();
        let d2 = d1.derivative();
        Ok(d1
            .vecs()
            .iter()
            .zip(d2.vecs())
            .zip(&sigma)
            .map(|((a, b), &s)| (a.x * b.y - a.y * b.x) / (s * s * s))
            .collect())
    }

    /// Relative speed non-uniformity `(max σ − min σ) / mean σ`.
    pub fn speed_nonuniformity(&self) -> f64 {
        let sigma = self.speed();
        let max = sigma.iter().copied().fold(f64::MIN, f64::max);
        let min = sigma.iter().copied().fold(f64::MAX, f64::min);
        let mean = sigma.iter().sum::<f64>() / sigma.len() as f64;
        if mean == 0.0 {
            f64::INFINITY
        } else {
            (max - min) / mean
        }
    }

    /// Reparametrize to (numerically) constant speed.  The cumulative
    /// arclength is inverted with a monotone cubic first guess polished by
    /// Newton on the spectral arclength interpolant; the curve itself is
    /// then re-evaluated trigonometrically.  The initial point stays fixed.
    pub fn resample_arclength(&self) -> Result<LoopCurve> {
        let n = self.n();
        let sigma = self.require_immersion()?;
        let sigma_c: Vec<Complex64> = sigma.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        let sigma_coeffs = spectral::forward(&sigma_c);
        let (mean, anti_vals) = spectral::antiderivative(&sigma_c);
        let anti_coeffs = spectral::forward(&anti_vals);
        let anti0 = anti_vals[0].re;
        let total = mean.re * TAU;
        let thetas = theta_grid(n);
        let mut s_nodes: Vec<f64> = thetas
            .iter()
            .zip(&anti_vals)
            .map(|(&t, a)| mean.re * t + a.re - anti0)
            .collect();
        s_nodes.push(total);
        let mut th_nodes = thetas.clone();
        th_nodes.push(TAU);
        if s_nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::NotImmersion);
        }
        let inverse_map = Pchip::new(s_nodes, th_nodes);
        let s_fun = |t: f64| mean.re * t + spectral::eval_at(&anti_coeffs, t).re - anti0;
        let sg_fun = |t: f64| spectral::eval_at(&sigma_coeffs, t).re;
        let curve_coeffs = spectral::forward(&pack(&self.points));
        let mut new_points = Vec::with_capacity(n);
        for k in 0..n {
            let target = total * k as f64 / n as f64;
            let mut t = inverse_map.eval(target);
            for _ in 0..30 {
                let slope = sg_fun(t);
                if !(slope > 0.0) {
                    break;
                }
                let dt = (s_fun(t) - target) / slope;
                t -= dt;
                if dt.abs() < 1e-14 * (1.0 + total) {
                    break;
                }
            }
            let z = spectral::eval_at(&curve_coeffs, t);
            new_points.push(Vector2::new(z.re, z.im));
        }
        LoopCurve::new(new_points)
    }

    /// Square-root velocity transform `q = c′ / √|c′|`.
    pub fn srvt(&self) -> Result<TangentField> {
        let sigma = self.require_immersion()?;
        let deriv = self.derivative();
        Ok(TangentField {
            vecs: deriv
                .vecs()
                .iter()
                .zip(&sigma)
                .map(|(d, &s)| d / s.sqrt())
                .collect(),
        })
    }
}

/// Reconstruct a loop from square-root velocity data: integrate `|q| q`
/// spectrally and anchor the result at `base`.  Errors when the integrand
/// has a nonzero mean, i.e. when `q` is not the transform of a closed
/// curve.
pub fn srvt_inverse(q: &TangentField, base: Vector2<f64>) -> Result<LoopCurve> {
    let w: Vec<Vector2<f64>> = q.vecs().iter().map(|v| v.norm() * v).collect();
    let max_w = w.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let (mean, anti) = spectral::antiderivative(&pack(&w));
    let tol = 1e-6 * max_w.max(f64::MIN_POSITIVE);
    if mean.norm() > tol {
        return Err(Error::SrvtNotClosed {
            mean: mean.norm(),
            tol,
        });
    }
    let anti0 = anti[0];
    LoopCurve::new(
        anti.iter()
            .map(|a| base + Vector2::new((a - anti0).re, (a - anti0).im))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constructor_rejects_bad_grids() {
        assert!(matches!(
            LoopCurve::new(vec![Vector2::zeros(); 7]),
            Err(Error::BadGridSize(7))
        ));
        assert!(matches!(
            LoopCurve::new(vec![Vector2::zeros(); 9]),
            Err(Error::BadGridSize(9))
        ));
        let mut pts = vec![Vector2::new(1.0, 0.0); 8];
        pts[3].y = f64::NAN;
        assert!(matches!(LoopCurve::new(pts), Err(Error::NonFinite)));
    }

    #[test]
    fn circle_geometry_is_exact() {
        let r = 1.7;
        let c = LoopCurve::circle(Vector2::new(0.3, -0.4), r, 64).unwrap();
        for s in c.speed() {
            assert_relative_eq!(s, r, max_relative = 1e-13);
        }
        assert_relative_eq!(c.arclength(), TAU * r, max_relative = 1e-13);
        for k in c.signed_curvature().unwrap() {
            assert_relative_eq!(k, 1.0 / r, max_relative = 1e-11);
        }
    }

    #[test]
    fn unit_circle_normal_points_inward() {
        let c = LoopCurve::identity(32).unwrap();
        let (t, nrm) = c.unit_tangent_normal().unwrap();
        for j in 0..c.n() {
            let th = c.theta(j);
            let te = Vector2::new(-th.sin(), th.cos());
            assert!((t.get(j) - te).norm() < 1e-12);
            // Leftward normal of a counterclockwise circle is -c.
            assert!((nrm.get(j) + c.point(j)).norm() < 1e-12);
        }
    }

    #[test]
    fn ellipse_arclength_matches_elliptic_integral() {
        // Perimeter of (2cosθ, sinθ): 8 E(3/4) with E the complete elliptic
        // integral of the second kind.
        let c = LoopCurve::ellipse(2.0, 1.0, 256).unwrap();
        assert_relative_eq!(c.arclength(), 9.688448220547675, max_relative = 1e-12);
    }

    #[test]
    fn ellipse_curvature_at_axes() {
        let c = LoopCurve::ellipse(2.0, 1.0, 64).unwrap();
        let k = c.signed_curvature().unwrap();
        assert_relative_eq!(k[0], 2.0, max_relative = 1e-11);
        assert_relative_eq!(k[16], 0.25, max_relative = 1e-11);
    }

    #[test]
    fn degenerate_curve_is_not_an_immersion() {
        let c = LoopCurve::from_fn(32, |t| Vector2::new(t.cos().powi(2), 0.0)).unwrap();
        assert!(!c.is_immersion(c.default_immersion_eps()));
        assert!(matches!(c.signed_curvature(), Err(Error::NotImmersion)));
    }

    #[test]
    fn resample_makes_speed_uniform_and_keeps_length() {
        let c = LoopCurve::ellipse(2.0, 1.0, 256).unwrap();
        let r = c.resample_arclength().unwrap();
        assert!(r.speed_nonuniformity() < 1e-9);
        assert_relative_eq!(r.arclength(), c.arclength(), max_relative = 1e-11);
        assert!((r.point(0) - c.point(0)).norm() < 1e-12);
        // Resampled points still lie on the ellipse.
        for p in r.points() {
            let residual = (p.x / 2.0).powi(2) + p.y.powi(2) - 1.0;
            assert!(residual.abs() < 1e-9, "off-ellipse residual {residual}");
        }
    }

    #[test]
    fn srvt_of_circle_has_speed_norm() {
        let r = 2.25;
        let c = LoopCurve::circle(Vector2::zeros(), r, 32).unwrap();
        let q = c.srvt().unwrap();
        for v in q.vecs() {
            assert_relative_eq!(v.norm(), r.sqrt(), max_relative = 1e-12);
        }
    }

    #[test]
    fn srvt_roundtrip_recovers_curve() {
        let c = LoopCurve::from_fn(64, |t| {
            Vector2::new(t.cos() + 0.3 * (2.0 * t).cos(), 1.2 * t.sin() - 0.1 * (3.0 * t).sin())
        })
        .unwrap();
        let q = c.srvt().unwrap();
        let back = srvt_inverse(&q, c.point(0)).unwrap();
        for (p, b) in c.points().iter().zip(back.points()) {
            assert!((p - b).norm() < 1e-12);
        }
    }

    #[test]
    fn srvt_inverse_rejects_open_data() {
        let q = TangentField::from_fn(32, |_| Vector2::new(1.0, 0.0)).unwrap();
        assert!(matches!(
            srvt_inverse(&q, Vector2::zeros()),
            Err(Error::SrvtNotClosed { .. })
        ));
    }

    #[test]
    fn axpy_walks_along_fields() {
        let c = LoopCurve::identity(16).unwrap();
        let v = TangentField::from_fn(16, |t| Vector2::new(t.cos(), t.sin())).unwrap();
        let moved = c.axpy(-0.5, &v).unwrap();
        for (p, q) in moved.points().iter().zip(c.points()) {
            assert!((p - 0.5 * q).norm() < 1e-15);
        }
    }
}
