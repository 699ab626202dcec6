//! Weak Riemannian metrics on the space of discretized loops.
//!
//! Four inner products are provided:
//!
//! * `FlatL2` — the parameter-space product `(2π/N) Σ ⟨u_j, v_j⟩`,
//! * `InvariantL2` — the arclength-weighted product with density `|c′|`,
//! * `InvariantH1` — invariant L² of the fields plus invariant L² of their
//!   arclength derivatives,
//! * `ElasticSrvt` — the flat product of square-root-velocity pushforwards.
//!
//! [`riesz`] converts a flat representer `w` (defined by
//! `df(v) = (2π/N) Σ ⟨w_j, v_j⟩`) into the gradient with respect to the
//! chosen metric: identity for `FlatL2`, a pointwise division for
//! `InvariantL2`, a per-component symmetric positive definite solve (with a
//! Fourier fast path on uniform-speed grids) for `InvariantH1`, and a
//! rank-deficient least-squares solve for `ElasticSrvt`, whose pushforward
//! annihilates constant and Nyquist-alternating fields; representers with
//! weight on those directions are rejected as incompatible.

use crate::error::{Error, Result};
use crate::loopspace::{pack, same_grid, unpack, LoopCurve, TangentField};
use crate::spectral;
use nalgebra::{DMatrix, DVector, Vector2};
use rustfft::num_complex::Complex64;
use std::f64::consts::TAU;

/// Which Riemannian structure to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    FlatL2,
    InvariantL2,
    InvariantH1,
    ElasticSrvt,
}

impl MetricKind {
    /// All metrics, in a fixed reporting order.
    pub const ALL: [MetricKind; 4] = [
        MetricKind::FlatL2,
        MetricKind::InvariantL2,
        MetricKind::InvariantH1,
        MetricKind::ElasticSrvt,
    ];

    /// Whether evaluating the metric needs `c` to be an immersion.
    pub fn requires_immersion(self) -> bool {
        !matches!(self, MetricKind::FlatL2)
    }

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::FlatL2 => "flat-l2",
            MetricKind::InvariantL2 => "inv-l2",
            MetricKind::InvariantH1 => "inv-h1",
            MetricKind::ElasticSrvt => "elastic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "flat-l2" => Ok(MetricKind::FlatL2),
            "inv-l2" => Ok(MetricKind::InvariantL2),
            "inv-h1" => Ok(MetricKind::InvariantH1),
            "elastic" => Ok(MetricKind::ElasticSrvt),
            other => Err(Error::Parse(format!("unknown metric `{other}`"))),
        }
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Quadrature weight `2π/N`.
fn weight(n: usize) -> f64 {
    TAU / n as f64
}

/// Flat L² pairing of two fields on an `n`-point grid.
pub(crate) fn flat_pairing(u: &TangentField, v: &TangentField) -> Result<f64> {
    same_grid(u.n(), v.n())?;
    let s: f64 = u
        .vecs()
        .iter()
        .zip(v.vecs())
        .map(|(a, b)| a.x * b.x + a.y * b.y)
        .sum();
    Ok(weight(u.n()) * s)
}

/// Inner product of tangent fields `u, v` at the loop `c`.
pub fn inner(kind: MetricKind, c: &LoopCurve, u: &TangentField, v: &TangentField) -> Result<f64> {
    same_grid(c.n(), u.n())?;
    same_grid(c.n(), v.n())?;
    match kind {
        MetricKind::FlatL2 => flat_pairing(u, v),
        MetricKind::InvariantL2 => {
            let sigma = c.require_immersion()?;
            let s: f64 = u
                .vecs()
                .iter()
                .zip(v.vecs())
                .zip(&sigma)
                .map(|((a, b), &s)| (a.x * b.x + a.y * b.y) * s)
                .sum();
            Ok(weight(c.n()) * s)
        }
        MetricKind::InvariantH1 => {
            let sigma = c.require_immersion()?;
            let du = u.derivative();
            let dv = v.derivative();
            let mut s = 0.0;
            for j in 0..c.n() {
                let a = u.get(j);
                let b = v.get(j);
                let da = du.get(j);
                let db = dv.get(j);
                let sg = sigma[j];
                // σ⟨u,v⟩ + ⟨u′,v′⟩/σ, the second term being σ⟨u_s, v_s⟩.
                s += (a.x * b.x + a.y * b.y) * sg + (da.x * db.x + da.y * db.y) / sg;
            }
            Ok(weight(c.n()) * s)
        }
        MetricKind::ElasticSrvt => {
            let pu = srvt_pushforward(c, u)?;
            let pv = srvt_pushforward(c, v)?;
            flat_pairing(&pu, &pv)
        }
    }
}

/// Metric norm `√g_c(u,u)`.
pub fn norm(kind: MetricKind, c: &LoopCurve, u: &TangentField) -> Result<f64> {
    Ok(inner(kind, c, u, u)?.max(0.0).sqrt())
}

/// Differential of the square-root velocity transform at `c` applied to
/// `u`: `u′/√σ − (⟨u′, c′⟩ / 2σ^{5/2}) c′`.
pub fn srvt_pushforward(c: &LoopCurve, u: &TangentField) -> Result<TangentField> {
    same_grid(c.n(), u.n())?;
    let sigma = c.require_immersion()?;
    let cd = c.derivative();
    let ud = u.derivative();
    let mut out = Vec::with_capacity(c.n());
    for j in 0..c.n() {
        let s = sigma[j];
        let cdj = cd.get(j);
        let udj = ud.get(j);
        let along = udj.dot(&cdj) / (2.0 * s.powf(2.5));
        out.push(udj / s.sqrt() - along * cdj);
    }
    TangentField::new(out)
}

/// Spectral differentiation matrix, built column-by-column so it is
/// bit-consistent with the FFT derivative (including the zeroed Nyquist).
fn diff_matrix(n: usize) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(n, n);
    for k in 0..n {
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[k] = Complex64::new(1.0, 0.0);
        let col = spectral::derivative(&e);
        for j in 0..n {
            d[(j, k)] = col[j].re;
        }
    }
    d
}

/// Solve `g_c(u, ·) = (2π/N) Σ ⟨w_j, ·⟩` for `u`, i.e. convert the flat
/// representer `w` of a differential into the metric gradient.
pub fn riesz(kind: MetricKind, c: &LoopCurve, w: &TangentField) -> Result<TangentField> {
    same_grid(c.n(), w.n())?;
    match kind {
        MetricKind::FlatL2 => Ok(w.clone()),
        MetricKind::InvariantL2 => {
            let sigma = c.require_immersion()?;
            TangentField::new(
                w.vecs()
                    .iter()
                    .zip(&sigma)
                    .map(|(v, &s)| v / s)
                    .collect(),
            )
        }
        MetricKind::InvariantH1 => riesz_h1(c, w),
        MetricKind::ElasticSrvt => riesz_elastic(c, w),
    }
}

fn riesz_h1(c: &LoopCurve, w: &TangentField) -> Result<TangentField> {
    let sigma = c.require_immersion()?;
    let n = c.n();
    if c.speed_nonuniformity() <= 1e-10 {
        // Uniform speed: the operator σ − (1/σ)∂_θ² is diagonal in Fourier.
        let sbar = sigma.iter().sum::<f64>() / n as f64;
        let mut coeffs = spectral::forward(&pack(w.vecs()));
        for (j, z) in coeffs.iter_mut().enumerate() {
            let denom = if j == n / 2 {
                // The Nyquist mode is annihilated by differentiation, so
                // only the zeroth-order term survives.
                sbar
            } else {
                let m = spectral::signed_mode(n, j) as f64;
                sbar * (1.0 + (m / sbar) * (m / sbar))
            };
            *z /= denom;
        }
        return TangentField::new(unpack(&spectral::inverse(&coeffs)));
    }
    let d = diff_matrix(n);
    // A = Dᵀ diag(1/σ) D + diag(σ): scale the rows of D by 1/σ before the
    // product.
    let mut scaled = d.clone();
    for (j, mut row) in scaled.row_iter_mut().enumerate() {
        row /= sigma[j];
    }
    let mut a = d.transpose() * scaled;
    for j in 0..n {
        a[(j, j)] += sigma[j];
    }
    let chol = a.cholesky().ok_or(Error::GramNotSpd)?;
    let wx = DVector::from_iterator(n, w.vecs().iter().map(|v| v.x));
    let wy = DVector::from_iterator(n, w.vecs().iter().map(|v| v.y));
    let ux = chol.solve(&wx);
    let uy = chol.solve(&wy);
    TangentField::new((0..n).map(|j| Vector2::new(ux[j], uy[j])).collect())
}

fn stack(f: &TangentField) -> DVector<f64> {
    let n = f.n();
    DVector::from_fn(2 * n, |i, _| {
        if i < n {
            f.get(i).x
        } else {
            f.get(i - n).y
        }
    })
}

fn unstack(v: &DVector<f64>) -> Result<TangentField> {
    let n = v.len() / 2;
    TangentField::new((0..n).map(|j| Vector2::new(v[j], v[n + j])).collect())
}

/// Orthonormal basis of the discrete kernel of the SRVT pushforward:
/// constant fields and Nyquist-alternating fields, per component.
fn elastic_kernel_basis(n: usize) -> DMatrix<f64> {
    let mut z = DMatrix::zeros(2 * n, 4);
    let inv = 1.0 / (n as f64).sqrt();
    for j in 0..n {
        let alt = if j % 2 == 0 { inv } else { -inv };
        z[(j, 0)] = inv;
        z[(n + j, 1)] = inv;
        z[(j, 2)] = alt;
        z[(n + j, 3)] = alt;
    }
    z
}

fn riesz_elastic(c: &LoopCurve, w: &TangentField) -> Result<TangentField> {
    let n = c.n();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for col in 0..2 * n {
        let mut basis = vec![Vector2::zeros(); n];
        if col < n {
            basis[col].x = 1.0;
        } else {
            basis[col - n].y = 1.0;
        }
        let p = srvt_pushforward(c, &TangentField::new(basis)?)?;
        for j in 0..n {
            m[(j, col)] = p.get(j).x;
            m[(n + j, col)] = p.get(j).y;
        }
    }
    let ws = stack(w);
    let z = elastic_kernel_basis(n);
    let wnorm = ws.norm().max(f64::MIN_POSITIVE);
    let kernel_weight = (z.transpose() * &ws).amax() / wnorm;
    if kernel_weight > 1e-6 {
        return Err(Error::ElasticIncompatible(kernel_weight));
    }
    let g = m.transpose() * &m;
    let tau = g.trace() / (2 * n) as f64;
    let a = &g + tau * (&z * z.transpose());
    let chol = a.cholesky().ok_or(Error::GramNotSpd)?;
    let mut u = chol.solve(&ws);
    // Remove any kernel component introduced by the regularization.
    u -= &z * (z.transpose() * &u);
    unstack(&u)
}
