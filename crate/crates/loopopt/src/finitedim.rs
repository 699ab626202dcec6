//! Finite-dimensional truncations: weighted sequence metrics, Christoffel
//! solves, and geodesic-spray diagnostics.
//!
//! A metric is a black-box evaluator `(x, u, w) ↦ g_x(u, w)`.  The
//! Christoffel action is recovered from first derivatives of the metric by
//! solving the Gram system
//!
//! `G(x) Γ = rhs`, `rhs_i = ½ ∂_{e_i} g(v, v) − ∂_v g(v, e_i)`,
//!
//! with all directional derivatives by central differences.  The sign
//! convention makes `Γ` the geodesic acceleration: `ẍ = Γ(x, ẋ)`, and the
//! covariant derivative is `∇_X Y = dY·X − B(X, Y)` with `B` the
//! polarization of `Γ`.
//!
//! The *twisted* family `g_p(x, y) = e^{−‖p‖²} Σ_n x_n y_n / n³` is the
//! running example of a merely-weak metric: its Riesz factors `n³` are
//! unbounded, and the Christoffel action blows up with the truncation
//! dimension when probed at a point with full support.

use crate::error::{Error, Result};
use nalgebra::DVector;

type MetricEval = Box<dyn Fn(&DVector<f64>, &DVector<f64>, &DVector<f64>) -> f64>;

/// A finite-dimensional Riemannian metric given by an evaluator.
pub struct FiniteMetric {
    dim: usize,
    eval: MetricEval,
}

impl FiniteMetric {
    pub fn new(dim: usize, eval: MetricEval) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(FiniteMetric { dim, eval })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Evaluate `g_x(u, w)` with dimension checks.
    pub fn eval(&self, x: &DVector<f64>, u: &DVector<f64>, w: &DVector<f64>) -> Result<f64> {
        for v in [x, u, w] {
            if v.len() != self.dim {
                return Err(Error::DimensionMismatch(v.len(), self.dim));
            }
        }
        Ok((self.eval)(x, u, w))
    }

    /// The flat Euclidean metric.
    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::new(dim, Box::new(|_x, u, w| u.dot(w)))
    }

    /// The twisted weak metric `e^{−‖x‖²} Σ_n u_n w_n / n³`.
    pub fn twisted(dim: usize) -> Result<Self> {
        Self::new(
            dim,
            Box::new(|x, u, w| {
                let mut s = 0.0;
                for n in 0..u.len() {
                    let cube = ((n + 1) * (n + 1) * (n + 1)) as f64;
                    s += u[n] * w[n] / cube;
                }
                (-x.norm_squared()).exp() * s
            }),
        )
    }

    /// The conformally flat metric `e^{2 x₁} ⟨u, w⟩`, whose spray is known
    /// in closed form and serves as an oracle.
    pub fn conformal_x1(dim: usize) -> Result<Self> {
        Self::new(dim, Box::new(|x, u, w| (2.0 * x[0]).exp() * u.dot(w)))
    }
}

/// Twisted inner product as a free function.
pub fn twisted_inner(p: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    FiniteMetric::twisted(p.len())?.eval(p, x, y)
}

/// Riesz lift under the twisted metric: the gradient whose twisted inner
/// product with `e_n` equals `df_n`, namely `e^{‖p‖²} n³ df_n`.
pub fn twisted_gradient(p: &DVector<f64>, df: &DVector<f64>) -> Result<DVector<f64>> {
    if p.len() != df.len() {
        return Err(Error::DimensionMismatch(p.len(), df.len()));
    }
    let scale = p.norm_squared().exp();
    Ok(DVector::from_fn(df.len(), |n, _| {
        scale * ((n + 1) * (n + 1) * (n + 1)) as f64 * df[n]
    }))
}

/// Default finite-difference step: `1e-5 (1 + ‖x‖)`.
pub fn default_fd_step(x: &DVector<f64>) -> f64 {
    1e-5 * (1.0 + x.norm())
}

/// Christoffel action and Gram conditioning at a point.
#[derive(Debug, Clone)]
pub struct ChristoffelResult {
    /// `Γ(x, v)`, the geodesic acceleration.
    pub gamma: DVector<f64>,
    /// Spectral condition number of the Gram matrix `g_x(e_i, e_j)`.
    pub gram_condition: f64,
}

/// Directional derivative of `x ↦ g_x(a, b)` along `h` by central
/// differences with parameter step `t`.
fn d1g(
    g: &FiniteMetric,
    x: &DVector<f64>,
    a: &DVector<f64>,
    b: &DVector<f64>,
    h: &DVector<f64>,
    t: f64,
) -> Result<f64> {
    let xp = x + t * h;
    let xm = x - t * h;
    Ok((g.eval(&xp, a, b)? - g.eval(&xm, a, b)?) / (2.0 * t))
}

/// Solve for the Christoffel action `Γ(x, v)` from metric derivatives.
pub fn christoffel_solve(
    g: &FiniteMetric,
    x: &DVector<f64>,
    v: &DVector<f64>,
    fd_step: f64,
) -> Result<ChristoffelResult> {
    if !(fd_step > 0.0) {
        return Err(Error::NonPositiveStep);
    }
    let d = g.dim();
    if x.len() != d || v.len() != d {
        return Err(Error::DimensionMismatch(x.len().max(v.len()), d));
    }
    let mut gram = nalgebra::DMatrix::zeros(d, d);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(d);
    for i in 0..d {
        let mut e = DVector::zeros(d);
        e[i] = 1.0;
        basis.push(e);
    }
    for i in 0..d {
        for j in i..d {
            let val = g.eval(x, &basis[i], &basis[j])?;
            gram[(i, j)] = val;
            gram[(j, i)] = val;
        }
    }
    let eig = gram.clone().symmetric_eigen();
    let max_ev = eig.eigenvalues.iter().copied().fold(f64::MIN, f64::max);
    let min_ev = eig.eigenvalues.iter().copied().fold(f64::MAX, f64::min);
    if !(min_ev > 0.0) {
        return Err(Error::GramNotSpd);
    }
    let gram_condition = max_ev / min_ev;
    let mut rhs = DVector::zeros(d);
    for i in 0..d {
        rhs[i] = 0.5 * d1g(g, x, v, v, &basis[i], fd_step)? - d1g(g, x, v, &basis[i], v, fd_step)?;
    }
    let chol = gram.cholesky().ok_or(Error::GramNotSpd)?;
    Ok(ChristoffelResult {
        gamma: chol.solve(&rhs),
        gram_condition,
    })
}

/// Symmetric bilinear spray form by polarization:
/// `B(u, w) = (Γ(x, u+w) − Γ(x, u−w)) / 4`.
pub fn spray_quadratic(
    g: &FiniteMetric,
    x: &DVector<f64>,
    u: &DVector<f64>,
    w: &DVector<f64>,
    fd_step: f64,
) -> Result<DVector<f64>> {
    let plus = christoffel_solve(g, x, &(u + w), fd_step)?.gamma;
    let minus = christoffel_solve(g, x, &(u - w), fd_step)?.gamma;
    Ok((plus - minus) / 4.0)
}

/// Residual of metric compatibility
/// `X·g(Y,Z) − g(∇_X Y, Z) − g(Y, ∇_X Z)` at `x`, with
/// `∇_X Y = dY·X − B(X, Y)` and all derivatives by central differences.
pub fn metric_compat_check(
    g: &FiniteMetric,
    x: &DVector<f64>,
    x_field: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    y_field: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    z_field: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    fd_step: f64,
) -> Result<f64> {
    if !(fd_step > 0.0) {
        return Err(Error::NonPositiveStep);
    }
    let xx = x_field(x);
    let yx = y_field(x);
    let zx = z_field(x);
    let t = fd_step;
    let xp = x + t * &xx;
    let xm = x - t * &xx;
    let lhs = (g.eval(&xp, &y_field(&xp), &z_field(&xp))?
        - g.eval(&xm, &y_field(&xm), &z_field(&xm))?)
        / (2.0 * t);
    let dy = (y_field(&xp) - y_field(&xm)) / (2.0 * t);
    let dz = (z_field(&xp) - z_field(&xm)) / (2.0 * t);
    let cov_y = dy - spray_quadratic(g, x, &xx, &yx, fd_step)?;
    let cov_z = dz - spray_quadratic(g, x, &xx, &zx, fd_step)?;
    let rhs = g.eval(x, &cov_y, &zx)? + g.eval(x, &yx, &cov_z)?;
    Ok((lhs - rhs).abs())
}

/// Base point for the growth sweep: the tail sequence `x_n = 1/(2n)`.
/// Unlike coordinate-axis points, it has full support, so every weight of
/// the twisted metric contributes and the Christoffel action grows with
/// the dimension.
pub fn twisted_tail_point(dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |n, _| 0.5 / (n + 1) as f64)
}

/// Growth of the twisted Christoffel action across truncation dimensions.
#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub dims: Vec<usize>,
    /// `max_n |Γ(x₀, e_n)|` per dimension.
    pub max_gamma: Vec<f64>,
    /// Gram condition numbers encountered, per dimension.
    pub gram_conditions: Vec<f64>,
}

/// Probe `max_n |Γ(x₀, e_n)|` for the twisted metric at the tail point,
/// for each requested dimension.
pub fn christoffel_growth(dims: &[usize]) -> Result<GrowthReport> {
    let mut max_gamma = Vec::with_capacity(dims.len());
    let mut gram_conditions = Vec::with_capacity(dims.len());
    for &d in dims {
        let g = FiniteMetric::twisted(d)?;
        let x0 = twisted_tail_point(d);
        let step = default_fd_step(&x0);
        let mut best = 0.0f64;
        let mut cond = 0.0f64;
        for n in 0..d {
            let mut e = DVector::zeros(d);
            e[n] = 1.0;
            let res = christoffel_solve(&g, &x0, &e, step)?;
            best = best.max(res.gamma.norm());
            cond = cond.max(res.gram_condition);
        }
        max_gamma.push(best);
        gram_conditions.push(cond);
    }
    Ok(GrowthReport {
        dims: dims.to_vec(),
        max_gamma,
        gram_conditions,
    })
}

/// Closed-form twisted Christoffel action, used as the oracle in tests:
/// `Γ(x, v) = 2⟨x, v⟩ v − ‖v‖²_W (n³ x_n)_n` with `‖v‖²_W = Σ v_n²/n³`.
pub fn twisted_gamma_closed_form(x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let mut vw = 0.0;
    for n in 0..v.len() {
        vw += v[n] * v[n] / ((n + 1) * (n + 1) * (n + 1)) as f64;
    }
    let xv = x.dot(v);
    DVector::from_fn(x.len(), |n, _| {
        2.0 * xv * v[n] - vw * ((n + 1) * (n + 1) * (n + 1)) as f64 * x[n]
    })
}
