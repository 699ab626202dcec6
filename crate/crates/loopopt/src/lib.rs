//! Desk-scale numerical toolkit for optimization on weak Riemannian
//! manifolds: discretized loops of plane curves with a family of metrics
//! (flat L², invariant L², invariant H¹, elastic/SRVT), Riemannian
//! gradients and Hessian actions, gradient descent with convergence
//! verification, second-order diagnostics, and finite-dimensional
//! geodesic-spray checks for metrics of varying regularity.

pub mod diagnostics;
pub mod error;
pub mod finitedim;
pub mod interp;
pub mod io;
pub mod loopspace;
pub mod metrics;
pub mod objectives;
pub mod optimizer;
pub mod probes;
pub mod secondorder;
mod spectral;

pub use error::{Error, Result};
pub use loopspace::{srvt_inverse, LoopCurve, TangentField};
pub use metrics::MetricKind;
pub use objectives::Objective;
