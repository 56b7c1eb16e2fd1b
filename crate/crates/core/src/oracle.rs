//! Composite objectives `f = g + l` and derivative checks.
//!
//! `g` is smooth and exposed through values, gradients and Hessian-vector
//! products; `l` is a simple convex term that is only ever touched through its
//! value and its proximal map.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::Vector;

/// A simple (prox-friendly) convex term `l`.
pub trait SimpleConvexTerm: Send + Sync {
    fn value(&self, x: &Vector) -> f64;

    /// `argmin_x { l(x) + (1/(2t)) ||x - y||^2 }`, `t > 0`.
    fn prox(&self, y: &Vector, t: f64) -> Vector;

    /// Distance from `-grad` to the subdifferential of `l` at `x`, i.e. the
    /// norm of the minimum-norm element of `grad + ∂l(x)`.
    fn stationarity(&self, x: &Vector, grad: &Vector) -> f64;
}

/// `l(x) = weight * ||x||_1`.
#[derive(Debug, Clone, Copy)]
pub struct L1Norm {
    pub weight: f64,
}

impl L1Norm {
    pub fn new(weight: f64) -> Self {
        L1Norm { weight }
    }
}

pub fn soft_threshold(v: f64, thresh: f64) -> f64 {
    if v > thresh {
        v - thresh
    } else if v < -thresh {
        v + thresh
    } else {
        0.0
    }
}

impl SimpleConvexTerm for L1Norm {
    fn value(&self, x: &Vector) -> f64 {
        self.weight * x.iter().map(|v| v.abs()).sum::<f64>()
    }

    fn prox(&self, y: &Vector, t: f64) -> Vector {
        let thresh = self.weight * t;
        y.map(|v| soft_threshold(v, thresh))
    }

    fn stationarity(&self, x: &Vector, grad: &Vector) -> f64 {
        x.iter()
            .zip(grad.iter())
            .map(|(&xi, &gi)| {
                let r = if xi > 0.0 {
                    gi + self.weight
                } else if xi < 0.0 {
                    gi - self.weight
                } else {
                    soft_threshold(gi, self.weight)
                };
                r * r
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// The composite objective oracle every solver consumes.
///
/// Implementations must be free of interior mutability so one oracle can be
/// shared by several solver instances across threads.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    /// Highest derivative order of `g` this oracle can serve.
    fn smooth_order(&self) -> usize;

    /// `g(x)`.
    fn smooth_value(&self, x: &Vector) -> f64;

    /// `∇g(x)`.
    fn gradient(&self, x: &Vector) -> Vector;

    /// `∇²g(x) v`.
    fn hess_vec(&self, _x: &Vector, _v: &Vector) -> Result<Vector> {
        Err(Error::UnsupportedOrder {
            requested: 2,
            available: self.smooth_order(),
        })
    }

    /// Dense `∇²g(x)` when the implementation has a cheap one.
    fn dense_hessian(&self, _x: &Vector) -> Option<DMatrix<f64>> {
        None
    }

    /// The non-smooth part `l`; `None` means `l ≡ 0`.
    fn composite(&self) -> Option<&dyn SimpleConvexTerm> {
        None
    }

    /// `f(x) = g(x) + l(x)`.
    fn value(&self, x: &Vector) -> f64 {
        let g = self.smooth_value(x);
        match self.composite() {
            Some(l) => g + l.value(x),
            None => g,
        }
    }
}

/// Builds `∇²g(x)` column by column from Hessian-vector products. Intended
/// for the small-dimension exact subsolver only.
pub fn dense_hessian_from_products(oracle: &dyn Objective, x: &Vector) -> Result<DMatrix<f64>> {
    if let Some(h) = oracle.dense_hessian(x) {
        return Ok(h);
    }
    let d = oracle.dim();
    let mut h = DMatrix::zeros(d, d);
    let mut e = Vector::zeros(d);
    for j in 0..d {
        e[j] = 1.0;
        let col = oracle.hess_vec(x, &e)?;
        h.set_column(j, &col);
        e[j] = 0.0;
    }
    // symmetrize away round-off
    let ht = h.transpose();
    Ok((h + ht) * 0.5)
}

fn check_dim(oracle: &dyn Objective, x: &Vector) -> Result<()> {
    if oracle.dim() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: oracle.dim(),
            got: x.len(),
        });
    }
    Ok(())
}

fn all_finite(v: &Vector) -> bool {
    v.iter().all(|c| c.is_finite())
}

/// Step used by the gradient check: `max(1, ||x||_inf) * eps^(1/3)`.
pub fn gradient_fd_step(x: &Vector) -> f64 {
    x.amax().max(1.0) * f64::EPSILON.cbrt()
}

/// Step used by the Hessian-vector check: `max(1, ||x||_inf) * eps^(1/2)`,
/// divided by `||v||` so the probe length does not depend on the scale of `v`.
pub fn hess_fd_step(x: &Vector, v: &Vector) -> f64 {
    let vn = v.norm().max(f64::MIN_POSITIVE);
    x.amax().max(1.0) * f64::EPSILON.sqrt() / vn
}

/// Compares `∇g(x)` against central differences of `g`.
///
/// Returns `Ok(true)` when the largest coordinate-wise relative error is below
/// `tol`. Non-finite oracle output surfaces as [`Error::Evaluation`].
pub fn check_gradient(oracle: &dyn Objective, x: &Vector, tol: f64) -> Result<bool> {
    check_dim(oracle, x)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig("tolerance must be positive".into()));
    }
    let grad = oracle.gradient(x);
    if !all_finite(&grad) {
        return Err(Error::Evaluation { what: "gradient" });
    }
    if !oracle.smooth_value(x).is_finite() {
        return Err(Error::Evaluation { what: "value" });
    }
    let h = gradient_fd_step(x);
    let mut probe = x.clone();
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        let xi = x[i];
        probe[i] = xi + h;
        let fp = oracle.smooth_value(&probe);
        probe[i] = xi - h;
        let fm = oracle.smooth_value(&probe);
        probe[i] = xi;
        if !fp.is_finite() || !fm.is_finite() {
            return Err(Error::Evaluation { what: "value" });
        }
        let fd = (fp - fm) / (2.0 * h);
        let rel = (grad[i] - fd).abs() / grad[i].abs().max(1.0);
        worst = worst.max(rel);
    }
    Ok(worst < tol)
}

/// Compares `∇²g(x) v` against central differences of `∇g` along `v`.
pub fn check_hess_vec(oracle: &dyn Objective, x: &Vector, v: &Vector, tol: f64) -> Result<bool> {
    check_dim(oracle, x)?;
    check_dim(oracle, v)?;
    if oracle.smooth_order() < 2 {
        return Err(Error::UnsupportedOrder {
            requested: 2,
            available: oracle.smooth_order(),
        });
    }
    let hv = oracle.hess_vec(x, v)?;
    if !all_finite(&hv) {
        return Err(Error::Evaluation {
            what: "Hessian-vector product",
        });
    }
    let h = hess_fd_step(x, v);
    let gp = oracle.gradient(&(x + v * h));
    let gm = oracle.gradient(&(x - v * h));
    if !all_finite(&gp) || !all_finite(&gm) {
        return Err(Error::Evaluation { what: "gradient" });
    }
    let fd = (gp - gm) / (2.0 * h);
    let err = (&hv - fd).norm() / hv.norm().max(1.0);
    Ok(err < tol)
}
