//! Lower linear models and Taylor models of a composite objective.
//!
//! For `f = g + l` and an expansion point `y`:
//!
//! * the lower model is `g(y) + <∇g(y), x - y> + l(x)`, a global minorant of
//!   `f` when `g` is convex;
//! * the order-`p` Taylor model is `g(y) + Σ_{i≤p} ∇^i g(y)[x - y]^i / i! + l(x)`.
//!
//! Only `p ∈ {1, 2}` models are materialized. The composite part is carried
//! along untouched.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::oracle::{dense_hessian_from_products, Objective, SimpleConvexTerm};
use crate::problems::SparseDataset;
use crate::Vector;

/// `g(y) + <∇g(y), x - y> + l(x)`.
pub struct LowerModel<'a> {
    pub center: Vector,
    pub g_at_center: f64,
    pub grad_at_center: Vector,
    composite: Option<&'a dyn SimpleConvexTerm>,
}

impl<'a> LowerModel<'a> {
    pub fn new(oracle: &'a dyn Objective, y: &Vector) -> Self {
        LowerModel {
            center: y.clone(),
            g_at_center: oracle.smooth_value(y),
            grad_at_center: oracle.gradient(y),
            composite: oracle.composite(),
        }
    }

    pub fn evaluate(&self, x: &Vector) -> f64 {
        let lin = self.g_at_center + self.grad_at_center.dot(&(x - &self.center));
        match self.composite {
            Some(l) => lin + l.value(x),
            None => lin,
        }
    }
}

/// Order-1 or order-2 Taylor model of `g` around `center`, plus `l`.
pub struct TaylorModel<'a> {
    pub center: Vector,
    pub order: usize,
    pub g_at_center: f64,
    pub grad_at_center: Vector,
    oracle: &'a dyn Objective,
}

impl<'a> TaylorModel<'a> {
    pub fn composite(&self) -> Option<&'a dyn SimpleConvexTerm> {
        self.oracle.composite()
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `∇²g(center) v`; only meaningful for order-2 models.
    pub fn hess_vec(&self, v: &Vector) -> Result<Vector> {
        if self.order < 2 {
            return Err(Error::UnsupportedOrder {
                requested: 2,
                available: self.order,
            });
        }
        self.oracle.hess_vec(&self.center, v)
    }

    /// Dense `∇²g(center)`, built from products when the oracle has no
    /// cheaper route.
    pub fn dense_hessian(&self) -> Result<DMatrix<f64>> {
        if self.order < 2 {
            return Err(Error::UnsupportedOrder {
                requested: 2,
                available: self.order,
            });
        }
        dense_hessian_from_products(self.oracle, &self.center)
    }

    /// The smooth part of the model at `x` (without `l`).
    pub fn smooth_value(&self, x: &Vector) -> Result<f64> {
        let u = x - &self.center;
        let mut val = self.g_at_center + self.grad_at_center.dot(&u);
        if self.order >= 2 {
            val += 0.5 * u.dot(&self.hess_vec(&u)?);
        }
        Ok(val)
    }

    /// Full model value `g̃(x; y) + l(x)`.
    pub fn evaluate(&self, x: &Vector) -> Result<f64> {
        let smooth = self.smooth_value(x)?;
        Ok(match self.composite() {
            Some(l) => smooth + l.value(x),
            None => smooth,
        })
    }

    /// Gradient of the smooth part of the model at `x`.
    pub fn gradient(&self, x: &Vector) -> Result<Vector> {
        let mut grad = self.grad_at_center.clone();
        if self.order >= 2 {
            let u = x - &self.center;
            grad += self.hess_vec(&u)?;
        }
        Ok(grad)
    }
}

/// Builds the order-`p` Taylor model of `oracle` at `y`.
pub fn build_taylor<'a>(oracle: &'a dyn Objective, y: &Vector, p: usize) -> Result<TaylorModel<'a>> {
    if y.len() != oracle.dim() {
        return Err(Error::DimensionMismatch {
            expected: oracle.dim(),
            got: y.len(),
        });
    }
    if p == 0 || p > oracle.smooth_order() {
        return Err(Error::UnsupportedOrder {
            requested: p,
            available: oracle.smooth_order(),
        });
    }
    if p > 2 {
        return Err(Error::Capability(format!(
            "order-{p} Taylor models are not materialized"
        )));
    }
    Ok(TaylorModel {
        center: y.clone(),
        order: p,
        g_at_center: oracle.smooth_value(y),
        grad_at_center: oracle.gradient(y),
        oracle,
    })
}

/// Observed model errors next to their Hölder upper bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelErrorBounds {
    pub value_gap: f64,
    pub grad_gap: f64,
    pub value_bound: f64,
    pub grad_bound: f64,
}

impl ModelErrorBounds {
    pub fn holds(&self, rel_slack: f64) -> bool {
        let fits = |gap: f64, bound: f64| gap <= bound * (1.0 + rel_slack) + rel_slack * f64::EPSILON;
        fits(self.value_gap, self.value_bound) && fits(self.grad_gap, self.grad_bound)
    }
}

/// Compares `|f(x) - f̃(x; y)|` and `||∇f(x) - ∇f̃(x; y)||` with
/// `(L/p) ||x - y||^(p+ν)` and `L ||x - y||^(p+ν-1)`.
pub fn model_error_bounds(
    oracle: &dyn Objective,
    y: &Vector,
    x: &Vector,
    p: usize,
    nu: f64,
    lipschitz: f64,
) -> Result<ModelErrorBounds> {
    if !(lipschitz > 0.0) || !(0.0..=1.0).contains(&nu) {
        return Err(Error::InvalidConfig(format!(
            "need L > 0 and nu in [0, 1], got L = {lipschitz}, nu = {nu}"
        )));
    }
    let model = build_taylor(oracle, y, p)?;
    let value_gap = (oracle.smooth_value(x) - model.smooth_value(x)?).abs();
    let grad_gap = (oracle.gradient(x) - model.gradient(x)?).norm();
    let dist = (x - y).norm();
    let order = p as f64 + nu;
    let (value_bound, grad_bound) = if dist == 0.0 {
        (0.0, 0.0)
    } else {
        (
            lipschitz / p as f64 * dist.powf(order),
            lipschitz * dist.powf(order - 1.0),
        )
    };
    Ok(ModelErrorBounds {
        value_gap,
        grad_gap,
        value_bound,
        grad_bound,
    })
}

/// Largest eigenvalue of the symmetric PSD matrix `B = (1/n) Σ a_j a_jᵀ`.
pub fn design_spectral_norm(data: &SparseDataset) -> Result<f64> {
    if data.rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let d = data.dim;
    if d == 0 {
        return Ok(0.0);
    }
    if d <= 512 {
        let mut b = DMatrix::<f64>::zeros(d, d);
        for row in &data.rows {
            for &(i, vi) in &row.features {
                for &(j, vj) in &row.features {
                    b[(i - 1, j - 1)] += vi * vj;
                }
            }
        }
        b /= data.rows.len() as f64;
        let eig = SymmetricEigen::new(b);
        return Ok(eig.eigenvalues.max().max(0.0));
    }
    // Power iteration on B for large d; B is PSD so the Rayleigh quotient
    // climbs monotonically to the top eigenvalue.
    let mut v = Vector::from_element(d, 1.0 / (d as f64).sqrt());
    let mut est = 0.0;
    for _ in 0..10_000 {
        let w = data.gram_apply(&v);
        let next = v.dot(&w);
        let wn = w.norm();
        if wn == 0.0 {
            return Ok(0.0);
        }
        v = w / wn;
        if (next - est).abs() <= 1e-13 * next.abs() {
            return Ok(next);
        }
        est = next;
    }
    Ok(est)
}

/// Hölder constant of the logistic-loss Hessian:
/// `||B||_{p,q} · max_j ||a_j||_q^ν` with `B = (1/n) Σ a_j a_jᵀ`.
///
/// Only the Euclidean case `p_norm = 2` is computed; other `ℓ_p` operator
/// norms must be supplied by the caller.
pub fn logistic_smoothness_constant(data: &SparseDataset, p_norm: f64, nu: f64) -> Result<f64> {
    if data.rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(1.0..=2.0).contains(&p_norm) || !(0.0..=1.0).contains(&nu) {
        return Err(Error::InvalidConfig(format!(
            "need 1 <= p_norm <= 2 and nu in [0, 1], got {p_norm}, {nu}"
        )));
    }
    if p_norm != 2.0 {
        return Err(Error::Capability(
            "operator norm ||B||_{p,q} for p_norm < 2 must be user-supplied".into(),
        ));
    }
    let spectral = design_spectral_norm(data)?;
    if nu == 0.0 {
        return Ok(spectral);
    }
    let max_row = data
        .rows
        .iter()
        .map(|r| r.features.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    Ok(spectral * max_row.powf(nu))
}
