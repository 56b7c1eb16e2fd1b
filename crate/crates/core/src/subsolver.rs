//! Regularized model steps.
//!
//! Every step minimizes `m(x) = f̃(x; x̂) + M ||x - x̂||^ς` around the center
//! `x̂` of a Taylor model. Which routine applies depends on the model order
//! and the power `ς`:
//!
//! | order | ς       | routine                                   |
//! |-------|---------|-------------------------------------------|
//! | 1     | 2       | [`prox_gradient_step`] (closed form)      |
//! | 2     | 3       | [`cubic_step_exact`] / [`cubic_step_krylov`] |
//! | 2     | [2, 3]  | [`power_step_generic`] (damped Newton-CG) |
//!
//! Order-2 steps require `l ≡ 0`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::taylor::TaylorModel;
use crate::Vector;

/// One regularized step request. `reg_coeff` is the full multiplier `M` on
/// `||x - x̂||^ς`; the center is the model's expansion point.
pub struct StepSpec<'m, 'a> {
    pub model: &'m TaylorModel<'a>,
    pub reg_coeff: f64,
    pub power: f64,
}

impl StepSpec<'_, '_> {
    pub fn center(&self) -> &Vector {
        &self.model.center
    }

    fn validate(&self) -> Result<()> {
        if !(self.reg_coeff > 0.0) || !self.reg_coeff.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "regularization coefficient must be positive and finite, got {}",
                self.reg_coeff
            )));
        }
        if !(self.power >= 2.0) {
            return Err(Error::InvalidConfig(format!(
                "regularization power must be >= 2, got {}",
                self.power
            )));
        }
        Ok(())
    }

    /// `f̃(x; x̂) + M ||x - x̂||^ς`.
    pub fn regularized_value(&self, x: &Vector) -> Result<f64> {
        let r = (x - self.center()).norm();
        Ok(self.model.evaluate(x)? + self.reg_coeff * r.powf(self.power))
    }
}

#[derive(Debug, Clone)]
pub struct StepResult {
    pub x_new: Vector,
    pub displacement_norm: f64,
    pub stationarity_residual: f64,
    pub inner_iterations: usize,
    pub converged: bool,
}

impl StepResult {
    fn new(center: &Vector, u: Vector, residual: f64, iterations: usize, converged: bool) -> Self {
        let displacement_norm = u.norm();
        StepResult {
            x_new: center + u,
            displacement_norm,
            stationarity_residual: residual,
            inner_iterations: iterations,
            converged,
        }
    }
}

/// Which routine the engine should use for order-2 steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsolverChoice {
    /// Exact cubic below the dimension cap, Krylov above it, generic Newton
    /// for non-cubic powers.
    Auto,
    Exact,
    Krylov,
    Generic,
}

#[derive(Debug, Clone)]
pub struct SubsolverOptions {
    pub choice: SubsolverChoice,
    /// Largest dimension handled by the dense eigendecomposition.
    pub exact_cap: usize,
    pub krylov_max_dim: usize,
    pub krylov_tol: f64,
    pub generic_tol: f64,
    pub generic_max_iter: usize,
}

impl Default for SubsolverOptions {
    fn default() -> Self {
        SubsolverOptions {
            choice: SubsolverChoice::Auto,
            exact_cap: 64,
            krylov_max_dim: 300,
            krylov_tol: 1e-10,
            generic_tol: 1e-10,
            generic_max_iter: 200,
        }
    }
}

/// Dispatches a step to the routine matching its regime.
pub fn solve_step(spec: &StepSpec, opts: &SubsolverOptions) -> Result<StepResult> {
    spec.validate()?;
    if spec.model.order == 1 {
        return prox_gradient_step(spec);
    }
    let cubic = spec.power == 3.0;
    match opts.choice {
        SubsolverChoice::Exact => cubic_step_exact_capped(spec, opts.exact_cap),
        SubsolverChoice::Krylov => cubic_step_krylov(spec, opts.krylov_max_dim, opts.krylov_tol),
        SubsolverChoice::Generic => power_step_generic_with(spec, opts.generic_tol, opts.generic_max_iter),
        SubsolverChoice::Auto if cubic && spec.model.dim() <= opts.exact_cap => {
            cubic_step_exact_capped(spec, opts.exact_cap)
        }
        SubsolverChoice::Auto if cubic => cubic_step_krylov(spec, opts.krylov_max_dim, opts.krylov_tol),
        SubsolverChoice::Auto => power_step_generic_with(spec, opts.generic_tol, opts.generic_max_iter),
    }
}

/// Closed-form step for an order-1 model with `ς = 2`:
/// `x = prox_l(x̂ - ∇g(x̂)/(2M), 1/(2M))`.
pub fn prox_gradient_step(spec: &StepSpec) -> Result<StepResult> {
    spec.validate()?;
    if spec.model.order != 1 || spec.power != 2.0 {
        return Err(Error::WrongRegime(format!(
            "proximal gradient step needs an order-1 model and power 2, got order {} and power {}",
            spec.model.order, spec.power
        )));
    }
    let center = spec.center();
    let g = &spec.model.grad_at_center;
    let step = 0.5 / spec.reg_coeff;
    let trial = center - g * step;
    let (x_new, residual) = match spec.model.composite() {
        Some(l) => {
            let x = l.prox(&trial, step);
            let smooth_grad = g + (&x - center) * (2.0 * spec.reg_coeff);
            let res = l.stationarity(&x, &smooth_grad);
            (x, res)
        }
        None => (trial, 0.0),
    };
    let u = &x_new - center;
    Ok(StepResult::new(center, u, residual, 1, true))
}

fn require_smooth_order2(spec: &StepSpec, what: &str) -> Result<()> {
    if spec.model.order != 2 {
        return Err(Error::WrongRegime(format!(
            "{what} needs an order-2 model, got order {}",
            spec.model.order
        )));
    }
    if spec.model.composite().is_some() {
        return Err(Error::Capability(format!(
            "{what} does not support a composite term"
        )));
    }
    Ok(())
}

/// Global minimizer `u` of `gᵀu + ½uᵀHu + M||u||³` for symmetric `H`.
///
/// Works in the eigenbasis of `H`: with `r = ||u||` the stationary point is
/// `u(r) = -(H + 3Mr I)⁻¹ g`, and `r` solves `||u(r)|| = r` on
/// `r > max(0, -λ_min/(3M))`. The root is found by Newton's method kept
/// inside a shrinking bracket; the degenerate ("hard") case where `g` has no
/// weight on the bottom eigenvector is completed along that eigenvector.
pub fn solve_cubic_dense(g: &Vector, h: &DMatrix<f64>, m: f64) -> Result<Vector> {
    let d = g.len();
    if h.nrows() != d || h.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: h.nrows(),
        });
    }
    if d == 0 {
        return Ok(Vector::zeros(0));
    }
    let eig = SymmetricEigen::new(h.clone());
    let lambdas = &eig.eigenvalues;
    let basis = &eig.eigenvectors;
    let gt = basis.transpose() * g;
    let (imin, &lmin) = lambdas
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let gnorm = g.norm();
    let three_m = 3.0 * m;
    let r_lo = (-lmin / three_m).max(0.0);

    let norm_at = |r: f64| -> f64 {
        gt.iter()
            .zip(lambdas.iter())
            .map(|(&gi, &li)| {
                let den = li + three_m * r;
                if gi == 0.0 {
                    0.0
                } else {
                    (gi / den).powi(2)
                }
            })
            .sum::<f64>()
            .sqrt()
    };
    let lift = |coeffs: &Vector| -> Vector { basis * coeffs };

    // Hard case: ||u(r_lo)|| finite and already short of r_lo.
    let scale = lambdas.amax().max(three_m * r_lo).max(f64::MIN_POSITIVE);
    let tiny_weight = |i: usize| gt[i].abs() <= 1e-14 * gnorm.max(f64::MIN_POSITIVE);
    let bottom_degenerate = (0..d)
        .filter(|&i| (lambdas[i] - lmin).abs() <= 1e-12 * scale)
        .all(tiny_weight);
    if r_lo > 0.0 && bottom_degenerate {
        let coeffs = Vector::from_fn(d, |i, _| {
            let den = lambdas[i] + three_m * r_lo;
            if (lambdas[i] - lmin).abs() <= 1e-12 * scale {
                0.0
            } else {
                -gt[i] / den
            }
        });
        let n = coeffs.norm();
        if n <= r_lo {
            let mut coeffs = coeffs;
            coeffs[imin] += (r_lo * r_lo - n * n).max(0.0).sqrt();
            return Ok(lift(&coeffs));
        }
    }
    if gnorm == 0.0 {
        return Ok(Vector::zeros(d));
    }

    let r_hi_init = (-lmin + (lmin * lmin + 4.0 * three_m * gnorm).sqrt()) / (2.0 * three_m);
    let mut lo = r_lo;
    let mut hi = r_hi_init.max(r_lo);
    // φ(r) = ||u(r)|| - r is decreasing; φ(lo) > 0 ≥ φ(hi).
    let phi = |r: f64| norm_at(r) - r;
    let dphi = |r: f64| {
        let n = norm_at(r);
        let s: f64 = gt
            .iter()
            .zip(lambdas.iter())
            .map(|(&gi, &li)| {
                let den = li + three_m * r;
                gi * gi / (den * den * den)
            })
            .sum();
        -three_m * s / n.max(f64::MIN_POSITIVE) - 1.0
    };
    let mut r = hi;
    let mut converged = false;
    for _ in 0..500 {
        let val = phi(r);
        if val.abs() <= 1e-15 * r.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        if val > 0.0 {
            lo = r;
        } else {
            hi = r;
        }
        let deriv = dphi(r);
        let newton = r - val / deriv;
        let next = if deriv.is_finite() && deriv < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (hi - lo) <= 4.0 * f64::EPSILON * hi || next == r {
            r = next;
            converged = true;
            break;
        }
        r = next;
    }
    if !converged {
        return Err(Error::ScalarSolve(format!(
            "secular equation did not converge (bracket [{lo:e}, {hi:e}])"
        )));
    }
    let coeffs = Vector::from_fn(d, |i, _| -gt[i] / (lambdas[i] + three_m * r));
    Ok(lift(&coeffs))
}

fn cubic_residual(g: &Vector, hu: &Vector, u: &Vector, m: f64) -> f64 {
    (g + hu + u * (3.0 * m * u.norm())).norm()
}

/// Exact cubic-regularized Newton step via dense eigendecomposition, for
/// dimensions up to the default cap of 64.
pub fn cubic_step_exact(spec: &StepSpec) -> Result<StepResult> {
    cubic_step_exact_capped(spec, SubsolverOptions::default().exact_cap)
}

pub fn cubic_step_exact_capped(spec: &StepSpec, cap: usize) -> Result<StepResult> {
    spec.validate()?;
    require_smooth_order2(spec, "exact cubic step")?;
    if spec.power != 3.0 {
        return Err(Error::WrongRegime(format!(
            "exact cubic step needs power 3, got {}",
            spec.power
        )));
    }
    let d = spec.model.dim();
    if d > cap {
        return Err(Error::Capability(format!(
            "dense cubic solver is capped at dimension {cap}, got {d}"
        )));
    }
    let h = spec.model.dense_hessian()?;
    let g = &spec.model.grad_at_center;
    let u = solve_cubic_dense(g, &h, spec.reg_coeff)?;
    let residual = cubic_residual(g, &(&h * &u), &u, spec.reg_coeff);
    Ok(StepResult::new(spec.center(), u, residual, 1, true))
}

/// Cubic step restricted to growing Krylov subspaces `K_k(H, g)`.
///
/// Lanczos with full reorthogonalization builds `Q_k` and the tridiagonal
/// `T_k = Q_kᵀ H Q_k`; the projected problem is solved exactly and lifted.
/// Stops once the lifted stationarity residual drops below
/// `tol * (1 + ||g||)`, on Lanczos breakdown (exact in the invariant
/// subspace), or at `max_krylov_dim`.
pub fn cubic_step_krylov(spec: &StepSpec, max_krylov_dim: usize, tol: f64) -> Result<StepResult> {
    spec.validate()?;
    require_smooth_order2(spec, "Krylov cubic step")?;
    if spec.power != 3.0 {
        return Err(Error::WrongRegime(format!(
            "Krylov cubic step needs power 3, got {}",
            spec.power
        )));
    }
    let g = &spec.model.grad_at_center;
    let center = spec.center();
    let m = spec.reg_coeff;
    let d = g.len();
    let gnorm = g.norm();
    if gnorm == 0.0 {
        return Ok(StepResult::new(center, Vector::zeros(d), 0.0, 0, true));
    }
    let target = tol * (1.0 + gnorm);
    let kmax = max_krylov_dim.min(d).max(1);

    let mut basis: Vec<Vector> = Vec::with_capacity(kmax);
    let mut alphas: Vec<f64> = Vec::with_capacity(kmax);
    let mut betas: Vec<f64> = Vec::with_capacity(kmax);
    basis.push(g / gnorm);

    let mut best_u = Vector::zeros(d);
    let mut best_res = f64::INFINITY;
    for k in 1..=kmax {
        let qk = &basis[k - 1];
        let mut w = spec.model.hess_vec(qk)?;
        let alpha = qk.dot(&w);
        alphas.push(alpha);
        // full reorthogonalization, twice for stability
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let beta = w.norm();

        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alphas[i];
            if i + 1 < k {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let mut e1 = Vector::zeros(k);
        e1[0] = gnorm;
        let y = solve_cubic_dense(&e1, &t, m)?;
        // residual of the lifted point: the in-subspace part vanishes up to
        // the projected solve's accuracy; the out-of-subspace part is β_k |y_k|
        let proj_res = cubic_residual(&e1, &(&t * &y), &y, m);
        let leak = beta * y[k - 1].abs();
        let cheap_res = (proj_res * proj_res + leak * leak).sqrt();

        let breakdown = beta <= 1e-13 * (alpha.abs() + betas.last().copied().unwrap_or(0.0)).max(1e-300);
        if cheap_res <= target || breakdown || k == kmax {
            let mut u = Vector::zeros(d);
            for (q, &yi) in basis.iter().zip(y.iter()) {
                u.axpy(yi, q, 1.0);
            }
            let hu = spec.model.hess_vec(&u)?;
            let res = cubic_residual(g, &hu, &u, m);
            if res < best_res {
                best_res = res;
                best_u = u;
            }
            if res <= target || breakdown {
                return Ok(StepResult::new(center, best_u, best_res, k, true));
            }
            if k == kmax {
                break;
            }
        }
        betas.push(beta);
        basis.push(w / beta);
    }
    Ok(StepResult::new(center, best_u, best_res, kmax, best_res <= target))
}

/// Minimizes the order-2 model plus `M ||u||^ς`, `ς ∈ [2, 3]`, by damped
/// Newton with conjugate-gradient inner solves. Assumes a convex model
/// (`∇²g(x̂) ⪰ 0`).
pub fn power_step_generic(spec: &StepSpec, inner_tol: f64) -> Result<StepResult> {
    power_step_generic_with(spec, inner_tol, SubsolverOptions::default().generic_max_iter)
}

pub fn power_step_generic_with(spec: &StepSpec, inner_tol: f64, max_iter: usize) -> Result<StepResult> {
    spec.validate()?;
    require_smooth_order2(spec, "generic power step")?;
    let s = spec.power;
    if !(2.0..=3.0).contains(&s) {
        return Err(Error::WrongRegime(format!(
            "generic power step covers powers in [2, 3], got {s}"
        )));
    }
    let m = spec.reg_coeff;
    let g = &spec.model.grad_at_center;
    let center = spec.center();
    let d = g.len();
    if g.norm() == 0.0 {
        return Ok(StepResult::new(center, Vector::zeros(d), 0.0, 0, true));
    }
    let hv = |v: &Vector| spec.model.hess_vec(v);
    let value = |u: &Vector, hu: &Vector| g.dot(u) + 0.5 * u.dot(hu) + m * u.norm().powf(s);
    let grad = |u: &Vector, hu: &Vector| {
        let r = u.norm();
        if r == 0.0 {
            g + hu
        } else {
            g + hu + u * (m * s * r.powf(s - 2.0))
        }
    };

    // Cauchy point along -g as the start: minimize
    // φ(t) = -t||g||² + ½t² gᵀHg + M t^ς ||g||^ς over t ≥ 0.
    let hg = hv(g)?;
    let gg = g.norm_squared();
    let ghg = g.dot(&hg);
    let gn = g.norm();
    let dphi = |t: f64| -gg + t * ghg + m * s * t.powf(s - 1.0) * gn.powf(s);
    let mut t_hi = 1.0 / gn;
    while dphi(t_hi) < 0.0 {
        t_hi *= 2.0;
    }
    let mut t_lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (t_lo + t_hi);
        if dphi(mid) < 0.0 {
            t_lo = mid;
        } else {
            t_hi = mid;
        }
        if t_hi - t_lo <= 1e-15 * t_hi {
            break;
        }
    }
    let mut u = g * (-0.5 * (t_lo + t_hi));
    let mut hu = hv(&u)?;
    let mut gr = grad(&u, &hu);
    let mut res = gr.norm();
    let mut iters = 0;

    while res > inner_tol && iters < max_iter {
        iters += 1;
        let r = u.norm();
        let uhat = if r > 0.0 { &u / r } else { Vector::zeros(d) };
        let coef = if r > 0.0 { m * s * r.powf(s - 2.0) } else { 0.0 };
        // (H + coef (I + (ς-2) ûûᵀ)) v
        let apply = |v: &Vector| -> Result<Vector> {
            let mut out = hv(v)?;
            out.axpy(coef, v, 1.0);
            out.axpy(coef * (s - 2.0) * uhat.dot(v), &uhat, 1.0);
            Ok(out)
        };
        let dir = match conjugate_gradient(apply, &(-&gr), 1e-3 * inner_tol.min(res), 4 * d + 20)? {
            Some(dir) if dir.dot(&gr) < 0.0 => dir,
            _ => -&gr,
        };
        let f0 = value(&u, &hu);
        let slope = dir.dot(&gr);
        let hdir = hv(&dir)?;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = &u + &dir * step;
            let hcand = &hu + &hdir * step;
            if value(&cand, &hcand) <= f0 + 1e-4 * step * slope {
                u = cand;
                hu = hcand;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // stalled at round-off level; accept whatever the last full
            // Newton direction gives if it lowers the residual
            let cand = &u + &dir;
            let hcand = hv(&cand)?;
            let cres = grad(&cand, &hcand).norm();
            if cres < res {
                u = cand;
                hu = hcand;
            } else {
                break;
            }
        }
        hu = if iters % 10 == 0 { hv(&u)? } else { hu };
        gr = grad(&u, &hu);
        res = gr.norm();
    }
    if res > inner_tol {
        return Err(Error::InnerSolver {
            iterations: iters,
            residual: res,
            best: center + u,
        });
    }
    Ok(StepResult::new(center, u, res, iters.max(1), true))
}

/// Plain CG for `A x = b` with `A` symmetric positive definite. Returns
/// `None` on detected non-positive curvature.
fn conjugate_gradient<F>(apply: F, b: &Vector, tol: f64, max_iter: usize) -> Result<Option<Vector>>
where
    F: Fn(&Vector) -> Result<Vector>,
{
    let mut x = Vector::zeros(b.len());
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = r.norm_squared();
    let bn = b.norm();
    if bn == 0.0 {
        return Ok(Some(x));
    }
    for _ in 0..max_iter {
        if rr.sqrt() <= tol.max(1e-15 * bn) {
            break;
        }
        let ap = apply(&p)?;
        let pap = p.dot(&ap);
        if !(pap > 0.0) {
            return Ok(if x.norm() > 0.0 { Some(x) } else { None });
        }
        let alpha = rr / pap;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        let rr_new = r.norm_squared();
        p = &r + &p * (rr_new / rr);
        rr = rr_new;
    }
    Ok(Some(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{L1Norm, Objective, SimpleConvexTerm};
    use crate::problems::{make_quadratic, QuadraticSpec};
    use crate::taylor::build_taylor;

    /// Linear-plus-quadratic smooth part with explicit gradient at the origin
    /// and Hessian `h`: `g(x) = c + gᵀx + ½xᵀHx`.
    struct Model {
        g: Vector,
        h: DMatrix<f64>,
        l1: Option<L1Norm>,
    }

    impl Objective for Model {
        fn dim(&self) -> usize {
            self.g.len()
        }
        fn smooth_order(&self) -> usize {
            2
        }
        fn smooth_value(&self, x: &Vector) -> f64 {
            self.g.dot(x) + 0.5 * x.dot(&(&self.h * x))
        }
        fn gradient(&self, x: &Vector) -> Vector {
            &self.g + &self.h * x
        }
        fn hess_vec(&self, _x: &Vector, v: &Vector) -> crate::Result<Vector> {
            Ok(&self.h * v)
        }
        fn dense_hessian(&self, _x: &Vector) -> Option<DMatrix<f64>> {
            Some(self.h.clone())
        }
        fn composite(&self) -> Option<&dyn SimpleConvexTerm> {
            self.l1.as_ref().map(|l| l as &dyn SimpleConvexTerm)
        }
    }

    fn model(g: Vec<f64>, h: DMatrix<f64>) -> Model {
        Model {
            g: Vector::from_vec(g),
            h,
            l1: None,
        }
    }

    #[test]
    fn prox_step_solves_quadratic_in_one_step() {
        let q = make_quadratic(QuadraticSpec::Diagonal(vec![1.0, 1.0]), Vector::zeros(2), false).unwrap();
        let m = build_taylor(&q, &Vector::from_vec(vec![2.0, 0.0]), 1).unwrap();
        let r = prox_gradient_step(&StepSpec { model: &m, reg_coeff: 0.5, power: 2.0 }).unwrap();
        assert_eq!(r.x_new, Vector::zeros(2));
        assert_eq!(r.inner_iterations, 1);
    }

    #[test]
    fn prox_step_soft_thresholds_to_zero() {
        let f = Model {
            g: Vector::from_element(1, 0.3),
            h: DMatrix::zeros(1, 1),
            l1: Some(L1Norm::new(1.0)),
        };
        let m = build_taylor(&f, &Vector::zeros(1), 1).unwrap();
        let r = prox_gradient_step(&StepSpec { model: &m, reg_coeff: 0.5, power: 2.0 }).unwrap();
        assert_eq!(r.x_new[0], 0.0);
        assert_eq!(r.stationarity_residual, 0.0);
    }

    #[test]
    fn prox_step_rejects_order_two() {
        let f = model(vec![1.0], DMatrix::zeros(1, 1));
        let m = build_taylor(&f, &Vector::zeros(1), 2).unwrap();
        assert!(matches!(
            prox_gradient_step(&StepSpec { model: &m, reg_coeff: 0.5, power: 2.0 }),
            Err(Error::WrongRegime(_))
        ));
    }

    #[test]
    fn exact_cubic_one_dimensional() {
        let f = model(vec![1.0], DMatrix::zeros(1, 1));
        let m = build_taylor(&f, &Vector::zeros(1), 2).unwrap();
        let r = cubic_step_exact(&StepSpec { model: &m, reg_coeff: 0.5, power: 3.0 }).unwrap();
        // 1 + 1.5 x|x| = 0
        assert!((r.x_new[0] + (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!(r.stationarity_residual < 1e-10 * 2.0);
    }

    #[test]
    fn exact_cubic_stationary_center() {
        let f = model(vec![0.0, 0.0], DMatrix::identity(2, 2));
        let m = build_taylor(&f, &Vector::from_vec(vec![0.0, 0.0]), 2).unwrap();
        let r = cubic_step_exact(&StepSpec { model: &m, reg_coeff: 1.0, power: 3.0 }).unwrap();
        assert_eq!(r.displacement_norm, 0.0);
    }

    #[test]
    fn exact_cubic_approaches_newton_step() {
        let h = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let f = model(vec![1.0, -2.0], h.clone());
        let m = build_taylor(&f, &Vector::zeros(2), 2).unwrap();
        let r = cubic_step_exact(&StepSpec { model: &m, reg_coeff: 1e-8, power: 3.0 }).unwrap();
        let newton = -h.cholesky().unwrap().solve(&Vector::from_vec(vec![1.0, -2.0]));
        assert!((r.x_new - newton).norm() < 1e-5);
    }

    #[test]
    fn exact_cubic_hard_case() {
        // negative curvature direction orthogonal to g
        let h = DMatrix::from_diagonal(&Vector::from_vec(vec![-1.0, 2.0]));
        let f = model(vec![0.0, 0.1], h);
        let m = build_taylor(&f, &Vector::zeros(2), 2).unwrap();
        let r = cubic_step_exact(&StepSpec { model: &m, reg_coeff: 1.0, power: 3.0 }).unwrap();
        assert!(r.stationarity_residual < 1e-10);
        // ||u|| = 1/3 with u_2 = -0.1/3
        assert!((r.x_new[1] + 0.1 / 3.0).abs() < 1e-12);
        assert!((r.displacement_norm - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn exact_cubic_rejects_composite() {
        let f = Model {
            g: Vector::from_element(1, 1.0),
            h: DMatrix::identity(1, 1),
            l1: Some(L1Norm::new(1.0)),
        };
        let m = build_taylor(&f, &Vector::zeros(1), 2).unwrap();
        assert!(matches!(
            cubic_step_exact(&StepSpec { model: &m, reg_coeff: 1.0, power: 3.0 }),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn krylov_one_dimension_for_eigenvector_gradient() {
        let h = DMatrix::from_diagonal(&Vector::from_vec(vec![1.0, 2.0, 5.0]));
        let f = model(vec![0.0, 3.0, 0.0], h);
        let m = build_taylor(&f, &Vector::zeros(3), 2).unwrap();
        let spec = StepSpec { model: &m, reg_coeff: 0.7, power: 3.0 };
        let k = cubic_step_krylov(&spec, 3, 1e-12).unwrap();
        let e = cubic_step_exact(&spec).unwrap();
        assert_eq!(k.inner_iterations, 1);
        assert!((k.x_new - e.x_new).norm() < 1e-10);
    }

    #[test]
    fn krylov_zero_gradient() {
        let f = model(vec![0.0, 0.0], DMatrix::identity(2, 2));
        let m = build_taylor(&f, &Vector::zeros(2), 2).unwrap();
        let k = cubic_step_krylov(&StepSpec { model: &m, reg_coeff: 1.0, power: 3.0 }, 2, 1e-12).unwrap();
        assert_eq!(k.displacement_norm, 0.0);
    }

    #[test]
    fn generic_power_one_dimensional() {
        let f = model(vec![1.0], DMatrix::zeros(1, 1));
        let m = build_taylor(&f, &Vector::zeros(1), 2).unwrap();
        let r = power_step_generic(&StepSpec { model: &m, reg_coeff: 1.0, power: 2.5 }, 1e-12).unwrap();
        // oracle: bisection on 1 - 2.5 t^1.5 = 0 for t = -x > 0
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 1.0 - 2.5 * mid.powf(1.5) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((r.x_new[0] + lo).abs() < 1e-10);
        assert!((lo - 0.4f64.powf(2.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn generic_power_zero_gradient() {
        let f = model(vec![0.0, 0.0], DMatrix::identity(2, 2));
        let m = build_taylor(&f, &Vector::zeros(2), 2).unwrap();
        let r = power_step_generic(&StepSpec { model: &m, reg_coeff: 1.0, power: 2.5 }, 1e-12).unwrap();
        assert_eq!(r.displacement_norm, 0.0);
    }

    #[test]
    fn generic_power_two_is_regularized_newton() {
        let h = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let f = model(vec![1.0, -2.0], h.clone());
        let m = build_taylor(&f, &Vector::zeros(2), 2).unwrap();
        let r = power_step_generic(&StepSpec { model: &m, reg_coeff: 0.3, power: 2.0 }, 1e-12).unwrap();
        let shifted = h + DMatrix::identity(2, 2) * 0.6;
        let expect = -shifted.cholesky().unwrap().solve(&Vector::from_vec(vec![1.0, -2.0]));
        assert!((r.x_new - expect).norm() < 1e-11);
    }

    #[test]
    fn dispatch_picks_regime() {
        let f = model(vec![1.0, 1.0], DMatrix::identity(2, 2));
        let m = build_taylor(&f, &Vector::zeros(2), 2).unwrap();
        let opts = SubsolverOptions::default();
        let cubic = solve_step(&StepSpec { model: &m, reg_coeff: 1.0, power: 3.0 }, &opts).unwrap();
        let generic = solve_step(
            &StepSpec { model: &m, reg_coeff: 1.0, power: 3.0 },
            &SubsolverOptions { choice: SubsolverChoice::Generic, ..opts.clone() },
        )
        .unwrap();
        assert!((cubic.x_new - generic.x_new).norm() < 1e-9);
    }
}
