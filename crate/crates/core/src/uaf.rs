//! The accelerated outer loop.
//!
//! Each iteration picks a weight `a_i` and coupling `λ_i` linked by
//! `λ_i = a_i^q / (c_q γ A_i^{q-1})`, extrapolates
//! `x̂ = (A_{i-1}/A_i) x_{i-1} + (a_i/A_i) z_{i-1}`, takes one regularized
//! Taylor step from `x̂`, and updates the dual-averaging point `z_i`.
//! `ω_i = L λ_i ||x_i - x̂||^{p+ν-q}` is logged as the convergence indicator.

use std::time::Instant;

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::oracle::{Objective, SimpleConvexTerm};
use crate::subsolver::{solve_step, StepResult, StepSpec, SubsolverOptions};
use crate::taylor::build_taylor;
use crate::trace::TraceRecord;
use crate::Vector;

/// How `(a_i, λ_i)` are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// `q = p + ν`: the indicator does not depend on the step, so
    /// `L λ_i` is set to a target in `[θ₁, θ₂]` directly.
    ExactQEqualsPNu,
    /// Closed-form growth of `A_i` with an estimate of `h(x*; x₀)`.
    Heuristic,
    /// Searches `λ` until the indicator lands in `[θ₁, θ₂]`.
    Bisection,
}

/// What the heuristic schedule does when `ω_i > θ₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationPolicy {
    WarnContinue,
    FallbackBisection,
}

#[derive(Debug, Clone)]
pub struct UafConfig {
    pub p: usize,
    pub nu: f64,
    /// Hölder constant of the `p`-th derivative.
    pub lipschitz: f64,
    pub q: f64,
    pub alpha: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub gamma: f64,
    pub beta: f64,
    pub strategy: Strategy,
    /// Estimate of `h(x*; x₀)`; used by the heuristic schedule only.
    pub h_star_estimate: Option<f64>,
    pub max_iter: usize,
    /// Stop once `f(x_i) - f_ref <= stop_gap`; needs `f_ref`.
    pub stop_gap: Option<f64>,
    /// Reference optimal value used for the trace's gap column.
    pub f_ref: Option<f64>,
    /// Wall-clock limit in seconds.
    pub time_budget: Option<f64>,
    /// Target for `L λ_i` under [`Strategy::ExactQEqualsPNu`].
    pub exact_target: Option<f64>,
    pub bracket_growth: f64,
    pub violation_policy: ViolationPolicy,
    pub subsolver: SubsolverOptions,
}

impl UafConfig {
    /// Defaults for the power-norm proxy `(1/q)||x - x₀||^q`: `γ = β = 2^{2-q}`,
    /// `α = 1`, `θ₁ = θ₂ = 1` with the exact schedule when `q = p + ν`, and
    /// `θ₁ = 0.5`, `θ₂ = 0.67` with bisection otherwise.
    pub fn new(p: usize, nu: f64, lipschitz: f64, q: f64) -> Self {
        let pnu = p as f64 + nu;
        let exact = (q - pnu).abs() <= 1e-12;
        let gb = 2f64.powf(2.0 - q);
        UafConfig {
            p,
            nu,
            lipschitz,
            q: if exact { pnu } else { q },
            alpha: 1.0,
            theta1: if exact { 1.0 } else { 0.5 },
            theta2: if exact { 1.0 } else { 0.67 },
            gamma: gb,
            beta: gb,
            strategy: if exact {
                Strategy::ExactQEqualsPNu
            } else {
                Strategy::Bisection
            },
            h_star_estimate: None,
            max_iter: 100,
            stop_gap: None,
            f_ref: None,
            time_budget: None,
            exact_target: None,
            bracket_growth: 2.0,
            violation_policy: ViolationPolicy::WarnContinue,
            subsolver: SubsolverOptions::default(),
        }
    }

    pub fn p_nu(&self) -> f64 {
        self.p as f64 + self.nu
    }

    /// `c_q = (β (q-1)^{1-q})^{1/q}`.
    pub fn c_q(&self) -> f64 {
        (self.beta * (self.q - 1.0).powf(1.0 - self.q)).powf(1.0 / self.q)
    }

    /// `ς = α(p+ν) + (1-α) q`.
    pub fn varsigma(&self) -> f64 {
        self.alpha * self.p_nu() + (1.0 - self.alpha) * self.q
    }

    /// Growth exponent of `A_k` under the heuristic and bisection
    /// schedules: `((q+1)(p+ν) - q)/q`.
    pub fn rate_exponent(&self) -> f64 {
        ((self.q + 1.0) * self.p_nu() - self.q) / self.q
    }

    /// Regularization multiplier `M` on `||x - x̂||^ς` for coupling `λ`:
    /// `L^α / (c_q λ^{1-α} θ₂^α ς)`.
    pub fn reg_coeff(&self, lambda: f64) -> f64 {
        self.lipschitz.powf(self.alpha)
            / (self.c_q() * lambda.powf(1.0 - self.alpha) * self.theta2.powf(self.alpha) * self.varsigma())
    }

    pub fn is_exact_regime(&self) -> bool {
        (self.q - self.p_nu()).abs() <= 1e-12
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        let pnu = self.p_nu();
        if self.p < 1 || self.p > 2 {
            return bad(format!("p must be 1 or 2, got {}", self.p));
        }
        if !(0.0..=1.0).contains(&self.nu) || pnu < 2.0 {
            return bad(format!("need nu in [0, 1] and p + nu >= 2, got p={} nu={}", self.p, self.nu));
        }
        if !(self.lipschitz > 0.0) || !self.lipschitz.is_finite() {
            return bad(format!("L must be positive, got {}", self.lipschitz));
        }
        if !(self.q >= 2.0) || self.q > pnu + 1e-12 {
            return bad(format!("q must lie in [2, p + nu], got {}", self.q));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("alpha must lie in [0, 1], got {}", self.alpha));
        }
        if !(self.theta2 > 0.0 && self.theta2 <= 1.0) {
            return bad(format!("theta2 must lie in (0, 1], got {}", self.theta2));
        }
        if !(self.theta1 > 0.0 && self.theta1 <= self.theta2) {
            return bad(format!("theta1 must lie in (0, theta2], got {}", self.theta1));
        }
        if !self.is_exact_regime() && self.theta2 >= 1.0 {
            return bad("theta2 must be < 1 when q < p + nu".into());
        }
        if !(self.gamma > 0.0) || !(self.beta > 0.0) {
            return bad("gamma and beta must be positive".into());
        }
        if !(self.bracket_growth > 1.0) {
            return bad(format!("bracket growth must exceed 1, got {}", self.bracket_growth));
        }
        match self.strategy {
            Strategy::ExactQEqualsPNu if !self.is_exact_regime() => {
                return bad("the exact schedule requires q = p + nu".into())
            }
            Strategy::Heuristic | Strategy::Bisection if self.is_exact_regime() => {
                return bad("heuristic and bisection schedules require q < p + nu".into())
            }
            Strategy::Heuristic => match self.h_star_estimate {
                Some(h) if h > 0.0 => {}
                _ => return bad("heuristic schedule needs a positive h_star_estimate".into()),
            },
            _ => {}
        }
        if let Some(t) = self.exact_target {
            if !(t >= self.theta1 && t <= self.theta2) {
                return bad(format!("exact target {t} outside [theta1, theta2]"));
            }
        }
        if self.stop_gap.is_some() && self.f_ref.is_none() {
            return bad("stop_gap needs f_ref".into());
        }
        Ok(())
    }
}

/// The Euclidean power-norm proxy `h(x; x₀) = (1/q)||x - x₀||₂^q`.
#[derive(Debug, Clone)]
pub struct ProxyFunction {
    pub anchor: Vector,
    pub q: f64,
}

impl ProxyFunction {
    pub fn new(anchor: Vector, q: f64) -> Self {
        ProxyFunction { anchor, q }
    }

    pub fn value(&self, x: &Vector) -> f64 {
        (x - &self.anchor).norm().powf(self.q) / self.q
    }

    /// Uniform-convexity constants `(γ, β) = (2^{2-q}, 2^{2-q})`.
    pub fn constants(&self) -> (f64, f64) {
        let c = 2f64.powf(2.0 - self.q);
        (c, c)
    }
}

#[derive(Debug, Clone)]
pub struct IterateState {
    pub i: usize,
    pub x: Vector,
    pub z: Vector,
    pub a_total: f64,
    pub a: f64,
    pub lambda: f64,
    pub omega: f64,
    /// `s_i = Σ_{j<=i} a_j ∇g(x_j)`.
    pub grad_aggregate: Vector,
    pub x_hat: Vector,
}

impl IterateState {
    pub fn initial(x0: &Vector) -> Self {
        IterateState {
            i: 0,
            x: x0.clone(),
            z: x0.clone(),
            a_total: 0.0,
            a: 0.0,
            lambda: 0.0,
            omega: 0.0,
            grad_aggregate: Vector::zeros(x0.len()),
            x_hat: x0.clone(),
        }
    }
}

/// Positive root `a` of `a^q = κ (A_prev + a)^{q-1}` with `κ = λ c_q γ`,
/// i.e. the weight whose coupling coefficient is `λ`.
pub fn solve_weight(a_prev: f64, lambda: f64, cfg: &UafConfig) -> Result<f64> {
    let q = cfg.q;
    let kappa = lambda * cfg.c_q() * cfg.gamma;
    if !(kappa > 0.0) || !kappa.is_finite() || !(a_prev >= 0.0) {
        return Err(Error::ScalarSolve(format!(
            "weight equation needs positive coupling and A >= 0, got kappa={kappa}, A={a_prev}"
        )));
    }
    if a_prev == 0.0 {
        return Ok(kappa);
    }
    // φ(a) = a - κ^{1/q} (A + a)^{(q-1)/q} is convex with φ(0) < 0.
    let k = kappa.powf(1.0 / q);
    let e = (q - 1.0) / q;
    let phi = |a: f64| a - k * (a_prev + a).powf(e);
    let dphi = |a: f64| 1.0 - k * e * (a_prev + a).powf(e - 1.0);
    let mut lo = 0.0;
    let mut hi = kappa.max(a_prev).max(f64::MIN_POSITIVE);
    let mut grow = 0;
    while phi(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 2000 {
            return Err(Error::ScalarSolve("weight equation has no finite root".into()));
        }
    }
    // Newton from the right end stays right of the root for convex φ.
    let mut a = hi;
    for _ in 0..200 {
        let val = phi(a);
        if val.abs() <= 1e-12 * a {
            return Ok(a);
        }
        if val > 0.0 {
            hi = a;
        } else {
            lo = a;
        }
        let step = a - val / dphi(a);
        a = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
    }
    Err(Error::ScalarSolve(format!(
        "weight equation did not converge (A={a_prev}, lambda={lambda})"
    )))
}

/// Solves `L a^q = target c_q γ (A_prev + a)^{q-1}` for `q = p + ν`.
/// Returns `(a, λ)` with `λ = target / L`.
pub fn solve_a_exact(a_prev: f64, cfg: &UafConfig, target: f64) -> Result<(f64, f64)> {
    if !cfg.is_exact_regime() {
        return Err(Error::InvalidConfig("exact weight solve requires q = p + nu".into()));
    }
    let lambda = target / cfg.lipschitz;
    Ok((solve_weight(a_prev, lambda, cfg)?, lambda))
}

/// `C₀ = (q θ₂^α (1 - θ₂^{q/(q-1)})^{-1})^{-(p+ν-q)/q} θ₁^{ς/q} γ^{(p+ν)/q} c_q`.
pub fn heuristic_c0(cfg: &UafConfig) -> Result<f64> {
    if cfg.theta2 >= 1.0 {
        return Err(Error::InvalidConfig(
            "heuristic constant needs theta2 < 1".into(),
        ));
    }
    let q = cfg.q;
    let pnu = cfg.p_nu();
    let inner = q * cfg.theta2.powf(cfg.alpha) / (1.0 - cfg.theta2.powf(q / (q - 1.0)));
    Ok(inner.powf(-(pnu - q) / q)
        * cfg.theta1.powf(cfg.varsigma() / q)
        * cfg.gamma.powf(pnu / q)
        * cfg.c_q())
}

fn heuristic_a_total(i: usize, cfg: &UafConfig, c0: f64, h_star: f64) -> f64 {
    if i == 0 {
        return 0.0;
    }
    let pnu = cfg.p_nu();
    let q = cfg.q;
    c0 / cfg.lipschitz * h_star.powf(-(pnu - q) / q) * (i as f64 / pnu).powf(cfg.rate_exponent())
}

/// Closed-form schedule: returns `(A_i, a_i, λ_i)`.
pub fn schedule_heuristic(i: usize, cfg: &UafConfig) -> Result<(f64, f64, f64)> {
    if i == 0 {
        return Err(Error::InvalidConfig("heuristic schedule starts at i = 1".into()));
    }
    let c0 = heuristic_c0(cfg)?;
    let h = cfg
        .h_star_estimate
        .filter(|h| *h > 0.0)
        .ok_or_else(|| Error::InvalidConfig("heuristic schedule needs h_star_estimate".into()))?;
    let a_total = heuristic_a_total(i, cfg, c0, h);
    let a_prev = heuristic_a_total(i - 1, cfg, c0, h);
    let a = a_total - a_prev;
    let lambda = a.powf(cfg.q) / (cfg.c_q() * cfg.gamma * a_total.powf(cfg.q - 1.0));
    Ok((a_total, a, lambda))
}

/// `argmin_x ⟨s, x⟩ + A l(x) + (1/q)||x - x₀||^q`.
pub fn z_update(
    s: &Vector,
    a_total: f64,
    proxy: &ProxyFunction,
    composite: Option<&dyn SimpleConvexTerm>,
) -> Result<Vector> {
    let q = proxy.q;
    match composite {
        None if q == 2.0 => Ok(&proxy.anchor - s),
        None => {
            let n = s.norm();
            if n == 0.0 {
                Ok(proxy.anchor.clone())
            } else {
                Ok(&proxy.anchor - s * n.powf((2.0 - q) / (q - 1.0)))
            }
        }
        Some(l) if q == 2.0 => Ok(l.prox(&(&proxy.anchor - s), a_total)),
        Some(_) => Err(Error::Capability(
            "dual-averaging update with a composite term needs q = 2".into(),
        )),
    }
}

/// Result of one accepted iteration's coefficient search.
struct Accepted {
    a: f64,
    lambda: f64,
    x_hat: Vector,
    step: StepResult,
}

struct Engine<'o> {
    oracle: &'o dyn Objective,
    cfg: UafConfig,
}

impl Engine<'_> {
    fn extrapolate(&self, st: &IterateState, a: f64) -> Vector {
        let a_new = st.a_total + a;
        &st.x * (st.a_total / a_new) + &st.z * (a / a_new)
    }

    fn step_from(&self, x_hat: &Vector, lambda: f64) -> Result<StepResult> {
        let model = build_taylor(self.oracle, x_hat, self.cfg.p)?;
        let spec = StepSpec {
            model: &model,
            reg_coeff: self.cfg.reg_coeff(lambda),
            power: self.cfg.varsigma(),
        };
        let res = solve_step(&spec, &self.cfg.subsolver)?;
        if !res.converged {
            warn!(
                "subsolver stopped at residual {:.3e} after {} iterations",
                res.stationarity_residual, res.inner_iterations
            );
        }
        Ok(res)
    }

    fn omega(&self, lambda: f64, disp: f64) -> f64 {
        let e = self.cfg.p_nu() - self.cfg.q;
        if e == 0.0 {
            self.cfg.lipschitz * lambda
        } else {
            self.cfg.lipschitz * lambda * disp.powf(e)
        }
    }

    /// One probe of `χ(λ)`.
    fn probe(&self, st: &IterateState, lambda: f64) -> Result<(f64, Accepted)> {
        let a = solve_weight(st.a_total, lambda, &self.cfg)?;
        let x_hat = self.extrapolate(st, a);
        let step = self.step_from(&x_hat, lambda)?;
        let chi = self.omega(lambda, step.displacement_norm);
        Ok((
            chi,
            Accepted {
                a,
                lambda,
                x_hat,
                step,
            },
        ))
    }

    fn bisection(&self, st: &IterateState, seed: f64) -> Result<Accepted> {
        let (t1, t2) = (self.cfg.theta1, self.cfg.theta2);
        let growth = self.cfg.bracket_growth;
        let (mut chi, mut acc) = self.probe(st, seed)?;
        if chi >= t1 && chi <= t2 {
            return Ok(acc);
        }
        let (mut lo, mut hi);
        if chi < t1 {
            lo = seed;
            let mut lam = seed;
            let mut found = false;
            for _ in 0..60 {
                lam *= growth;
                (chi, acc) = self.probe(st, lam)?;
                if chi >= t1 && chi <= t2 {
                    return Ok(acc);
                }
                if chi > t2 {
                    found = true;
                    break;
                }
                lo = lam;
            }
            if !found {
                return Err(Error::Bracketing { expansions: 60 });
            }
            hi = lam;
        } else {
            hi = seed;
            let mut lam = seed;
            let mut found = false;
            for _ in 0..60 {
                lam /= growth;
                (chi, acc) = self.probe(st, lam)?;
                if chi >= t1 && chi <= t2 {
                    return Ok(acc);
                }
                if chi < t1 {
                    found = true;
                    break;
                }
                hi = lam;
            }
            if !found {
                return Err(Error::Bracketing { expansions: 60 });
            }
            lo = lam;
        }
        // χ(lo) < θ₁ and χ(hi) > θ₂; bisect in log scale
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            (chi, acc) = self.probe(st, mid)?;
            if chi >= t1 && chi <= t2 {
                return Ok(acc);
            }
            if chi < t1 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi / lo - 1.0 <= 4.0 * f64::EPSILON {
                break;
            }
        }
        Err(Error::ScalarSolve(format!(
            "indicator bisection stalled between lambda {lo:e} and {hi:e}"
        )))
    }
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxIter,
    GapReached,
    /// The step left `x̂` unchanged: `x̂` minimizes `f`.
    Stationary,
    /// Bisection found no bracket; treated as converged.
    Degenerate,
    TimeBudget,
}

#[derive(Debug, Clone)]
pub struct UafOutput {
    /// Last iterate `x_k`.
    pub solution: Vector,
    pub best_x: Vector,
    pub best_f: f64,
    pub state: IterateState,
    pub trace: Vec<TraceRecord>,
    pub stop: StopReason,
    /// Iterations with `ω_i > θ₂`.
    pub indicator_violations: usize,
}

/// Runs the accelerated loop from `x0` for at most `cfg.max_iter` iterations.
pub fn run(oracle: &dyn Objective, cfg: &UafConfig, x0: &Vector) -> Result<UafOutput> {
    cfg.validate()?;
    if oracle.smooth_order() < cfg.p {
        return Err(Error::UnsupportedOrder {
            requested: cfg.p,
            available: oracle.smooth_order(),
        });
    }
    if x0.len() != oracle.dim() {
        return Err(Error::DimensionMismatch {
            expected: oracle.dim(),
            got: x0.len(),
        });
    }
    let engine = Engine {
        oracle,
        cfg: cfg.clone(),
    };
    let proxy = ProxyFunction::new(x0.clone(), cfg.q);
    let composite = oracle.composite();
    let clock = Instant::now();

    let mut st = IterateState::initial(x0);
    let mut best_f = oracle.value(x0);
    let mut best_x = x0.clone();
    let mut trace = Vec::with_capacity(cfg.max_iter);
    let mut violations = 0;
    let mut stop = StopReason::MaxIter;
    let heuristic_c0 = match cfg.strategy {
        Strategy::Heuristic => Some(heuristic_c0(cfg)?),
        _ => None,
    };
    let mut lambda_seed = {
        let r = oracle.gradient(x0).norm().max(1.0);
        cfg.theta2 / (cfg.lipschitz * r.powf(cfg.p_nu() - cfg.q))
    };

    for i in 1..=cfg.max_iter {
        let acc = match cfg.strategy {
            Strategy::ExactQEqualsPNu => {
                let target = cfg.exact_target.unwrap_or(cfg.theta2);
                let (a, lambda) = solve_a_exact(st.a_total, cfg, target)?;
                let x_hat = engine.extrapolate(&st, a);
                let step = engine.step_from(&x_hat, lambda)?;
                Accepted { a, lambda, x_hat, step }
            }
            Strategy::Heuristic => {
                let h = cfg.h_star_estimate.expect("validated");
                let c0 = heuristic_c0.expect("set above");
                let a_total = heuristic_a_total(i, cfg, c0, h);
                let a = a_total - st.a_total;
                let lambda = a.powf(cfg.q) / (cfg.c_q() * cfg.gamma * a_total.powf(cfg.q - 1.0));
                let x_hat = engine.extrapolate(&st, a);
                let step = engine.step_from(&x_hat, lambda)?;
                let omega = engine.omega(lambda, step.displacement_norm);
                if omega > cfg.theta2 {
                    match cfg.violation_policy {
                        ViolationPolicy::WarnContinue => {
                            warn!("iteration {i}: indicator {omega:.4} exceeds theta2 = {}", cfg.theta2);
                            Accepted { a, lambda, x_hat, step }
                        }
                        ViolationPolicy::FallbackBisection => {
                            debug!("iteration {i}: indicator {omega:.4} too large, bisecting");
                            match engine.bisection(&st, lambda) {
                                Ok(acc) => acc,
                                Err(Error::Bracketing { .. }) => {
                                    stop = StopReason::Degenerate;
                                    break;
                                }
                                Err(e) => return Err(e),
                            }
                        }
                    }
                } else {
                    Accepted { a, lambda, x_hat, step }
                }
            }
            Strategy::Bisection => match engine.bisection(&st, lambda_seed) {
                Ok(acc) => acc,
                Err(Error::Bracketing { .. }) => {
                    stop = StopReason::Degenerate;
                    break;
                }
                Err(e) => return Err(e),
            },
        };

        let Accepted { a, lambda, x_hat, step } = acc;
        lambda_seed = lambda;
        let a_total = st.a_total + a;
        let omega = engine.omega(lambda, step.displacement_norm);
        if omega > cfg.theta2 * (1.0 + 1e-12) {
            violations += 1;
        }
        let x = step.x_new;
        let grad = oracle.gradient(&x);
        let mut s = st.grad_aggregate;
        s.axpy(a, &grad, 1.0);
        let z = z_update(&s, a_total, &proxy, composite)?;
        let f = oracle.value(&x);
        if !f.is_finite() {
            return Err(Error::Evaluation { what: "objective" });
        }
        if f < best_f {
            best_f = f;
            best_x = x.clone();
        }
        let gap = cfg.f_ref.map(|fr| f - fr);
        trace.push(TraceRecord {
            iter: i,
            f_value: f,
            gap_vs_ref: gap,
            omega,
            lambda,
            a_total,
            displacement: step.displacement_norm,
            wall_seconds: clock.elapsed().as_secs_f64(),
        });
        debug!("iter {i}: f={f:.6e} omega={omega:.4} A={a_total:.4e}");
        st = IterateState {
            i,
            x,
            z,
            a_total,
            a,
            lambda,
            omega,
            grad_aggregate: s,
            x_hat,
        };
        if step.displacement_norm == 0.0 {
            stop = StopReason::Stationary;
            break;
        }
        if let (Some(tol), Some(g)) = (cfg.stop_gap, gap) {
            if g <= tol {
                stop = StopReason::GapReached;
                break;
            }
        }
        if cfg.time_budget.is_some_and(|b| clock.elapsed().as_secs_f64() >= b) {
            stop = StopReason::TimeBudget;
            break;
        }
    }

    Ok(UafOutput {
        solution: st.x.clone(),
        best_x,
        best_f,
        state: st,
        trace,
        stop,
        indicator_violations: violations,
    })
}

/// Estimates `h(x*; x₀)` by running the `q = p + ν` instance of `cfg` for
/// `iterations` steps and measuring the proxy at its last iterate.
pub fn pilot_h_star(oracle: &dyn Objective, cfg: &UafConfig, x0: &Vector, iterations: usize) -> Result<f64> {
    let mut pilot = UafConfig::new(cfg.p, cfg.nu, cfg.lipschitz, cfg.p_nu());
    pilot.max_iter = iterations;
    pilot.subsolver = cfg.subsolver.clone();
    let out = run(oracle, &pilot, x0)?;
    let h = ProxyFunction::new(x0.clone(), cfg.q).value(&out.best_x);
    Ok(h.max(f64::MIN_POSITIVE))
}
