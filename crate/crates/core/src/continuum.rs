//! Continuous-time accelerated dynamics
//! `A_t ẋ = a_t (z_t - x_t)`, `z_t = x₀ - ∫₀ᵗ a_τ ∇g(x_τ) dτ`
//! for the Euclidean proxy `h = ½||x - x₀||²`, integrated with classical RK4.

use crate::error::{Error, Result};
use crate::oracle::Objective;
use crate::Vector;

/// Weight schedule `A_t = t^p / p²`, `a_t = dA/dt = t^{p-1} / p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSchedule {
    pub p: f64,
}

impl PowerSchedule {
    pub fn new(p: f64) -> Self {
        PowerSchedule { p }
    }

    /// `A_t = t² / 4`.
    pub fn quadratic() -> Self {
        PowerSchedule { p: 2.0 }
    }

    pub fn big_a(&self, t: f64) -> f64 {
        t.powf(self.p) / (self.p * self.p)
    }

    pub fn small_a(&self, t: f64) -> f64 {
        t.powf(self.p - 1.0) / self.p
    }
}

pub struct DynamicsSpec<'o> {
    pub oracle: &'o dyn Objective,
    pub schedule: PowerSchedule,
    pub x0: Vector,
    pub horizon: f64,
    pub dt: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<Vector>,
    pub f: Vec<f64>,
}

impl Trajectory {
    pub fn last(&self) -> (f64, &Vector, f64) {
        let n = self.t.len() - 1;
        (self.t[n], &self.x[n], self.f[n])
    }
}

fn rhs(spec: &DynamicsSpec, t: f64, x: &Vector, s: &Vector) -> (Vector, Vector) {
    let a = spec.schedule.small_a(t);
    let big = spec.schedule.big_a(t);
    let dx = (&spec.x0 - s - x) * (a / big);
    let ds = spec.oracle.gradient(x) * a;
    (dx, ds)
}

const SUBSTEP_RATIO: f64 = 64.0;

fn rk4_step(spec: &DynamicsSpec, t: f64, h: f64, x: &mut Vector, s: &mut Vector) {
    let (k1x, k1s) = rhs(spec, t, x, s);
    let (k2x, k2s) = rhs(spec, t + 0.5 * h, &(&*x + &k1x * (0.5 * h)), &(&*s + &k1s * (0.5 * h)));
    let (k3x, k3s) = rhs(spec, t + 0.5 * h, &(&*x + &k2x * (0.5 * h)), &(&*s + &k2s * (0.5 * h)));
    let (k4x, k4s) = rhs(spec, t + h, &(&*x + &k3x * h), &(&*s + &k3s * h));
    *x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
    *s += (k1s + k2s * 2.0 + k3s * 2.0 + k4s) * (h / 6.0);
}

/// Integrates from `t₀ = dt` to the horizon.
///
/// The start uses the leading term of the solution's expansion at `t = 0`,
/// `x_t ≈ x₀ - (A_t/2) ∇g(x₀)` and `∫₀ᵗ a ∇g ≈ A_t ∇g(x₀)`, so the
/// integrator begins on the trajectory rather than at rest.
pub fn integrate(spec: &DynamicsSpec) -> Result<Trajectory> {
    if !(spec.dt > 0.0) || !(spec.horizon > spec.dt) {
        return Err(Error::InvalidConfig(format!(
            "need dt > 0 and horizon > dt, got dt={} horizon={}",
            spec.dt, spec.horizon
        )));
    }
    if spec.oracle.composite().is_some() {
        return Err(Error::Capability("continuous dynamics need l = 0".into()));
    }
    if !(spec.schedule.p > 1.0) {
        return Err(Error::InvalidConfig(format!(
            "schedule power must exceed 1, got {}",
            spec.schedule.p
        )));
    }
    let h = spec.dt;
    let steps = ((spec.horizon - h) / h).round() as usize;
    let mut t = h;
    let g0 = spec.oracle.gradient(&spec.x0);
    let a0 = spec.schedule.big_a(t);
    let mut x = &spec.x0 - &g0 * (0.5 * a0);
    let mut s = g0 * a0;
    let mut traj = Trajectory {
        t: Vec::with_capacity(steps + 1),
        x: Vec::with_capacity(steps + 1),
        f: Vec::with_capacity(steps + 1),
    };
    traj.t.push(t);
    traj.f.push(spec.oracle.value(&x));
    traj.x.push(x.clone());
    for k in 0..steps {
        let t_new = h * (k + 2) as f64;
        // the coefficient a/A ~ p/t is stiff near the start; substep until
        // the step is small relative to t
        let sub = ((SUBSTEP_RATIO * h / t).ceil() as usize).max(1);
        let hs = (t_new - t) / sub as f64;
        for j in 0..sub {
            let ts = t + hs * j as f64;
            rk4_step(spec, ts, hs, &mut x, &mut s);
        }
        let f = spec.oracle.value(&x);
        if !f.is_finite() || x.iter().any(|v| !v.is_finite()) || s.iter().any(|v| !v.is_finite()) {
            return Err(Error::IntegrationBlowup { last_finite_t: t });
        }
        t = t_new;
        traj.t.push(t);
        traj.x.push(x.clone());
        traj.f.push(f);
    }
    Ok(traj)
}

/// Max over interior grid points of
/// `||ẍ + (a/A)(d(A/a)/dt + 1) ẋ + (a²/A) ∇g(x)||` with central differences.
///
/// For `A_t = t²/4` this is `O(dt²)`. For higher schedule powers the
/// difference error near `t = 0` is amplified by `(p+1)/t` and the first
/// grid points dominate at `O(dt)`.
pub fn ode_residual(traj: &Trajectory, spec: &DynamicsSpec) -> f64 {
    let n = traj.t.len();
    if n < 3 {
        return 0.0;
    }
    let sch = spec.schedule;
    let ratio = |t: f64| sch.big_a(t) / sch.small_a(t);
    let mut worst: f64 = 0.0;
    for k in 1..n - 1 {
        let h = 0.5 * (traj.t[k + 1] - traj.t[k - 1]);
        let t = traj.t[k];
        let xd = (&traj.x[k + 1] - &traj.x[k - 1]) / (2.0 * h);
        let xdd = (&traj.x[k + 1] - &traj.x[k] * 2.0 + &traj.x[k - 1]) / (h * h);
        let a = sch.small_a(t);
        let big = sch.big_a(t);
        let ratio_dot = (ratio(t + h) - ratio(t - h)) / (2.0 * h);
        let res = xdd + xd * ((a / big) * (ratio_dot + 1.0)) + spec.oracle.gradient(&traj.x[k]) * (a * a / big);
        worst = worst.max(res.norm());
    }
    worst
}
