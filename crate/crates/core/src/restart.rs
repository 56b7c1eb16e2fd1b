//! Epoch-wise restarts of an inner solver with a sublinear rate
//! `f(A_m(y)) - f* <= c_A ||y - x*||^v / m^r` on an `(s, σ)`-uniformly
//! convex objective.

use log::debug;

use crate::error::{Error, Result};
use crate::oracle::Objective;
use crate::uaf::{heuristic_c0, run, UafConfig};
use crate::Vector;

#[derive(Debug, Clone)]
pub struct RestartConfig {
    pub s: f64,
    pub sigma: f64,
    pub v: f64,
    pub r: f64,
    pub c_a: f64,
    /// Bound `R` on `||x₀ - x*||`.
    pub radius: f64,
    /// Total number of epochs `K`.
    pub epochs: usize,
}

impl RestartConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.s >= 2.0
            && self.sigma > 0.0
            && self.v > 0.0
            && self.r > 0.0
            && self.c_a > 0.0
            && self.radius > 0.0;
        if ok && [self.s, self.sigma, self.v, self.r, self.c_a, self.radius].iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid restart configuration {self:?}")))
        }
    }

    /// `m₀ = ⌈(2^s s c_A R^{v-s} / σ)^{1/r}⌉`, at least 1.
    pub fn m0(&self) -> usize {
        let base = 2f64.powf(self.s) * self.s * self.c_a * self.radius.powf(self.v - self.s) / self.sigma;
        (base.powf(1.0 / self.r).ceil() as usize).max(1)
    }

    /// `k₀ = ⌈1/s + (v/s) log₂R + (1/(v-s)) log₂(s c_A/σ)⌉` when `s < v`,
    /// `None` (infinite) otherwise. Negative values clamp to 0.
    pub fn k0(&self) -> Option<usize> {
        if self.s >= self.v {
            return None;
        }
        let val = 1.0 / self.s
            + (self.v / self.s) * self.radius.log2()
            + (self.s * self.c_a / self.sigma).log2() / (self.v - self.s);
        Some(val.ceil().max(0.0) as usize)
    }

    /// `G = (σ^v / (s^v c_A^s))^{1/(v-s)}`, the scale of the superlinear
    /// phase; only meaningful for `s < v`.
    pub fn superlinear_scale(&self) -> f64 {
        (self.sigma.powf(self.v) / (self.s.powf(self.v) * self.c_a.powf(self.s))).powf(1.0 / (self.v - self.s))
    }
}

/// Iteration counts `m_0, …, m_{K-1}`.
pub fn epoch_schedule(cfg: &RestartConfig) -> Vec<usize> {
    let m0 = cfg.m0() as f64;
    let k0 = cfg.k0();
    (0..cfg.epochs)
        .map(|k| match k0 {
            Some(k0) if k >= k0 => 1,
            _ => {
                let m = (m0 * 2f64.powf(-(cfg.v - cfg.s) * k as f64 / cfg.r)).ceil();
                (m as usize).max(1)
            }
        })
        .collect()
}

/// An inner algorithm `A_m(y)`: `m` iterations warm-started at `y`.
pub trait InnerSolver {
    fn run_m(&self, y: &Vector, m: usize) -> Result<Vector>;
}

/// The accelerated loop as an inner solver; returns its last iterate.
pub struct UafInner<'o> {
    pub oracle: &'o dyn Objective,
    pub cfg: UafConfig,
}

impl InnerSolver for UafInner<'_> {
    fn run_m(&self, y: &Vector, m: usize) -> Result<Vector> {
        let mut cfg = self.cfg.clone();
        cfg.max_iter = m;
        cfg.stop_gap = None;
        Ok(run(self.oracle, &cfg, y)?.solution)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    /// Index of the produced iterate: the record holds `y_k`.
    pub k: usize,
    /// Iterations spent producing `y_k` (0 for `y_0`).
    pub m: usize,
    pub f_value: f64,
}

#[derive(Debug, Clone)]
pub struct RestartOutput {
    pub solution: Vector,
    /// `y_0, …, y_K`.
    pub epochs: Vec<EpochRecord>,
}

pub fn run_restarted(
    inner: &dyn InnerSolver,
    objective: &dyn Objective,
    cfg: &RestartConfig,
    x0: &Vector,
) -> Result<RestartOutput> {
    cfg.validate()?;
    let schedule = epoch_schedule(cfg);
    let mut y = x0.clone();
    let mut epochs = vec![EpochRecord {
        k: 0,
        m: 0,
        f_value: objective.value(&y),
    }];
    for (k, &m) in schedule.iter().enumerate() {
        y = inner.run_m(&y, m).map_err(|e| Error::Epoch {
            epoch: k,
            source: Box::new(e),
        })?;
        let f = objective.value(&y);
        debug!("epoch {k}: m = {m}, f = {f:.6e}");
        epochs.push(EpochRecord {
            k: k + 1,
            m,
            f_value: f,
        });
    }
    Ok(RestartOutput { solution: y, epochs })
}

/// `(c_A, r, v)` for the accelerated loop with `h = (1/q)||x - x₀||^q`.
/// For `q = p + ν`: `c_A = (p+ν)^{p+ν} L / (θ₁ c_q γ)`; otherwise
/// `c_A = C₀^{-(p+ν-q)/q} (p+ν)^r L`.
pub fn uaf_rate_constants(cfg: &UafConfig) -> Result<(f64, f64, f64)> {
    let pnu = cfg.p_nu();
    let r = cfg.rate_exponent();
    let c_a = if cfg.is_exact_regime() {
        pnu.powf(pnu) * cfg.lipschitz / (cfg.theta1 * cfg.c_q() * cfg.gamma)
    } else {
        let c0 = heuristic_c0(cfg)?;
        c0.powf(-(pnu - cfg.q) / cfg.q) * pnu.powf(r) * cfg.lipschitz
    };
    Ok((c_a, r, pnu))
}
