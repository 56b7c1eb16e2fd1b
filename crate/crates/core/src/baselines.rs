//! First-order reference methods: SVRG on the logistic finite sum and
//! proximal gradient descent on any composite objective.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::oracle::Objective;
use crate::problems::LogisticObjective;
use crate::Vector;

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineRecord {
    /// Epoch (SVRG) or iteration (GD); 0 is the starting point.
    pub iter: usize,
    pub f_value: f64,
    /// Cumulative per-example gradient evaluations, in units of one full
    /// gradient (`n` example gradients).
    pub grad_evals: f64,
}

#[derive(Debug, Clone)]
pub struct BaselineOutput {
    pub solution: Vector,
    pub trace: Vec<BaselineRecord>,
}

#[derive(Debug, Clone)]
pub struct SvrgConfig {
    pub learning_rate: f64,
    /// Inner steps per epoch; `None` means `2n`.
    pub epoch_length: Option<usize>,
    pub epochs: usize,
    pub seed: u64,
}

/// SVRG with the last inner iterate as the next snapshot.
pub fn run_svrg(obj: &LogisticObjective, cfg: &SvrgConfig, x0: &Vector) -> Result<BaselineOutput> {
    let n = obj.dataset().len();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    if !(cfg.learning_rate > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "learning rate must be positive, got {}",
            cfg.learning_rate
        )));
    }
    let m = cfg.epoch_length.unwrap_or(2 * n);
    let eta = cfg.learning_rate;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let f0 = obj.value(x0);
    let mut x = x0.clone();
    let mut evals = 0.0;
    let mut trace = vec![BaselineRecord {
        iter: 0,
        f_value: f0,
        grad_evals: 0.0,
    }];
    for epoch in 1..=cfg.epochs {
        let snapshot = x.clone();
        let mu = obj.gradient(&snapshot);
        evals += 1.0;
        for _ in 0..m {
            let j = rng.random_range(0..n);
            // x ← x - η(∇f_j(x) - ∇f_j(x̃) + μ)
            let mut dir = mu.clone();
            obj.add_row_gradient(j, &x, 1.0, &mut dir);
            obj.add_row_gradient(j, &snapshot, -1.0, &mut dir);
            x.axpy(-eta, &dir, 1.0);
        }
        evals += 2.0 * m as f64 / n as f64;
        let f = obj.value(&x);
        if !f.is_finite() || f > 10.0 * f0.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::StepSize { value: f, initial: f0 });
        }
        trace.push(BaselineRecord {
            iter: epoch,
            f_value: f,
            grad_evals: evals,
        });
    }
    Ok(BaselineOutput { solution: x, trace })
}

/// Proximal gradient descent `x ← prox_l(x - η∇g(x), η)`.
pub fn run_gd(oracle: &dyn Objective, step: f64, iters: usize, x0: &Vector) -> Result<BaselineOutput> {
    if !(step > 0.0) {
        return Err(Error::InvalidConfig(format!("step must be positive, got {step}")));
    }
    let composite = oracle.composite();
    let mut x = x0.clone();
    let mut trace = Vec::with_capacity(iters + 1);
    trace.push(BaselineRecord {
        iter: 0,
        f_value: oracle.value(&x),
        grad_evals: 0.0,
    });
    for k in 1..=iters {
        let trial = &x - oracle.gradient(&x) * step;
        x = match composite {
            Some(l) => l.prox(&trial, step),
            None => trial,
        };
        trace.push(BaselineRecord {
            iter: k,
            f_value: oracle.value(&x),
            grad_evals: k as f64,
        });
    }
    Ok(BaselineOutput { solution: x, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_quadratic, parse_libsvm_str, synthetic_logistic, QuadraticSpec};

    #[test]
    fn gd_one_step_on_unit_quadratic() {
        let q = make_quadratic(QuadraticSpec::Diagonal(vec![1.0]), Vector::zeros(1), true).unwrap();
        let out = run_gd(&q, 1.0, 1, &Vector::from_element(1, 5.0)).unwrap();
        assert_eq!(out.solution[0], 0.0);
    }

    #[test]
    fn gd_monotone_with_short_step() {
        let q = make_quadratic(QuadraticSpec::Diagonal(vec![1.0, 4.0, 9.0]), Vector::zeros(3), true).unwrap();
        let out = run_gd(&q, 1.0 / 9.0, 50, &Vector::from_vec(vec![1.0, 1.0, 1.0])).unwrap();
        assert!(out.trace.windows(2).all(|w| w[1].f_value <= w[0].f_value));
    }

    #[test]
    fn svrg_tiny_step_stays_near_start() {
        let data = synthetic_logistic(30, 4, 1, 0.1);
        let obj = LogisticObjective::new(data);
        let cfg = SvrgConfig {
            learning_rate: 1e-300,
            epoch_length: None,
            epochs: 3,
            seed: 5,
        };
        let x0 = Vector::from_vec(vec![0.1, 0.2, 0.3, 0.4]);
        let out = run_svrg(&obj, &cfg, &x0).unwrap();
        assert_eq!(out.solution, x0);
    }

    #[test]
    fn svrg_single_example_is_gradient_descent() {
        let data = parse_libsvm_str("+1 1:0.5 2:-1.0\n").unwrap();
        let obj = LogisticObjective::new(data);
        let cfg = SvrgConfig {
            learning_rate: 0.3,
            epoch_length: Some(4),
            epochs: 2,
            seed: 0,
        };
        let x0 = Vector::zeros(2);
        let out = run_svrg(&obj, &cfg, &x0).unwrap();
        let gd = run_gd(&obj, 0.3, 8, &x0).unwrap();
        assert!((out.solution - gd.solution).norm() < 1e-12);
    }

    #[test]
    fn svrg_is_seed_deterministic() {
        let obj = LogisticObjective::new(synthetic_logistic(50, 5, 2, 0.1));
        let cfg = SvrgConfig {
            learning_rate: 0.5,
            epoch_length: None,
            epochs: 3,
            seed: 11,
        };
        let a = run_svrg(&obj, &cfg, &Vector::zeros(5)).unwrap();
        let b = run_svrg(&obj, &cfg, &Vector::zeros(5)).unwrap();
        assert_eq!(a.solution, b.solution);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn svrg_divergence_is_reported() {
        let obj = LogisticObjective::new(synthetic_logistic(50, 5, 2, 0.1));
        let cfg = SvrgConfig {
            learning_rate: 1e6,
            epoch_length: None,
            epochs: 3,
            seed: 11,
        };
        assert!(matches!(
            run_svrg(&obj, &cfg, &Vector::zeros(5)),
            Err(Error::StepSize { .. })
        ));
    }
}
