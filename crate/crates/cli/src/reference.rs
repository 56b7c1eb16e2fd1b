//! High-accuracy reference solutions, cached on disk by problem key.

use std::fs;
use std::path::{Path, PathBuf};

use log::{debug, info};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use uaf_core::baselines::run_gd;
use uaf_core::uaf::{run, UafConfig};
use uaf_core::{Objective, Vector};

use crate::problem::BuiltProblem;
use crate::CliError;

/// Environment variable naming the cache directory. Without it nothing is
/// cached.
pub const CACHE_ENV: &str = "UAF_CACHE_DIR";

/// Stationarity residual below which the reference counts as converged.
pub const RESIDUAL_TOL: f64 = 1e-10;

const NEWTON_MAX_DIM: usize = 256;
const CACHE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub x_ref: Vec<f64>,
    pub f_ref: f64,
    /// Stationarity residual at `x_ref`.
    pub residual: f64,
    /// False when the budget ran out first.
    pub converged: bool,
}

impl Reference {
    pub fn x(&self) -> Vector {
        Vector::from_vec(self.x_ref.clone())
    }
}

#[derive(Debug, Clone)]
pub struct ReferenceOutcome {
    pub reference: Reference,
    pub from_cache: bool,
}

fn residual(obj: &dyn Objective, x: &Vector) -> f64 {
    let g = obj.gradient(x);
    match obj.composite() {
        Some(l) => l.stationarity(x, &g),
        None => g.norm(),
    }
}

/// Damped Newton on the dense Hessian; stops when the gradient stops
/// shrinking.
fn newton_polish(obj: &dyn Objective, mut x: Vector, iters: usize) -> Vector {
    for _ in 0..iters {
        let g = obj.gradient(&x);
        if g.norm() <= RESIDUAL_TOL * 1e-3 {
            break;
        }
        let Some(chol) = obj.dense_hessian(&x).and_then(|h| h.cholesky()) else {
            break;
        };
        let d = chol.solve(&g);
        let f0 = obj.value(&x);
        let mut t = 1.0;
        while obj.value(&(&x - &d * t)) > f0 && t > 1e-12 {
            t *= 0.5;
        }
        let next = &x - &d * t;
        if obj.gradient(&next).norm() >= g.norm() {
            break;
        }
        x = next;
    }
    x
}

fn compute(problem: &BuiltProblem, budget: usize) -> Result<Reference, CliError> {
    let obj = problem.objective();
    let x0 = &problem.x0;
    let x = if budget == 0 {
        x0.clone()
    } else if obj.composite().is_none() && obj.smooth_order() >= 2 {
        let mut cfg = UafConfig::new(2, 1.0, problem.holder_constant(2, 1.0)?, 3.0);
        cfg.max_iter = budget;
        let out = run(obj, &cfg, x0)?;
        if obj.dim() <= NEWTON_MAX_DIM {
            newton_polish(obj, out.best_x, budget.min(100))
        } else {
            out.best_x
        }
    } else {
        let lip = problem.gradient_lipschitz()?;
        let mut cfg = UafConfig::new(1, 1.0, lip, 2.0);
        cfg.max_iter = budget;
        let out = run(obj, &cfg, x0)?;
        // proximal gradient is monotone, so it polishes without overshoot
        run_gd(obj, 1.0 / lip, 10 * budget, &out.best_x)?.solution
    };
    let res = residual(obj, &x);
    Ok(Reference {
        f_ref: obj.value(&x),
        x_ref: x.iter().copied().collect(),
        residual: res,
        converged: budget > 0 && res <= RESIDUAL_TOL,
    })
}

fn cache_path(dir: &Path, problem: &BuiltProblem, budget: usize) -> PathBuf {
    let mut h = Sha256::new();
    h.update(format!("v{CACHE_VERSION}\n{}\nbudget={budget}", problem.key).as_bytes());
    let hex: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    dir.join(format!("ref-{hex}.json"))
}

/// Like [`reference_solution`] with an explicit cache directory.
pub fn reference_solution_in(
    problem: &BuiltProblem,
    budget: usize,
    cache_dir: Option<&Path>,
) -> Result<ReferenceOutcome, CliError> {
    let path = cache_dir.map(|d| cache_path(d, problem, budget));
    if let Some(path) = &path {
        if let Ok(text) = fs::read_to_string(path) {
            match serde_json::from_str::<Reference>(&text) {
                Ok(reference) => {
                    debug!("reference cache hit {}", path.display());
                    return Ok(ReferenceOutcome {
                        reference,
                        from_cache: true,
                    });
                }
                Err(e) => info!("ignoring unreadable cache entry {}: {e}", path.display()),
            }
        }
    }
    let reference = compute(problem, budget)?;
    if !reference.converged {
        info!(
            "reference for '{}' not converged (residual {:.3e})",
            problem.key, reference.residual
        );
    }
    if let Some(path) = &path {
        let dir = path.parent().expect("cache file has a parent");
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let text = serde_json::to_string_pretty(&reference).map_err(|e| CliError::Other(e.to_string()))?;
        fs::write(&tmp, text).map_err(|e| CliError::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))?;
    }
    Ok(ReferenceOutcome {
        reference,
        from_cache: false,
    })
}

/// Minimizes the problem as accurately as `budget` outer iterations allow,
/// caching the result in the directory named by [`CACHE_ENV`].
pub fn reference_solution(problem: &BuiltProblem, budget: usize) -> Result<ReferenceOutcome, CliError> {
    let dir = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    reference_solution_in(problem, budget, dir.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ProblemSpec;
    use crate::problem::build_problem;

    #[test]
    fn quadratic_matches_analytic_minimizer() {
        let p = build_problem(&ProblemSpec::Quadratic { dim: 10, cond: 100.0, seed: 3 }).unwrap();
        let r = reference_solution_in(&p, 50, None).unwrap().reference;
        let (x_star, f_star) = p.known_solution().unwrap();
        assert!((r.x() - x_star).amax() < 1e-10);
        assert!((r.f_ref - f_star).abs() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn zero_budget_returns_start_flagged() {
        let p = build_problem(&ProblemSpec::SyntheticLogistic { samples: 40, dim: 5, flip: 0.1, seed: 1 }).unwrap();
        let r = reference_solution_in(&p, 0, None).unwrap().reference;
        assert_eq!(r.x(), p.x0);
        assert!(!r.converged);
    }

    #[test]
    fn lasso_reference_is_stationary() {
        let p = build_problem(&ProblemSpec::Lasso { samples: 40, dim: 10, reg: 0.05, seed: 2 }).unwrap();
        let r = reference_solution_in(&p, 300, None).unwrap().reference;
        assert!(r.converged, "residual {}", r.residual);
    }

    #[test]
    fn second_call_hits_cache() {
        let dir = tempfile::tempdir().unwrap();
        let p = build_problem(&ProblemSpec::SyntheticLogistic { samples: 60, dim: 6, flip: 0.1, seed: 4 }).unwrap();
        let first = reference_solution_in(&p, 30, Some(dir.path())).unwrap();
        assert!(!first.from_cache);
        let file = cache_path(dir.path(), &p, 30);
        let bytes = fs::read(&file).unwrap();
        let second = reference_solution_in(&p, 30, Some(dir.path())).unwrap();
        assert!(second.from_cache);
        assert_eq!(first.reference, second.reference);
        assert_eq!(fs::read(&file).unwrap(), bytes);
    }
}
