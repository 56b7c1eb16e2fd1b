//! Builds the objective named by a [`ProblemSpec`].

use std::fs::File;
use std::io::BufReader;

use sha2::{Digest, Sha256};
use uaf_core::problems::{
    parse_libsvm, random_spd_quadratic, synthetic_l1_least_squares, synthetic_logistic, L1LeastSquares,
    LogisticObjective, Quadratic,
};
use uaf_core::taylor::{design_spectral_norm, logistic_smoothness_constant};
use uaf_core::{Objective, Vector};

use crate::config::ProblemSpec;
use crate::CliError;

pub enum Instance {
    Quadratic(Quadratic),
    Logistic(LogisticObjective),
    Lasso(L1LeastSquares),
}

pub struct BuiltProblem {
    pub instance: Instance,
    pub x0: Vector,
    /// Stable description of the problem data, used as the cache key.
    pub key: String,
}

impl BuiltProblem {
    pub fn objective(&self) -> &dyn Objective {
        match &self.instance {
            Instance::Quadratic(q) => q,
            Instance::Logistic(l) => l,
            Instance::Lasso(l) => l,
        }
    }

    pub fn logistic(&self) -> Option<&LogisticObjective> {
        match &self.instance {
            Instance::Logistic(l) => Some(l),
            _ => None,
        }
    }

    /// Exact minimizer and optimal value when known in closed form.
    pub fn known_solution(&self) -> Option<(Vector, f64)> {
        match &self.instance {
            Instance::Quadratic(q) => Some((q.minimizer()?.clone(), q.optimal_value()?)),
            _ => None,
        }
    }

    /// Hölder constant of the `p`-th derivative with exponent `nu`.
    pub fn holder_constant(&self, p: usize, nu: f64) -> Result<f64, CliError> {
        let unsupported = || {
            Err(CliError::Config(format!(
                "no built-in Hölder constant for p = {p}, nu = {nu}; set L"
            )))
        };
        match (&self.instance, p) {
            (Instance::Quadratic(q), 1) if nu == 1.0 => Ok(q.gradient_lipschitz()),
            (Instance::Quadratic(q), 2) => Ok(q.hessian_holder_constant()),
            (Instance::Logistic(l), 1) if nu == 1.0 => Ok(design_spectral_norm(l.dataset())? / 4.0),
            (Instance::Logistic(l), 2) => Ok(logistic_smoothness_constant(l.dataset(), 2.0, nu)?),
            (Instance::Lasso(l), 1) if nu == 1.0 => Ok(l.gradient_lipschitz()),
            _ => unsupported(),
        }
    }

    /// Lipschitz constant of the gradient of the smooth part.
    pub fn gradient_lipschitz(&self) -> Result<f64, CliError> {
        self.holder_constant(1, 1.0)
    }
}

pub fn build_problem(spec: &ProblemSpec) -> Result<BuiltProblem, CliError> {
    let (instance, key) = match spec {
        ProblemSpec::Quadratic { dim, cond, seed } => (
            Instance::Quadratic(random_spd_quadratic(*dim, *cond, *seed)?),
            format!("quadratic dim={dim} cond={cond:e} seed={seed}"),
        ),
        ProblemSpec::SyntheticLogistic { samples, dim, flip, seed } => (
            Instance::Logistic(LogisticObjective::new(synthetic_logistic(*samples, *dim, *seed, *flip))),
            format!("logistic n={samples} d={dim} flip={flip:e} seed={seed}"),
        ),
        ProblemSpec::FileLogistic { path } => {
            let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let digest = Sha256::digest(&bytes);
            let file = File::open(path).map_err(|e| CliError::io(path, e))?;
            let data = parse_libsvm(BufReader::new(file))
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            if data.is_empty() {
                return Err(CliError::Config(format!("{}: no examples", path.display())));
            }
            let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
            (Instance::Logistic(LogisticObjective::new(data)), format!("logistic file sha256={hex}"))
        }
        ProblemSpec::Lasso { samples, dim, reg, seed } => (
            Instance::Lasso(synthetic_l1_least_squares(*samples, *dim, *reg, *seed)?),
            format!("lasso n={samples} d={dim} reg={reg:e} seed={seed}"),
        ),
    };
    let dim = match &instance {
        Instance::Quadratic(q) => q.dim(),
        Instance::Logistic(l) => l.dim(),
        Instance::Lasso(l) => l.dim(),
    };
    Ok(BuiltProblem {
        instance,
        x0: Vector::zeros(dim),
        key,
    })
}
