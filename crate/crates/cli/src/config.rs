//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Every key can also be
//! given as a command-line flag of the same name, which wins over the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use uaf_core::subsolver::SubsolverChoice;
use uaf_core::uaf::{Strategy, ViolationPolicy};

use crate::CliError;

/// Every recognised key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("problem", "quadratic | logistic | lasso"),
    ("dataset", "LIBSVM file for the logistic problem (default: synthetic data)"),
    ("dim", "dimension of synthetic problems"),
    ("samples", "number of synthetic examples (logistic, lasso)"),
    ("cond", "condition number of the synthetic quadratic"),
    ("flip", "label-flip probability of synthetic logistic data"),
    ("reg", "l1 weight of the lasso problem"),
    ("seed", "seed for problem generation and stochastic solvers"),
    ("solver", "uaf | uaf_restart | svrg | gd | continuum"),
    ("p", "Taylor model order (1 or 2)"),
    ("nu", "Hölder exponent of the p-th derivative"),
    ("L", "Hölder constant; default is the problem's own constant"),
    ("q", "proxy order in [2, p + nu] (default p + nu)"),
    ("alpha", "step-power interpolation in [0, 1]"),
    ("theta1", "lower indicator bound"),
    ("theta2", "upper indicator bound"),
    ("strategy", "exact | heuristic | bisection (default by q)"),
    ("h_star", "estimate of h(x*; x0) for the heuristic, or 'pilot'"),
    ("violation", "warn | bisect: heuristic response to indicator > theta2"),
    ("subsolver", "auto | exact | krylov | generic"),
    ("max_iter", "iteration budget"),
    ("time_budget", "wall-clock budget in seconds"),
    ("stop_gap", "stop once f - f_ref falls below this"),
    ("sigma", "uniform-convexity modulus for restarts"),
    ("s", "uniform-convexity order for restarts"),
    ("radius", "bound on ||x0 - x*|| for restarts (default: from the reference)"),
    ("epochs", "restart epochs or SVRG epochs"),
    ("lr", "SVRG learning rate"),
    ("epoch_length", "SVRG inner steps per epoch (default 2n)"),
    ("step", "gradient-descent step (default 1/L of the gradient)"),
    ("schedule_p", "continuum weight schedule A_t = t^p / p^2"),
    ("dt", "continuum step"),
    ("horizon", "continuum end time"),
    ("trace", "trace CSV output path"),
    ("summary", "JSON summary output path"),
    ("fit_lo", "first iteration of the rate-fit window"),
    ("fit_hi", "last iteration of the rate-fit window"),
    ("fit_shrink", "true: shrink the fit window at the precision floor instead of failing"),
    ("L_grid", "comma-separated L values for the matrix command"),
    ("q_grid", "comma-separated q values for the matrix command"),
    ("out_dir", "output directory of the matrix command"),
    ("ref_budget", "iteration budget of the reference solve"),
];

pub fn is_key(k: &str) -> bool {
    KEYS.iter().any(|(name, _)| *name == k)
}

/// Parses the flat text form into a key map. Unknown keys and repeated
/// keys are errors.
pub fn parse_flat(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if !is_key(k) {
            return Err(CliError::Config(format!("line {}: unknown key {k:?}", i + 1)));
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(CliError::Config(format!("line {}: key {k:?} given twice", i + 1)));
        }
    }
    Ok(map)
}

/// Reads the optional config file and applies `overrides` (from flags) on
/// top of it.
pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<ExperimentConfig, CliError> {
    let mut map = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            parse_flat(&text)?
        }
        None => BTreeMap::new(),
    };
    for (k, v) in overrides {
        if !is_key(k) {
            return Err(CliError::Config(format!("unknown key {k:?}")));
        }
        map.insert(k.clone(), v.clone());
    }
    ExperimentConfig::from_map(&map)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Quadratic { dim: usize, cond: f64, seed: u64 },
    SyntheticLogistic { samples: usize, dim: usize, flip: f64, seed: u64 },
    FileLogistic { path: PathBuf },
    Lasso { samples: usize, dim: usize, reg: f64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Uaf,
    UafRestart,
    Svrg,
    Gd,
    Continuum,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HStar {
    Value(f64),
    Pilot,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub seed: u64,
    pub solver: SolverKind,
    pub p: usize,
    pub nu: f64,
    pub lipschitz: Option<f64>,
    pub q: Option<f64>,
    pub alpha: f64,
    pub theta1: Option<f64>,
    pub theta2: Option<f64>,
    pub strategy: Option<Strategy>,
    pub h_star: Option<HStar>,
    pub violation: ViolationPolicy,
    pub subsolver: SubsolverChoice,
    pub max_iter: usize,
    pub time_budget: Option<f64>,
    pub stop_gap: Option<f64>,
    pub sigma: Option<f64>,
    pub s: f64,
    pub radius: Option<f64>,
    pub epochs: usize,
    pub lr: Option<f64>,
    pub epoch_length: Option<usize>,
    pub step: Option<f64>,
    pub schedule_p: f64,
    pub dt: f64,
    pub horizon: f64,
    pub trace: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub fit_lo: Option<usize>,
    pub fit_hi: Option<usize>,
    pub fit_shrink: bool,
    pub l_grid: Vec<f64>,
    pub q_grid: Vec<f64>,
    pub out_dir: Option<PathBuf>,
    pub ref_budget: usize,
}

struct Reader<'m> {
    map: &'m BTreeMap<String, String>,
}

impl Reader<'_> {
    fn raw(&self, k: &str) -> Option<&str> {
        self.map.get(k).map(|s| s.as_str())
    }

    fn parse<T: std::str::FromStr>(&self, k: &str) -> Result<Option<T>, CliError> {
        match self.raw(k) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| CliError::Config(format!("key {k}: cannot parse {v:?}"))),
        }
    }

    fn or<T: std::str::FromStr>(&self, k: &str, default: T) -> Result<T, CliError> {
        Ok(self.parse(k)?.unwrap_or(default))
    }

    fn list(&self, k: &str) -> Result<Vec<f64>, CliError> {
        match self.raw(k) {
            None => Ok(Vec::new()),
            Some(v) => v
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Config(format!("key {k}: cannot parse {x:?}")))
                })
                .collect(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self, CliError> {
        for k in map.keys() {
            if !is_key(k) {
                return Err(CliError::Config(format!("unknown key {k:?}")));
            }
        }
        let r = Reader { map };
        let seed: u64 = r.or("seed", 0)?;
        let problem = match r.raw("problem").unwrap_or("quadratic") {
            "quadratic" => ProblemSpec::Quadratic {
                dim: r.or("dim", 20)?,
                cond: r.or("cond", 10.0)?,
                seed,
            },
            "logistic" => match r.raw("dataset") {
                Some(path) => ProblemSpec::FileLogistic { path: PathBuf::from(path) },
                None => ProblemSpec::SyntheticLogistic {
                    samples: r.or("samples", 500)?,
                    dim: r.or("dim", 20)?,
                    flip: r.or("flip", 0.05)?,
                    seed,
                },
            },
            "lasso" => ProblemSpec::Lasso {
                samples: r.or("samples", 60)?,
                dim: r.or("dim", 20)?,
                reg: r.or("reg", 0.1)?,
                seed,
            },
            other => return Err(CliError::Config(format!("unknown problem {other:?}"))),
        };
        if r.raw("dataset").is_some() && !matches!(problem, ProblemSpec::FileLogistic { .. }) {
            return Err(CliError::Config("dataset is only used with problem = logistic".into()));
        }
        let solver = match r.raw("solver").unwrap_or("uaf") {
            "uaf" => SolverKind::Uaf,
            "uaf_restart" => SolverKind::UafRestart,
            "svrg" => SolverKind::Svrg,
            "gd" => SolverKind::Gd,
            "continuum" => SolverKind::Continuum,
            other => return Err(CliError::Config(format!("unknown solver {other:?}"))),
        };
        let strategy = match r.raw("strategy") {
            None => None,
            Some("exact") => Some(Strategy::ExactQEqualsPNu),
            Some("heuristic") => Some(Strategy::Heuristic),
            Some("bisection") => Some(Strategy::Bisection),
            Some(other) => return Err(CliError::Config(format!("unknown strategy {other:?}"))),
        };
        let h_star = match r.raw("h_star") {
            None => None,
            Some("pilot") => Some(HStar::Pilot),
            Some(_) => Some(HStar::Value(r.parse("h_star")?.expect("present"))),
        };
        let violation = match r.raw("violation").unwrap_or("warn") {
            "warn" => ViolationPolicy::WarnContinue,
            "bisect" => ViolationPolicy::FallbackBisection,
            other => return Err(CliError::Config(format!("unknown violation policy {other:?}"))),
        };
        let subsolver = match r.raw("subsolver").unwrap_or("auto") {
            "auto" => SubsolverChoice::Auto,
            "exact" => SubsolverChoice::Exact,
            "krylov" => SubsolverChoice::Krylov,
            "generic" => SubsolverChoice::Generic,
            other => return Err(CliError::Config(format!("unknown subsolver {other:?}"))),
        };
        let cfg = ExperimentConfig {
            problem,
            seed,
            solver,
            p: r.or("p", 2)?,
            nu: r.or("nu", 1.0)?,
            lipschitz: r.parse("L")?,
            q: r.parse("q")?,
            alpha: r.or("alpha", 1.0)?,
            theta1: r.parse("theta1")?,
            theta2: r.parse("theta2")?,
            strategy,
            h_star,
            violation,
            subsolver,
            max_iter: r.or("max_iter", 100)?,
            time_budget: r.parse("time_budget")?,
            stop_gap: r.parse("stop_gap")?,
            sigma: r.parse("sigma")?,
            s: r.or("s", 2.0)?,
            radius: r.parse("radius")?,
            epochs: r.or("epochs", 8)?,
            lr: r.parse("lr")?,
            epoch_length: r.parse("epoch_length")?,
            step: r.parse("step")?,
            schedule_p: r.or("schedule_p", 2.0)?,
            dt: r.or("dt", 1e-3)?,
            horizon: r.or("horizon", 10.0)?,
            trace: r.raw("trace").map(PathBuf::from),
            summary: r.raw("summary").map(PathBuf::from),
            fit_lo: r.parse("fit_lo")?,
            fit_hi: r.parse("fit_hi")?,
            fit_shrink: r.or("fit_shrink", false)?,
            l_grid: r.list("L_grid")?,
            q_grid: r.list("q_grid")?,
            out_dir: r.raw("out_dir").map(PathBuf::from),
            ref_budget: r.or("ref_budget", 500)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks that do not need the problem built, including that referenced
    /// files exist.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if let ProblemSpec::FileLogistic { path } = &self.problem {
            if !path.is_file() {
                return Err(CliError::Config(format!("dataset {} does not exist", path.display())));
            }
        }
        match &self.problem {
            ProblemSpec::Quadratic { dim, cond, .. } => {
                if *dim == 0 || !(*cond >= 1.0) {
                    return bad("quadratic needs dim >= 1 and cond >= 1");
                }
            }
            ProblemSpec::SyntheticLogistic { samples, dim, flip, .. } => {
                if *samples == 0 || *dim == 0 || !(0.0..=1.0).contains(flip) {
                    return bad("logistic needs samples, dim >= 1 and flip in [0, 1]");
                }
            }
            ProblemSpec::Lasso { samples, dim, reg, .. } => {
                if *samples == 0 || *dim == 0 || !(*reg >= 0.0) {
                    return bad("lasso needs samples, dim >= 1 and reg >= 0");
                }
            }
            ProblemSpec::FileLogistic { .. } => {}
        }
        if self.fit_lo.zip(self.fit_hi).is_some_and(|(lo, hi)| lo > hi) {
            return bad("fit_lo must not exceed fit_hi");
        }
        if !(self.dt > 0.0) || !(self.horizon > self.dt) {
            return bad("need dt > 0 and horizon > dt");
        }
        if self.l_grid.iter().any(|l| !(*l > 0.0)) {
            return bad("L_grid entries must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_parser_handles_comments() {
        let m = parse_flat("# header\nproblem = logistic  # inline\n\nq=2.5\n").unwrap();
        assert_eq!(m["problem"], "logistic");
        assert_eq!(m["q"], "2.5");
    }

    #[test]
    fn flat_parser_rejects_unknown_and_repeated() {
        assert!(matches!(parse_flat("bogus = 1"), Err(CliError::Config(_))));
        assert!(matches!(parse_flat("q = 1\nq = 2"), Err(CliError::Config(_))));
        assert!(matches!(parse_flat("q 1"), Err(CliError::Config(_))));
    }

    #[test]
    fn missing_dataset_is_config_error() {
        let m = parse_flat("problem = logistic\ndataset = /nonexistent/file.svm").unwrap();
        assert!(matches!(ExperimentConfig::from_map(&m), Err(CliError::Config(_))));
    }

    #[test]
    fn defaults() {
        let cfg = ExperimentConfig::from_map(&BTreeMap::new()).unwrap();
        assert_eq!(cfg.solver, SolverKind::Uaf);
        assert_eq!(cfg.p, 2);
        assert!(matches!(cfg.problem, ProblemSpec::Quadratic { dim: 20, .. }));
    }

    #[test]
    fn flags_override_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        std::io::Write::write_all(&mut f, b"max_iter = 10\nq = 2\n").unwrap();
        let cfg = load(Some(f.path()), &[("max_iter".into(), "7".into())]).unwrap();
        assert_eq!(cfg.max_iter, 7);
        assert_eq!(cfg.q, Some(2.0));
        assert!(load(Some(Path::new("/nonexistent.cfg")), &[]).is_err());
    }

    #[test]
    fn grids_parse() {
        let m = parse_flat("L_grid = 0.001, 0.1,10\nq_grid=2,3").unwrap();
        let cfg = ExperimentConfig::from_map(&m).unwrap();
        assert_eq!(cfg.l_grid, vec![0.001, 0.1, 10.0]);
        assert_eq!(cfg.q_grid, vec![2.0, 3.0]);
    }
}
