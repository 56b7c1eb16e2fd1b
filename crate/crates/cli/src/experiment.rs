//! Solver dispatch, trace assembly and output files.

use std::cell::RefCell;
use std::fs;
use std::path::Path;
use std::time::Instant;

use log::{info, warn};
use serde::{Deserialize, Serialize};
use uaf_core::baselines::{run_gd, run_svrg, BaselineRecord, SvrgConfig};
use uaf_core::continuum::{integrate, ode_residual, DynamicsSpec, PowerSchedule};
use uaf_core::restart::{run_restarted, uaf_rate_constants, InnerSolver, RestartConfig, UafInner};
use uaf_core::subsolver::SubsolverOptions;
use uaf_core::trace::{write_csv, TraceRecord};
use uaf_core::uaf::{pilot_h_star, run, ProxyFunction, Strategy, UafConfig};
use uaf_core::Vector;

use crate::config::{ExperimentConfig, HStar, SolverKind};
use crate::fit::fit_rate;
use crate::problem::{build_problem, BuiltProblem, Instance};
use crate::reference::{reference_solution, Reference};
use crate::CliError;

/// Absolute slack added to the certificate bound, covering the error of
/// `x_ref` in place of `x*`.
pub const CERTIFICATE_SLACK: f64 = 1e-9;

/// Pilot length for `h_star = pilot`.
pub const PILOT_ITERATIONS: usize = 50;

/// The JSON summary written next to each trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub solver: String,
    pub iterations: usize,
    pub final_f: f64,
    pub final_gap: Option<f64>,
    /// Rows with `gap > h_ref / A + slack`; `None` where `A` is not a
    /// certificate weight.
    pub certificate_violations: Option<usize>,
    pub slope: Option<f64>,
    pub f_ref: f64,
    /// `h(x_ref; x₀)` for the run's proxy order.
    pub h_ref: f64,
    pub stop: String,
}

pub const SUMMARY_KEYS: &[&str] = &[
    "solver",
    "iterations",
    "final_f",
    "final_gap",
    "certificate_violations",
    "slope",
    "f_ref",
    "h_ref",
    "stop",
];

#[derive(Debug, Clone)]
pub struct RunResult {
    pub trace: Vec<TraceRecord>,
    pub summary: Summary,
}

/// Rows whose gap exceeds `h_ref / A + slack`.
pub fn certificate_failures(trace: &[TraceRecord], h_ref: f64) -> Vec<usize> {
    trace
        .iter()
        .filter(|r| match r.gap_vs_ref {
            Some(g) => g > h_ref / r.a_total + CERTIFICATE_SLACK,
            None => true,
        })
        .map(|r| r.iter)
        .collect()
}

fn solver_name(kind: SolverKind) -> &'static str {
    match kind {
        SolverKind::Uaf => "uaf",
        SolverKind::UafRestart => "uaf_restart",
        SolverKind::Svrg => "svrg",
        SolverKind::Gd => "gd",
        SolverKind::Continuum => "continuum",
    }
}

fn h_of(x0: &Vector, x_ref: &Vector, q: f64) -> f64 {
    ProxyFunction::new(x0.clone(), q).value(x_ref)
}

/// Assembles the accelerated-loop configuration from the experiment keys.
pub fn uaf_config(
    cfg: &ExperimentConfig,
    problem: &BuiltProblem,
    reference: &Reference,
) -> Result<UafConfig, CliError> {
    let lip = match cfg.lipschitz {
        Some(l) => l,
        None => problem.holder_constant(cfg.p, cfg.nu)?,
    };
    let q = cfg.q.unwrap_or(cfg.p as f64 + cfg.nu);
    let mut u = UafConfig::new(cfg.p, cfg.nu, lip, q);
    u.alpha = cfg.alpha;
    if let Some(t) = cfg.theta1 {
        u.theta1 = t;
    }
    if let Some(t) = cfg.theta2 {
        u.theta2 = t;
    }
    if let Some(s) = cfg.strategy {
        u.strategy = s;
    }
    u.violation_policy = cfg.violation;
    u.subsolver = SubsolverOptions {
        choice: cfg.subsolver,
        ..SubsolverOptions::default()
    };
    u.max_iter = cfg.max_iter;
    u.time_budget = cfg.time_budget;
    u.f_ref = Some(reference.f_ref);
    u.stop_gap = cfg.stop_gap;
    if u.strategy == Strategy::Heuristic {
        u.h_star_estimate = Some(match &cfg.h_star {
            Some(HStar::Value(v)) => *v,
            Some(HStar::Pilot) => pilot_h_star(problem.objective(), &u, &problem.x0, PILOT_ITERATIONS)?,
            None => {
                let h = h_of(&problem.x0, &reference.x(), u.q);
                info!("heuristic schedule uses h(x_ref; x0) = {h:.6e}");
                h
            }
        });
    }
    u.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(u)
}

/// Records every epoch output so the trace can report displacements.
struct Recording<'a> {
    inner: UafInner<'a>,
    outputs: RefCell<Vec<Vector>>,
}

impl InnerSolver for Recording<'_> {
    fn run_m(&self, y: &Vector, m: usize) -> uaf_core::Result<Vector> {
        let x = self.inner.run_m(y, m)?;
        self.outputs.borrow_mut().push(x.clone());
        Ok(x)
    }
}

/// Baseline records become trace rows with `A` the cumulative gradient
/// count. Wall time is apportioned by gradient count since baselines do
/// not time individual epochs.
fn baseline_trace(records: &[BaselineRecord], f_ref: f64, elapsed: f64) -> Vec<TraceRecord> {
    let total = records.last().map_or(1.0, |r| r.grad_evals.max(1e-300));
    records
        .iter()
        .filter(|r| r.iter > 0)
        .map(|r| TraceRecord {
            iter: r.iter,
            f_value: r.f_value,
            gap_vs_ref: Some(r.f_value - f_ref),
            omega: 0.0,
            lambda: 0.0,
            a_total: r.grad_evals,
            displacement: 0.0,
            wall_seconds: elapsed * r.grad_evals / total,
        })
        .collect()
}

/// Runs one configured solver against a prepared problem and reference.
pub fn execute_with(
    cfg: &ExperimentConfig,
    problem: &BuiltProblem,
    reference: &Reference,
) -> Result<RunResult, CliError> {
    let obj = problem.objective();
    let x0 = &problem.x0;
    let x_ref = reference.x();
    let f_ref = reference.f_ref;
    let clock = Instant::now();
    let (trace, proxy_q, stop, certify) = match cfg.solver {
        SolverKind::Uaf => {
            let u = uaf_config(cfg, problem, reference)?;
            let out = run(obj, &u, x0)?;
            (out.trace, u.q, format!("{:?}", out.stop), true)
        }
        SolverKind::UafRestart => {
            let mut u = uaf_config(cfg, problem, reference)?;
            u.stop_gap = None;
            u.time_budget = None;
            let sigma = match (cfg.sigma, &problem.instance) {
                (Some(s), _) => s,
                (None, Instance::Quadratic(q)) if cfg.s == 2.0 => q.smallest_eigenvalue(),
                _ => return Err(CliError::Config("uaf_restart needs sigma".into())),
            };
            let radius = cfg.radius.unwrap_or_else(|| (x0 - &x_ref).norm().max(f64::MIN_POSITIVE));
            let (c_a, r, v) = uaf_rate_constants(&u)?;
            let proxy_q = u.q;
            let rc = RestartConfig {
                s: cfg.s,
                sigma,
                v,
                r,
                c_a,
                radius,
                epochs: cfg.epochs,
            };
            rc.validate().map_err(|e| CliError::Config(e.to_string()))?;
            let inner = Recording {
                inner: UafInner { oracle: obj, cfg: u },
                outputs: RefCell::new(Vec::new()),
            };
            let out = run_restarted(&inner, obj, &rc, x0)?;
            let ys = inner.outputs.into_inner();
            let mut prev = x0.clone();
            let mut spent = 0usize;
            let elapsed = clock.elapsed().as_secs_f64();
            let total_m: usize = out.epochs.iter().map(|e| e.m).sum::<usize>().max(1);
            let mut trace = Vec::new();
            for (rec, y) in out.epochs.iter().skip(1).zip(&ys) {
                spent += rec.m;
                trace.push(TraceRecord {
                    iter: rec.k,
                    f_value: rec.f_value,
                    gap_vs_ref: Some(rec.f_value - f_ref),
                    omega: 0.0,
                    lambda: 0.0,
                    a_total: spent as f64,
                    displacement: (y - &prev).norm(),
                    wall_seconds: elapsed * spent as f64 / total_m as f64,
                });
                prev = y.clone();
            }
            (trace, proxy_q, "Epochs".to_string(), false)
        }
        SolverKind::Svrg => {
            let Some(logistic) = problem.logistic() else {
                return Err(CliError::Config("svrg needs the logistic problem".into()));
            };
            let lr = match cfg.lr {
                Some(lr) => lr,
                None => {
                    // per-example gradients are (max_j ||a_j||² / 4)-Lipschitz
                    let lmax = logistic
                        .dataset()
                        .rows
                        .iter()
                        .map(|r| r.features.iter().map(|&(_, v)| v * v).sum::<f64>())
                        .fold(0.0, f64::max)
                        / 4.0;
                    0.1 / lmax.max(f64::MIN_POSITIVE)
                }
            };
            let sc = SvrgConfig {
                learning_rate: lr,
                epoch_length: cfg.epoch_length,
                epochs: cfg.epochs,
                seed: cfg.seed,
            };
            let out = run_svrg(logistic, &sc, x0)?;
            let trace = baseline_trace(&out.trace, f_ref, clock.elapsed().as_secs_f64());
            (trace, 2.0, "Epochs".to_string(), false)
        }
        SolverKind::Gd => {
            let step = match cfg.step {
                Some(s) => s,
                None => 1.0 / problem.gradient_lipschitz()?,
            };
            let out = run_gd(obj, step, cfg.max_iter, x0)?;
            let trace = baseline_trace(&out.trace, f_ref, clock.elapsed().as_secs_f64());
            (trace, 2.0, "MaxIter".to_string(), false)
        }
        SolverKind::Continuum => {
            let spec = DynamicsSpec {
                oracle: obj,
                schedule: PowerSchedule::new(cfg.schedule_p),
                x0: x0.clone(),
                horizon: cfg.horizon,
                dt: cfg.dt,
            };
            let traj = integrate(&spec)?;
            let elapsed = clock.elapsed().as_secs_f64();
            let n = traj.t.len();
            let trace = (0..n)
                .map(|k| TraceRecord {
                    iter: k + 1,
                    f_value: traj.f[k],
                    gap_vs_ref: Some(traj.f[k] - f_ref),
                    omega: 0.0,
                    lambda: 0.0,
                    a_total: spec.schedule.big_a(traj.t[k]),
                    displacement: if k == 0 { 0.0 } else { (&traj.x[k] - &traj.x[k - 1]).norm() },
                    wall_seconds: elapsed * (k + 1) as f64 / n as f64,
                })
                .collect();
            (trace, 2.0, "Horizon".to_string(), true)
        }
    };
    let h_ref = h_of(x0, &x_ref, proxy_q);
    let last = trace.last();
    let window = (
        cfg.fit_lo.unwrap_or(1),
        cfg.fit_hi.unwrap_or_else(|| last.map_or(1, |r| r.iter)),
    );
    let slope = match fit_rate(&trace, window, cfg.fit_shrink) {
        Ok(s) => Some(s),
        Err(e) => {
            warn!("no rate fit: {e}");
            None
        }
    };
    let summary = Summary {
        solver: solver_name(cfg.solver).to_string(),
        iterations: trace.len(),
        final_f: last.map_or_else(|| obj.value(x0), |r| r.f_value),
        final_gap: last.and_then(|r| r.gap_vs_ref),
        certificate_violations: certify.then(|| certificate_failures(&trace, h_ref).len()),
        slope,
        f_ref,
        h_ref,
        stop,
    };
    Ok(RunResult { trace, summary })
}

/// Builds the problem, obtains the reference and runs the solver without
/// writing any output.
pub fn execute(cfg: &ExperimentConfig) -> Result<RunResult, CliError> {
    let problem = build_problem(&cfg.problem)?;
    let reference = reference_solution(&problem, cfg.ref_budget)?.reference;
    execute_with(cfg, &problem, &reference)
}

/// Writes `contents` to a sibling temp file and renames it into place.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

pub fn trace_bytes(trace: &[TraceRecord]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(trace, &mut buf).expect("writing to memory");
    buf
}

pub fn write_outputs(
    result: &RunResult,
    trace_path: Option<&Path>,
    summary_path: Option<&Path>,
) -> Result<(), CliError> {
    let summary = serde_json::to_vec_pretty(&result.summary).map_err(|e| CliError::Other(e.to_string()))?;
    if let Some(p) = trace_path {
        write_atomic(p, &trace_bytes(&result.trace))?;
    }
    if let Some(p) = summary_path {
        write_atomic(p, &summary)?;
    }
    Ok(())
}

/// Runs the experiment and writes its trace and summary. Nothing is
/// written unless the run succeeds.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunResult, CliError> {
    let result = execute(cfg)?;
    write_outputs(&result, cfg.trace.as_deref(), cfg.summary.as_deref())?;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixEntry {
    pub q: f64,
    pub lipschitz: f64,
    /// `None` when the run failed; the error is logged.
    pub summary: Option<Summary>,
}

pub const MATRIX_HEADER: &str = "q,L,iterations,stop,final_gap,slope,certificate_violations";

pub fn matrix_row(e: &MatrixEntry) -> String {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    match &e.summary {
        Some(s) => format!(
            "{},{:e},{},{},{},{},{}",
            e.q,
            e.lipschitz,
            s.iterations,
            s.stop,
            opt(s.final_gap),
            opt(s.slope),
            s.certificate_violations.map(|v| v.to_string()).unwrap_or_default()
        ),
        None => format!("{},{:e},,Failed,,,", e.q, e.lipschitz),
    }
}

/// Runs every `(q, L)` pair of the grids concurrently against one shared
/// problem and reference. With `out_dir` set, each run's trace and summary
/// go there along with `matrix.csv`.
pub fn run_matrix(cfg: &ExperimentConfig) -> Result<Vec<MatrixEntry>, CliError> {
    if cfg.solver != SolverKind::Uaf {
        return Err(CliError::Config("the matrix command runs solver = uaf".into()));
    }
    let problem = build_problem(&cfg.problem)?;
    let reference = reference_solution(&problem, cfg.ref_budget)?.reference;
    let qs = if cfg.q_grid.is_empty() {
        vec![cfg.q.unwrap_or(cfg.p as f64 + cfg.nu)]
    } else {
        cfg.q_grid.clone()
    };
    let ls = if cfg.l_grid.is_empty() {
        vec![match cfg.lipschitz {
            Some(l) => l,
            None => problem.holder_constant(cfg.p, cfg.nu)?,
        }]
    } else {
        cfg.l_grid.clone()
    };
    let cells: Vec<(f64, f64)> = qs.iter().flat_map(|&q| ls.iter().map(move |&l| (q, l))).collect();
    let results: Vec<Result<RunResult, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cells
            .iter()
            .map(|&(q, l)| {
                let mut c = cfg.clone();
                c.q = Some(q);
                c.lipschitz = Some(l);
                // a configured strategy applies where it is valid; the other
                // cells take the default for their q
                let exact = (q - (c.p as f64 + c.nu)).abs() <= 1e-12;
                if exact != (cfg.strategy == Some(Strategy::ExactQEqualsPNu)) {
                    c.strategy = None;
                }
                let (problem, reference) = (&problem, &reference);
                scope.spawn(move || execute_with(&c, problem, reference))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("matrix worker panicked")).collect()
    });
    let mut entries = Vec::new();
    for (&(q, l), res) in cells.iter().zip(results) {
        let summary = match res {
            Ok(r) => {
                if let Some(dir) = &cfg.out_dir {
                    let stem = format!("q{q}_L{l:e}");
                    write_outputs(
                        &r,
                        Some(&dir.join(format!("trace_{stem}.csv"))),
                        Some(&dir.join(format!("summary_{stem}.json"))),
                    )?;
                }
                Some(r.summary)
            }
            Err(e @ CliError::Config(_)) => return Err(e),
            Err(e) => {
                warn!("q = {q}, L = {l:e}: {e}");
                None
            }
        };
        entries.push(MatrixEntry { q, lipschitz: l, summary });
    }
    if let Some(dir) = &cfg.out_dir {
        let mut text = format!("{MATRIX_HEADER}\n");
        for e in &entries {
            text.push_str(&matrix_row(e));
            text.push('\n');
        }
        write_atomic(&dir.join("matrix.csv"), text.as_bytes())?;
    }
    Ok(entries)
}

/// Integrates the continuous dynamics and returns the run together with
/// the ODE residual of the computed trajectory.
pub fn run_integrate(cfg: &ExperimentConfig) -> Result<(RunResult, f64), CliError> {
    let mut c = cfg.clone();
    c.solver = SolverKind::Continuum;
    let problem = build_problem(&c.problem)?;
    let reference = reference_solution(&problem, c.ref_budget)?.reference;
    let result = execute_with(&c, &problem, &reference)?;
    let spec = DynamicsSpec {
        oracle: problem.objective(),
        schedule: PowerSchedule::new(c.schedule_p),
        x0: problem.x0.clone(),
        horizon: c.horizon,
        dt: c.dt,
    };
    let residual = ode_residual(&integrate(&spec)?, &spec);
    write_outputs(&result, c.trace.as_deref(), c.summary.as_deref())?;
    Ok((result, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_flat;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_map(&parse_flat(text).unwrap()).unwrap()
    }

    #[test]
    fn quadratic_uaf_meets_growth_bound() {
        let c = cfg("problem = quadratic\ndim = 6\ncond = 20\nmax_iter = 30\nref_budget = 30");
        let r = execute(&c).unwrap();
        let u = UafConfig::new(2, 1.0, uaf_core::problems::QUADRATIC_DEFAULT_HOLDER, 3.0);
        let scale = u.theta1 * u.c_q() * u.gamma / u.lipschitz;
        for rec in &r.trace {
            let bound = scale * (rec.iter as f64 / 3.0).powi(3);
            assert!(rec.a_total >= bound * (1.0 - 1e-10));
        }
        assert_eq!(r.summary.certificate_violations, Some(0));
    }

    #[test]
    fn summary_keys_match_schema() {
        let c = cfg("problem = quadratic\ndim = 3\nmax_iter = 5\nsolver = gd");
        let r = execute(&c).unwrap();
        let v = serde_json::to_value(&r.summary).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        keys.sort();
        let mut expected = SUMMARY_KEYS.to_vec();
        expected.sort();
        assert_eq!(keys, expected);
    }

    #[test]
    fn restart_and_baselines_run() {
        for solver in ["uaf_restart", "svrg", "gd"] {
            let c = cfg(&format!(
                "problem = logistic\nsamples = 80\ndim = 5\nsolver = {solver}\np = 1\nq = 2\nsigma = 0.01\nepochs = 3\nmax_iter = 20"
            ));
            let r = execute(&c).unwrap();
            assert!(!r.trace.is_empty(), "{solver}");
            assert!(r.trace.windows(2).all(|w| w[1].iter > w[0].iter && w[1].a_total > w[0].a_total));
        }
    }

    #[test]
    fn continuum_certificate() {
        let c = cfg("problem = quadratic\ndim = 3\ncond = 4\nsolver = continuum\ndt = 1e-3\nhorizon = 5");
        let r = execute(&c).unwrap();
        assert_eq!(r.summary.certificate_violations, Some(0));
    }

    #[test]
    fn lasso_first_order() {
        let c = cfg("problem = lasso\np = 1\nmax_iter = 100");
        let r = execute(&c).unwrap();
        assert_eq!(r.summary.certificate_violations, Some(0));
        assert!(r.summary.final_gap.unwrap() < 1e-3);
    }

    #[test]
    fn heuristic_without_h_star_uses_reference() {
        let c = cfg("problem = logistic\nsamples = 100\ndim = 5\nq = 2\nstrategy = heuristic\nmax_iter = 20");
        let r = execute(&c).unwrap();
        assert_eq!(r.trace.len(), 20);
    }
}
