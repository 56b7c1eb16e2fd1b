use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{value_parser, Arg, ArgMatches, Command};
use uaf_core::trace::read_csv;
use uaf_cli::config::{load, KEYS};
use uaf_cli::experiment::{
    certificate_failures, matrix_row, run_experiment, run_integrate, run_matrix, Summary, MATRIX_HEADER,
};
use uaf_cli::CliError;

fn with_config_args(cmd: Command) -> Command {
    let mut cmd = cmd.arg(
        Arg::new("config")
            .long("config")
            .short('c')
            .value_name("FILE")
            .value_parser(value_parser!(PathBuf))
            .help("flat key = value config file"),
    );
    for (key, help) in KEYS {
        cmd = cmd.arg(Arg::new(*key).long(*key).value_name("VALUE").help(*help));
    }
    cmd
}

fn cli() -> Command {
    Command::new("uaf")
        .about("Runs accelerated high-order methods and baselines, writing trace CSVs and JSON summaries")
        .subcommand_required(true)
        .subcommand(with_config_args(Command::new("run").about("run one configured solver")))
        .subcommand(with_config_args(
            Command::new("matrix").about("run the accelerated loop over the q_grid x L_grid"),
        ))
        .subcommand(with_config_args(
            Command::new("integrate").about("integrate the continuous-time dynamics"),
        ))
        .subcommand(
            Command::new("check-certificate")
                .about("check gap <= h_ref / A + 1e-9 on every row of a trace")
                .arg(
                    Arg::new("trace")
                        .long("trace")
                        .required(true)
                        .value_parser(value_parser!(PathBuf)),
                )
                .arg(Arg::new("h_ref").long("h_ref").value_parser(value_parser!(f64)))
                .arg(
                    Arg::new("summary")
                        .long("summary")
                        .value_parser(value_parser!(PathBuf))
                        .help("read h_ref from a run summary"),
                ),
        )
}

fn load_from(m: &ArgMatches) -> Result<uaf_cli::config::ExperimentConfig, CliError> {
    let overrides: Vec<(String, String)> = KEYS
        .iter()
        .filter_map(|(k, _)| m.get_one::<String>(k).map(|v| (k.to_string(), v.clone())))
        .collect();
    load(m.get_one::<PathBuf>("config").map(|p| p.as_path()), &overrides)
}

fn check_certificate(m: &ArgMatches) -> Result<bool, CliError> {
    let h_ref = match (m.get_one::<f64>("h_ref"), m.get_one::<PathBuf>("summary")) {
        (Some(h), _) => *h,
        (None, Some(p)) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            let s: Summary =
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            s.h_ref
        }
        (None, None) => return Err(CliError::Config("give --h_ref or --summary".into())),
    };
    let path = m.get_one::<PathBuf>("trace").expect("required");
    let file = File::open(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let trace = read_csv(BufReader::new(file)).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let failures = certificate_failures(&trace, h_ref);
    for it in &failures {
        println!("violated at iter {it}");
    }
    println!(
        "{}: {} of {} rows violate the bound (h_ref = {h_ref:e})",
        if failures.is_empty() { "PASS" } else { "FAIL" },
        failures.len(),
        trace.len()
    );
    Ok(failures.is_empty())
}

fn dispatch(matches: &ArgMatches) -> Result<ExitCode, CliError> {
    match matches.subcommand() {
        Some(("run", m)) => {
            let cfg = load_from(m)?;
            let r = run_experiment(&cfg)?;
            println!("{}", serde_json::to_string(&r.summary).map_err(|e| CliError::Other(e.to_string()))?);
        }
        Some(("matrix", m)) => {
            let cfg = load_from(m)?;
            let entries = run_matrix(&cfg)?;
            println!("{MATRIX_HEADER}");
            for e in &entries {
                println!("{}", matrix_row(e));
            }
        }
        Some(("integrate", m)) => {
            let cfg = load_from(m)?;
            let (r, residual) = run_integrate(&cfg)?;
            let last = r.trace.last().expect("integration produces points");
            println!(
                "A_T = {:e}  f(x_T) = {:e}  h_ref / A_T = {:e}  ode residual = {residual:e}",
                last.a_total,
                last.f_value,
                r.summary.h_ref / last.a_total
            );
        }
        Some(("check-certificate", m)) => {
            if !check_certificate(m)? {
                return Ok(ExitCode::from(1));
            }
        }
        _ => unreachable!("subcommand required"),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let matches = cli().get_matches();
    match dispatch(&matches) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("uaf: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
