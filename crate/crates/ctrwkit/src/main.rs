use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ctrwkit::error::{CliError, Result};
use ctrwkit::par::RayonRunner;
use ctrwkit::report::emit_report;
use ctrwkit::run::run_scenario;
use ctrwkit::scenario::{IntegralSpec, Kind, MetricsSpec, Scenario};

/// Heavy-tailed CTRW and moving-average experiments driven by TOML scenarios.
#[derive(Parser)]
#[command(name = "ctrwkit", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
    /// Report path; overrides [output].report.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Comma-separated scaling levels, e.g. 100,1000,10000.
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<u64>>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario of any kind (the kind comes from the file).
    Run(Common),
    Simulate(Common),
    /// Decomposition diagnostics.
    #[command(subcommand)]
    Diagnose(Diag),
    Integrals {
        #[command(flatten)]
        common: Common,
        /// const | lipschitz | adversarial | deterministic:<expr in t>
        #[arg(long)]
        integrand: Option<String>,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        #[arg(long)]
        m: Option<usize>,
    },
    Adversarial(Common),
    Sde(Common),
    Sdde(Common),
    /// Distances between two path CSVs, or the separation witness.
    Metrics {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        x: Option<PathBuf>,
        #[arg(long)]
        y: Option<PathBuf>,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        resolution: Option<usize>,
    },
}

#[derive(Subcommand)]
enum Diag {
    Gd(Common),
    Gdca(Common),
    Gdci(Common),
}

fn load(common: &Common, kind: Option<Kind>) -> Result<Scenario> {
    let path = common.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    Scenario::load(path, kind)
}

fn apply(sc: &mut Scenario, common: &Common) {
    if let Some(s) = common.seed {
        sc.seed = s;
    }
    if let Some(r) = common.reps {
        sc.reps = r;
    }
    if let Some(n) = &common.n_list {
        sc.n = n.clone();
    }
}

fn scenario(cmd: &Cmd) -> Result<(Scenario, Common)> {
    let (mut sc, common) = match cmd {
        Cmd::Run(c) => (load(c, None)?, c.clone()),
        Cmd::Simulate(c) => (load(c, Some(Kind::Simulate))?, c.clone()),
        Cmd::Diagnose(Diag::Gd(c)) => (load(c, Some(Kind::Gd))?, c.clone()),
        Cmd::Diagnose(Diag::Gdca(c)) => (load(c, Some(Kind::Gdca))?, c.clone()),
        Cmd::Diagnose(Diag::Gdci(c)) => (load(c, Some(Kind::Gdci))?, c.clone()),
        Cmd::Adversarial(c) => (load(c, Some(Kind::Adversarial))?, c.clone()),
        Cmd::Sde(c) => (load(c, Some(Kind::Sde))?, c.clone()),
        Cmd::Sdde(c) => (load(c, Some(Kind::Sdde))?, c.clone()),
        Cmd::Integrals { common, integrand, eps, m } => {
            let mut sc = match &common.config {
                Some(_) => load(common, Some(Kind::Integrals))?,
                None => return Err(CliError::Config("--config is required (it carries the process)".into())),
            };
            let spec = sc.integral.get_or_insert_with(|| IntegralSpec {
                integrand: "const".into(),
                value: 1.0,
                base: "tanh(y)".into(),
                base_sup: 1.0,
                c: 20.0,
                gamma: None,
                eps: Vec::new(),
                m: 4,
                compare_limit: false,
            });
            if let Some(i) = integrand {
                spec.integrand = i.clone();
            }
            if let Some(e) = eps {
                spec.eps = e.clone();
            }
            if let Some(m) = m {
                spec.m = *m;
            }
            (sc, common.clone())
        }
        Cmd::Metrics { common, x, y, horizon, resolution } => {
            let mut sc = match &common.config {
                Some(_) => load(common, Some(Kind::Metrics))?,
                None => Scenario::parse("[metrics]\n", Some(Kind::Metrics))?,
            };
            let m = sc.metrics.get_or_insert_with(MetricsSpec::default);
            if x.is_some() {
                m.x = x.clone();
            }
            if y.is_some() {
                m.y = y.clone();
            }
            if horizon.is_some() {
                m.horizon = *horizon;
            }
            if let Some(r) = resolution {
                m.resolution = *r;
            }
            (sc, common.clone())
        }
    };
    apply(&mut sc, &common);
    sc.validate()?;
    Ok((sc, common))
}

fn execute(cmd: Cmd) -> Result<()> {
    let (sc, common) = scenario(&cmd)?;
    let runner = RayonRunner::new(common.threads)?;
    let report = run_scenario(&sc, &runner)?;
    let out = common
        .out
        .or_else(|| sc.output.as_ref().and_then(|o| o.report.clone()))
        .unwrap_or_else(|| PathBuf::from(format!("{}.json", sc.name())));
    emit_report(&report, &out)?;
    println!("wrote {} ({} estimates)", out.display(), report.estimates.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!("CLI_USAGE: {}", msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match execute(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
