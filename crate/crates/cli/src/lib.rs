//! Command-line front end for `isor-core`: mesh generation, verification
//! reports and profile dumps.

pub mod config;
pub mod error;
pub mod pipeline;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use isor_core::cmc::{solve_rho, RhoProblem};
use isor_core::minimal::{period_vector, Preset};
use isor_core::scalar::linspace;
use isor_core::MetricProfile;

use config::{JobArgs, Mode};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "isor", version, about = "Intrinsic surfaces of revolution: build, mesh and verify")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a surface, write OBJ mesh plus CSV/JSON curvature report.
    Generate(JobArgs),
    /// Run the curvature oracle only and write the report.
    Verify(JobArgs),
    /// Integrate the conformal-factor ODE and dump it as CSV.
    SolveRho(SolveRhoArgs),
    /// Shorthand for `generate --mode untwisted`.
    Revolve(JobArgs),
    /// List the named minimal surfaces.
    Presets(PresetsArgs),
}

#[derive(Debug, Args)]
pub struct SolveRhoArgs {
    #[arg(long = "H", allow_hyphen_values = true)]
    pub mean_curvature: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long)]
    pub rho0: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub drho0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub anchor: f64,
    /// u interval as lo:hi.
    #[arg(long = "u", default_value = "-1:1", allow_hyphen_values = true)]
    pub u_range: String,
    #[arg(long, default_value_t = config::DEFAULT_ODE_TOL)]
    pub tol: f64,
    /// Resample on this many uniform points instead of the solver nodes.
    #[arg(long)]
    pub samples: Option<usize>,
    /// CSV destination; standard output when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PresetsArgs {
    /// Highest order listed.
    #[arg(long, default_value_t = 3)]
    pub max_order: u32,
}

/// Result of a command that ran to completion.
pub enum Status {
    Pass,
    /// Some residual or oracle discrepancy exceeded its tolerance.
    ToleranceExceeded,
}

impl Status {
    pub fn exit_code(&self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::ToleranceExceeded => 1,
        }
    }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn run_job(args: &JobArgs, force_mode: Option<Mode>, write_mesh: bool) -> Result<Status, CliError> {
    let mut cfg = args.resolve()?;
    if let Some(m) = force_mode {
        if cfg.mode.is_some_and(|given| given != m) {
            return Err(CliError::config("revolve always runs in untwisted mode"));
        }
        cfg.mode = Some(m);
    }
    let job = cfg.validate()?;
    if write_mesh && job.out.is_none() {
        return Err(CliError::config("--out PREFIX is required to write a mesh"));
    }
    let out = pipeline::run(&job)?;
    let summary = out.report.json();
    match &job.out {
        Some(prefix) => {
            if write_mesh {
                write(&with_ext(prefix, "obj"), &report::obj(&out.mesh))?;
            }
            write(&with_ext(prefix, "csv"), &out.report.csv())?;
            write(&with_ext(prefix, "json"), &summary)?;
        }
        None => print!("{summary}"),
    }
    let s = &out.report.summary;
    eprintln!(
        "{} samples; scaled residual {:.3e}; metric error {:.3e}; curvature error {:.3e}; a_est {}",
        s.samples,
        s.max_residuals.scaled,
        s.max_oracle_errors.metric,
        s.max_oracle_errors.curvature,
        s.a_est.map_or("n/a".to_string(), |a| format!("{a:.10}")),
    );
    Ok(if s.pass { Status::Pass } else { Status::ToleranceExceeded })
}

fn solve_rho_cmd(a: &SolveRhoArgs) -> Result<Status, CliError> {
    let (lo, hi) = a
        .u_range
        .split_once(':')
        .and_then(|(l, h)| Some((l.trim().parse::<f64>().ok()?, h.trim().parse::<f64>().ok()?)))
        .ok_or_else(|| CliError::config(format!("--u expects lo:hi, got {:?}", a.u_range)))?;
    let problem = RhoProblem::new(a.mean_curvature, a.a, a.b, a.rho0, a.drho0).at(a.anchor);
    let sol = solve_rho(&problem, (lo, hi), a.tol)?;
    let us = match a.samples {
        Some(n) if n >= 2 => linspace(sol.u[0], sol.u[sol.u.len() - 1], n),
        Some(n) => return Err(CliError::config(format!("--samples must be at least 2, got {n}"))),
        None => sol.u.clone(),
    };
    let data = sol.intrinsic();
    let mut text = String::from("u,rho,drho,ddrho,master_residual\n");
    for u in us {
        text.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            u,
            sol.rho(u),
            sol.drho(u),
            sol.ddrho(u),
            data.master_ode_residual(u)
        ));
    }
    match &a.out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    sol.require_complete()?;
    Ok(Status::Pass)
}

fn presets_cmd(a: &PresetsArgs) -> Result<Status, CliError> {
    println!("{:<22} {:>5} {:>6} {:>4} {:>4}  period", "name", "order", "a", "A", "B");
    for p in Preset::ALL {
        let orders: Vec<u32> = if p == Preset::TranslationInvariant { vec![1] } else { (1..=a.max_order).collect() };
        for n in orders {
            let m = p.params::<f64>(n)?;
            let period = match period_vector(&m) {
                Some(t) => format!("({:.6}, {:.6}, {:.6})", t.x, t.y, t.z),
                None => "none".into(),
            };
            println!("{:<22} {:>5} {:>6} {:>4} {:>4}  {period}", p.name(), n, m.twist, m.gauss_scale, m.gauss_degree);
        }
    }
    Ok(Status::Pass)
}

/// Sizes the global thread pool from `ISOR_NUM_THREADS`, if set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("ISOR_NUM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("ISOR_NUM_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))
}

pub fn dispatch(cli: &Cli) -> Result<Status, CliError> {
    init_threads()?;
    match &cli.command {
        Command::Generate(a) => run_job(a, None, true),
        Command::Verify(a) => run_job(a, None, false),
        Command::Revolve(a) => run_job(a, Some(Mode::Untwisted), true),
        Command::SolveRho(a) => solve_rho_cmd(a),
        Command::Presets(a) => presets_cmd(a),
    }
}
