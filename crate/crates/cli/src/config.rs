//! Job configuration: a JSON file and command-line flags, flags winning.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use isor_core::cmc::RhoProblem;
use isor_core::minimal::{MinimalParams, Preset};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Minimal,
    Cmc,
    Untwisted,
}

/// Where an untwisted run takes its conformal factor from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// `ρ = ½eᵘ(1 + e²ᵘ)`, the Enneper member `a = A = B = 1`.
    Enneper,
    /// Twisted minimal family with `--a --A --B`.
    Minimal,
    /// Numerical solution with `--H --a --b --rho0 --drho0`.
    Cmc,
}

/// Intrinsic data the verifier checks the surface against. Unset fields
/// default to the data the surface was built from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Claim {
    #[serde(rename = "H", skip_serializing_if = "Option::is_none")]
    pub mean_curvature: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_scale: Option<f64>,
}

impl Claim {
    fn or(self, base: Claim) -> Claim {
        Claim {
            mean_curvature: self.mean_curvature.or(base.mean_curvature),
            a: self.a.or(base.a),
            b: self.b.or(base.b),
            rho_scale: self.rho_scale.or(base.rho_scale),
        }
    }

    fn is_empty(&self) -> bool {
        *self == Claim::default()
    }
}

/// Raw job description as read from JSON or flags; every field optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    pub gauss_scale: Option<f64>,
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub gauss_degree: Option<f64>,
    #[serde(rename = "H", skip_serializing_if = "Option::is_none")]
    pub mean_curvature: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drho0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<Source>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_range: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_range: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nv: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Claim::is_empty")]
    pub claim: Claim,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    /// Field-wise overlay: values set in `self` win over `base`.
    pub fn or(self, base: JobConfig) -> JobConfig {
        JobConfig {
            mode: self.mode.or(base.mode),
            preset: self.preset.or(base.preset),
            order: self.order.or(base.order),
            a: self.a.or(base.a),
            gauss_scale: self.gauss_scale.or(base.gauss_scale),
            gauss_degree: self.gauss_degree.or(base.gauss_degree),
            mean_curvature: self.mean_curvature.or(base.mean_curvature),
            b: self.b.or(base.b),
            rho0: self.rho0.or(base.rho0),
            drho0: self.drho0.or(base.drho0),
            anchor: self.anchor.or(base.anchor),
            source: self.source.or(base.source),
            scale: self.scale.or(base.scale),
            c: self.c.or(base.c),
            u_range: self.u_range.or(base.u_range),
            v_range: self.v_range.or(base.v_range),
            nu: self.nu.or(base.nu),
            nv: self.nv.or(base.nv),
            tol: self.tol.or(base.tol),
            residual_tol: self.residual_tol.or(base.residual_tol),
            oracle_tol: self.oracle_tol.or(base.oracle_tol),
            fd_step: self.fd_step.or(base.fd_step),
            claim: self.claim.or(base.claim),
            out: self.out.or(base.out),
        }
    }
}

fn parse_range(s: &str) -> Result<[f64; 2], String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{lo:?}: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{hi:?}: {e}"))?;
    Ok([lo, hi])
}

/// Flags shared by `generate`, `verify` and `revolve`.
#[derive(Debug, Clone, Default, Args)]
pub struct JobArgs {
    /// JSON job file; flags given on the command line override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// enneper, planar-enneper or translation-invariant.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub order: Option<u32>,
    /// Twist rate.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Gauss map scale of the minimal family.
    #[arg(long = "A", allow_hyphen_values = true)]
    pub gauss_scale: Option<f64>,
    /// Gauss map degree of the minimal family.
    #[arg(long = "B", allow_hyphen_values = true)]
    pub gauss_degree: Option<f64>,
    /// Mean curvature (sum of principal curvatures).
    #[arg(long = "H", allow_hyphen_values = true)]
    pub mean_curvature: Option<f64>,
    /// Codazzi constant.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub drho0: Option<f64>,
    /// Where `rho0`, `drho0` are imposed.
    #[arg(long, allow_hyphen_values = true)]
    pub anchor: Option<f64>,
    #[arg(long, value_enum)]
    pub source: Option<Source>,
    /// Factor applied to the source conformal factor.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Speed-up of the surface of revolution.
    #[arg(long)]
    pub c: Option<f64>,
    /// u interval as lo:hi.
    #[arg(long = "u", value_parser = parse_range, allow_hyphen_values = true)]
    pub u_range: Option<[f64; 2]>,
    /// v interval as lo:hi, in radians.
    #[arg(long = "v", value_parser = parse_range, allow_hyphen_values = true)]
    pub v_range: Option<[f64; 2]>,
    #[arg(long)]
    pub nu: Option<usize>,
    #[arg(long)]
    pub nv: Option<usize>,
    /// ODE tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Bound on the scaled structure-equation residuals.
    #[arg(long)]
    pub residual_tol: Option<f64>,
    /// Bound on the measured-versus-claimed discrepancies.
    #[arg(long)]
    pub oracle_tol: Option<f64>,
    /// Finite-difference step of the curvature oracle.
    #[arg(long)]
    pub fd_step: Option<f64>,
    /// Check against this mean curvature instead of the generating one.
    #[arg(long = "claim-H", allow_hyphen_values = true)]
    pub claim_mean_curvature: Option<f64>,
    #[arg(long = "claim-a", allow_hyphen_values = true)]
    pub claim_a: Option<f64>,
    #[arg(long = "claim-b", allow_hyphen_values = true)]
    pub claim_b: Option<f64>,
    /// Check against the conformal factor multiplied by this.
    #[arg(long = "claim-rho-scale")]
    pub claim_rho_scale: Option<f64>,
    /// Output path prefix; `.obj`, `.csv` and `.json` are appended.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

impl JobArgs {
    /// The merged configuration: file first, then flags on top.
    pub fn resolve(&self) -> Result<JobConfig, CliError> {
        let base = match &self.config {
            Some(p) => JobConfig::load(p)?,
            None => JobConfig::default(),
        };
        let flags = JobConfig {
            mode: self.mode,
            preset: self.preset.clone(),
            order: self.order,
            a: self.a,
            gauss_scale: self.gauss_scale,
            gauss_degree: self.gauss_degree,
            mean_curvature: self.mean_curvature,
            b: self.b,
            rho0: self.rho0,
            drho0: self.drho0,
            anchor: self.anchor,
            source: self.source,
            scale: self.scale,
            c: self.c,
            u_range: self.u_range,
            v_range: self.v_range,
            nu: self.nu,
            nv: self.nv,
            tol: self.tol,
            residual_tol: self.residual_tol,
            oracle_tol: self.oracle_tol,
            fd_step: self.fd_step,
            claim: Claim {
                mean_curvature: self.claim_mean_curvature,
                a: self.claim_a,
                b: self.claim_b,
                rho_scale: self.claim_rho_scale,
            },
            out: self.out.clone(),
        };
        Ok(flags.or(base))
    }
}

pub const DEFAULT_U: [f64; 2] = [-1.0, 1.0];
pub const DEFAULT_V: [f64; 2] = [0.0, TAU];
pub const DEFAULT_NU: usize = 41;
pub const DEFAULT_NV: usize = 81;
pub const DEFAULT_ODE_TOL: f64 = 1e-10;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;
pub const DEFAULT_ORACLE_TOL: f64 = 1e-4;
pub const DEFAULT_FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub u: (f64, f64),
    pub v: (f64, f64),
    pub nu: usize,
    pub nv: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub ode: f64,
    pub residual: f64,
    pub oracle: f64,
    pub fd_step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileKind {
    Minimal(MinimalParams<f64>),
    Cmc(RhoProblem<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Surface {
    Minimal(MinimalParams<f64>),
    Cmc(RhoProblem<f64>),
    Untwisted { profile: ProfileKind, scale: f64, c: f64 },
}

/// A validated job.
#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub surface: Surface,
    pub grid: Grid,
    pub tol: Tolerances,
    pub claim: Claim,
    pub out: Option<PathBuf>,
    pub config: JobConfig,
}

fn need(v: Option<f64>, name: &str, mode: &str) -> Result<f64, CliError> {
    match v {
        Some(x) if x.is_finite() => Ok(x),
        Some(x) => Err(CliError::config(format!("--{name} must be finite, got {x}"))),
        None => Err(CliError::config(format!("mode {mode} needs --{name}"))),
    }
}

fn positive(x: f64, name: &str) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::config(format!("{name} must be positive, got {x}")))
    }
}

fn interval(r: [f64; 2], name: &str) -> Result<(f64, f64), CliError> {
    if r[0].is_finite() && r[1].is_finite() && r[0] < r[1] {
        Ok((r[0], r[1]))
    } else {
        Err(CliError::config(format!("--{name} needs lo < hi, got {}:{}", r[0], r[1])))
    }
}

fn minimal_params(c: &JobConfig, mode: &str) -> Result<MinimalParams<f64>, CliError> {
    match &c.preset {
        Some(name) => {
            if c.a.is_some() || c.gauss_degree.is_some() || c.gauss_scale.is_some() {
                return Err(CliError::config("give either --preset or explicit --a/--A/--B, not both"));
            }
            let p: Preset = name.parse()?;
            Ok(p.params(c.order.unwrap_or(1))?)
        }
        None => Ok(MinimalParams::new(
            need(c.a, "a", mode)?,
            c.gauss_scale.unwrap_or(1.0),
            need(c.gauss_degree, "B", mode)?,
        )?),
    }
}

fn rho_problem(c: &JobConfig, mode: &str) -> Result<RhoProblem<f64>, CliError> {
    let p = RhoProblem::new(
        need(c.mean_curvature, "H", mode)?,
        need(c.a, "a", mode)?,
        need(c.b, "b", mode)?,
        need(c.rho0, "rho0", mode)?,
        need(c.drho0, "drho0", mode)?,
    );
    positive(p.rho0, "rho0")?;
    Ok(p.at(c.anchor.unwrap_or(0.0)))
}

impl JobConfig {
    pub fn validate(self) -> Result<Job, CliError> {
        let mode = self.mode.ok_or_else(|| CliError::config("--mode is required (minimal, cmc or untwisted)"))?;
        let surface = match mode {
            Mode::Minimal => Surface::Minimal(minimal_params(&self, "minimal")?),
            Mode::Cmc => Surface::Cmc(rho_problem(&self, "cmc")?),
            Mode::Untwisted => {
                let profile = match self.source.unwrap_or(Source::Enneper) {
                    Source::Enneper => ProfileKind::Minimal(MinimalParams::new(1.0, 1.0, 1.0)?),
                    Source::Minimal => ProfileKind::Minimal(minimal_params(&self, "untwisted")?),
                    Source::Cmc => ProfileKind::Cmc(rho_problem(&self, "untwisted")?),
                };
                let scale = positive(self.scale.unwrap_or(1.0), "--scale")?;
                let c = positive(need(self.c, "c", "untwisted")?, "--c")?;
                Surface::Untwisted { profile, scale, c }
            }
        };
        let grid = Grid {
            u: interval(self.u_range.unwrap_or(DEFAULT_U), "u")?,
            v: interval(self.v_range.unwrap_or(DEFAULT_V), "v")?,
            nu: self.nu.unwrap_or(DEFAULT_NU),
            nv: self.nv.unwrap_or(DEFAULT_NV),
        };
        if grid.nu < 2 || grid.nv < 2 {
            return Err(CliError::config(format!("nu and nv must be at least 2, got {} x {}", grid.nu, grid.nv)));
        }
        let tol = Tolerances {
            ode: positive(self.tol.unwrap_or(DEFAULT_ODE_TOL), "--tol")?,
            residual: positive(self.residual_tol.unwrap_or(DEFAULT_RESIDUAL_TOL), "--residual-tol")?,
            oracle: positive(self.oracle_tol.unwrap_or(DEFAULT_ORACLE_TOL), "--oracle-tol")?,
            fd_step: positive(self.fd_step.unwrap_or(DEFAULT_FD_STEP), "--fd-step")?,
        };
        if let Some(s) = self.claim.rho_scale {
            positive(s, "--claim-rho-scale")?;
        }
        Ok(Job { surface, grid, tol, claim: self.claim.clone(), out: self.out.clone(), config: self })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse_with_negative_bounds() {
        assert_eq!(parse_range("-1:1"), Ok([-1.0, 1.0]));
        assert_eq!(parse_range("0:2.5"), Ok([0.0, 2.5]));
        assert!(parse_range("1").is_err());
        assert!(parse_range("a:1").is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let file: JobConfig = serde_json::from_str(r#"{"mode":"cmc","H":0.5,"a":1,"b":4.2625,"nu":9}"#).unwrap();
        let flags = JobConfig { nu: Some(5), b: Some(2.0), ..Default::default() };
        let m = flags.or(file);
        assert_eq!((m.nu, m.b, m.mean_curvature), (Some(5), Some(2.0), Some(0.5)));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<JobConfig>(r#"{"mode":"cmc","h":1}"#).is_err());
    }

    #[test]
    fn missing_parameters_name_the_flag() {
        let c = JobConfig { mode: Some(Mode::Cmc), mean_curvature: Some(1.0), ..Default::default() };
        let e = c.validate().unwrap_err().to_string();
        assert!(e.contains("--a"), "{e}");
    }

    #[test]
    fn preset_and_explicit_parameters_conflict() {
        let c = JobConfig { mode: Some(Mode::Minimal), preset: Some("enneper".into()), a: Some(1.0), ..Default::default() };
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
    }

    #[test]
    fn small_grids_are_config_errors() {
        let c = JobConfig { mode: Some(Mode::Minimal), preset: Some("enneper".into()), nu: Some(1), ..Default::default() };
        assert_eq!(c.validate().unwrap_err().exit_code(), 2);
    }
}
