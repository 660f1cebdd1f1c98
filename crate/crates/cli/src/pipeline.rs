//! Builds the surface a job describes and measures it against the claimed
//! intrinsic data.

use isor_core::cmc::{integrate_surface, solve_rho, FrameState, OdeSolution, RhoProblem, TransportedSurface};
use isor_core::geometry::{curvature_at, fit_twist_from_angles, sample_mesh, FnSurface, PrincipalData};
use isor_core::intrinsic::{IntrinsicData, MetricProfile, Scaled};
use isor_core::minimal::{period_vector, MinimalParams, MinimalSurface};
use isor_core::revolve::{
    build_revolve, revolve_point, untwisted_gauss_residual, untwisted_codazzi_residual, untwisted_lambda2_derivative,
    untwisted_lambdas,
};
use isor_core::{Domain, FormPair, Mesh, Vec3};
use rayon::prelude::*;

use crate::config::{Job, ProfileKind, Surface};
use crate::error::CliError;
use crate::report::{OdeInfo, Report, Row};

/// Gauss–Legendre panels for the meridian height of a revolution.
const REVOLVE_PANELS: usize = 64;
/// Steps per leg of the local frame charts the CMC oracle differentiates.
const CHART_STEPS: usize = 4;
/// The analytic maps extend this many finite-difference steps past the mesh
/// so the oracle can sample boundary vertices.
const MARGIN_STEPS: f64 = 8.0;

/// Conformal factor of an untwisted job.
pub enum Profile {
    Minimal(MinimalParams<f64>),
    Numeric(OdeSolution<f64>),
}

impl MetricProfile<f64> for Profile {
    fn rho(&self, u: f64) -> f64 {
        match self {
            Profile::Minimal(p) => p.rho(u),
            Profile::Numeric(s) => s.rho(u),
        }
    }
    fn drho(&self, u: f64) -> f64 {
        match self {
            Profile::Minimal(p) => p.drho(u),
            Profile::Numeric(s) => s.drho(u),
        }
    }
    fn ddrho(&self, u: f64) -> f64 {
        match self {
            Profile::Minimal(p) => p.ddrho(u),
            Profile::Numeric(s) => s.ddrho(u),
        }
    }
    fn interval(&self) -> (f64, f64) {
        match self {
            Profile::Minimal(p) => p.interval(),
            Profile::Numeric(s) => s.interval(),
        }
    }
}

pub fn solve_complete(problem: &RhoProblem<f64>, u: (f64, f64), tol: f64) -> Result<OdeSolution<f64>, CliError> {
    let sol = solve_rho(problem, u, tol)?;
    sol.require_complete()?;
    Ok(sol)
}

fn widen(d: Domain<f64>, m: f64) -> Domain<f64> {
    Domain::new((d.u.0 - m, d.u.1 + m), (d.v.0 - m, d.v.1 + m))
}

fn sorted_pair((x, y): (f64, f64)) -> (f64, f64) {
    if x >= y {
        (x, y)
    } else {
        (y, x)
    }
}

fn scale_of(xs: &[f64]) -> f64 {
    xs.iter().fold(1.0, |m, x| m.max(x.abs()))
}

/// What the verifier expects at one parameter value.
struct Expected {
    rho: f64,
    lambdas: (f64, f64),
    gauss: f64,
    gauss_scale: f64,
    codazzi: f64,
    codazzi_scale: f64,
    master: Option<(f64, f64)>,
}

fn twisted_expectation<P: MetricProfile<f64>>(d: &IntrinsicData<f64, P>, u: f64, v: f64) -> Expected {
    let rho = d.profile.rho(u);
    let drho = d.profile.drho(u);
    let ddrho = d.profile.ddrho(u);
    let (l1, l2) = d.lambda_pair(u);
    let (d1, d2) = d.lambda_derivatives(u);
    let (r1, r2) = d.codazzi_residuals(u, v);
    let forcing = d.codazzi * d.codazzi * (4.0 * d.twist * u).exp();
    let quartic = 0.25 * d.mean_curvature * d.mean_curvature * rho.powi(4);
    Expected {
        rho,
        lambdas: sorted_pair((l1, l2)),
        gauss: d.gauss_residual(u),
        gauss_scale: scale_of(&[l1 * l2]),
        codazzi: r1.abs().max(r2.abs()),
        codazzi_scale: scale_of(&[d1, d2, (l1 - l2) * drho / rho, (l1 - l2) * d.twist]),
        master: Some((d.master_ode_residual(u), scale_of(&[drho * drho, rho * ddrho, forcing, quartic]))),
    }
}

fn untwisted_expectation<P: MetricProfile<f64>>(p: &P, c: f64, u: f64) -> Result<Expected, CliError> {
    let rho = p.rho(u);
    let (l1, l2) = untwisted_lambdas(p, c, u)?;
    let dl2 = untwisted_lambda2_derivative(p, c, u)?;
    Ok(Expected {
        rho,
        lambdas: sorted_pair((l1, l2)),
        gauss: untwisted_gauss_residual(p, c, u)?,
        gauss_scale: scale_of(&[l1 * l2]),
        codazzi: untwisted_codazzi_residual(p, c, u)?,
        codazzi_scale: scale_of(&[dl2, (l1 - l2) * p.drho(u) / rho]),
        master: None,
    })
}

fn row(u: f64, v: f64, fp: &FormPair<f64>, pd: &PrincipalData<f64>, ex: &Expected) -> Row {
    let e0 = ex.rho * ex.rho;
    let (c1, c2) = ex.lambdas;
    let h = pd.mean();
    Row {
        u,
        v,
        e: fp.first.xx,
        f: fp.first.xy,
        g: fp.first.yy,
        lambda1: pd.lambda1,
        lambda2: pd.lambda2,
        mean_curvature: h,
        gauss_curvature: pd.gauss(),
        theta: pd.theta,
        gauss_residual: ex.gauss,
        codazzi_residual: ex.codazzi,
        master_residual: ex.master.map(|m| m.0),
        scaled_residual: (ex.gauss / ex.gauss_scale)
            .abs()
            .max(ex.codazzi / ex.codazzi_scale)
            .max(ex.master.map_or(0.0, |(r, s)| (r / s).abs())),
        metric_error: ((fp.first.xx - e0).abs().max((fp.first.yy - e0).abs()).max(fp.first.xy.abs())) / e0,
        curvature_error: (pd.lambda1 - c1).abs().max((pd.lambda2 - c2).abs()) / scale_of(&[c1, c2]),
        mean_curvature_error: (h - (c1 + c2)).abs(),
    }
}

fn collect_rows<F>(mesh: &Mesh<f64>, eval: F) -> Result<Vec<Row>, CliError>
where
    F: Fn(usize, usize, f64, f64) -> Result<Row, CliError> + Sync,
{
    (0..mesh.nu * mesh.nv)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / mesh.nv, k % mesh.nv);
            eval(i, j, mesh.u_samples[i], mesh.v_samples[j])
        })
        .collect()
}

/// Fitted twist over every grid row, or `None` if a sample is umbilic or the
/// unwrap is ambiguous.
fn twist_estimate(mesh: &Mesh<f64>, rows: &[Row]) -> Option<f64> {
    let angles: Option<Vec<Vec<f64>>> =
        rows.chunks(mesh.nv).map(|r| r.iter().map(|x| x.theta).collect::<Option<Vec<f64>>>()).collect();
    fit_twist_from_angles(&mesh.v_samples, &angles?).ok().map(|f| f.a_est)
}

pub struct Outcome {
    pub mesh: Mesh<f64>,
    pub report: Report,
}

pub fn run(job: &Job) -> Result<Outcome, CliError> {
    let g = job.grid;
    let h = job.tol.fd_step;
    let margin = MARGIN_STEPS * h;
    let domain = Domain::new(g.u, g.v);
    let wide = widen(domain, margin);
    let claim = &job.claim;
    let rho_scale = claim.rho_scale.unwrap_or(1.0);

    match job.surface {
        Surface::Minimal(p) => {
            let mesh = sample_mesh(&MinimalSurface::new(p, domain), g.nu, g.nv)?;
            let oracle = MinimalSurface::new(p, wide);
            let claimed = IntrinsicData::new(
                Scaled { inner: p, factor: rho_scale },
                claim.mean_curvature.unwrap_or(0.0),
                claim.a.unwrap_or(p.twist),
                claim.b.unwrap_or(1.0),
            );
            let rows = collect_rows(&mesh, |_, _, u, v| {
                let (fp, _, pd) = curvature_at(&oracle, u, v, h)?;
                Ok(row(u, v, &fp, &pd, &twisted_expectation(&claimed, u, v)))
            })?;
            let a_est = twist_estimate(&mesh, &rows);
            let mut report = Report::new(job, rows, a_est, claimed.twist);
            report.summary.period_vector = period_vector(&p).map(|t| [t.x, t.y, t.z]);
            Ok(Outcome { mesh, report })
        }
        Surface::Cmc(problem) => {
            let sol = solve_complete(&problem, (g.u.0 - margin, g.u.1 + margin), job.tol.ode)?;
            let data = sol.intrinsic();
            let built = integrate_surface(&data, problem.anchor, &FrameState::standard(Vec3::zero()), domain, g.nu, g.nv, None)?;
            let claimed = IntrinsicData::new(
                Scaled { inner: &sol, factor: rho_scale },
                claim.mean_curvature.unwrap_or(problem.mean_curvature),
                claim.a.unwrap_or(problem.twist),
                claim.b.unwrap_or(problem.codazzi),
            );
            let mesh = &built.mesh;
            let rows = collect_rows(mesh, |i, j, u, v| {
                // a short chart around the integrated frame at this vertex
                let chart = TransportedSurface::new(data, u, built.frames[mesh.index(i, j)], widen(Domain::new((u, u), (v, v)), margin))
                    .anchor_v(v)
                    .steps(CHART_STEPS);
                let (fp, _, pd) = curvature_at(&chart, u, v, h)?;
                Ok(row(u, v, &fp, &pd, &twisted_expectation(&claimed, u, v)))
            })?;
            let a_est = twist_estimate(mesh, &rows);
            let mut report = Report::new(job, rows, a_est, claimed.twist);
            report.summary.ode = Some(OdeInfo {
                nodes: sol.u.len(),
                accepted_steps: sol.stats.accepted,
                rejected_steps: sol.stats.rejected,
                frame_drift: built.max_drift,
            });
            Ok(Outcome { mesh: built.mesh, report })
        }
        Surface::Untwisted { profile, scale, c } => {
            let source = match profile {
                ProfileKind::Minimal(p) => Profile::Minimal(p),
                ProfileKind::Cmc(problem) => Profile::Numeric(solve_complete(&problem, wide.u, job.tol.ode)?),
            };
            let profile = Scaled { inner: &source, factor: scale };
            // admissibility is judged on the requested interval, so diagnostics
            // name points the user asked for
            build_revolve(&profile, c, g.u, 1)?;
            let meridian = build_revolve(&profile, c, wide.u, REVOLVE_PANELS)?;
            let map = |d: Domain<f64>| FnSurface::new(d, |u, v| revolve_point(&meridian, u, v));
            let mesh = sample_mesh(&map(domain), g.nu, g.nv)?;
            let oracle = map(wide);
            let claimed = Scaled { inner: &profile, factor: rho_scale };
            let rows = collect_rows(&mesh, |_, _, u, v| {
                let (fp, _, pd) = curvature_at(&oracle, u, v, h)?;
                Ok(row(u, v, &fp, &pd, &untwisted_expectation(&claimed, c, u)?))
            })?;
            let a_est = twist_estimate(&mesh, &rows);
            let report = Report::new(job, rows, a_est, claim.a.unwrap_or(0.0));
            Ok(Outcome { mesh, report })
        }
    }
}
