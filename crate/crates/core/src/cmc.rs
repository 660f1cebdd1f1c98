//! Constant mean curvature surfaces (`H ≠ 0`).
//!
//! The conformal factor solves
//! `ρ'' = (ρ'² − ¼H²ρ⁴ + b²e^{4au})/ρ`, integrated with an adaptive
//! Dormand–Prince pair from an anchor `u₀`. A surface is then built by moving
//! an orthonormal frame `(X̃, Ỹ, Ñ)` first along the profile curve `v = 0`
//! and then across each `v`-line.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Domain, Mesh, SurfaceMap, Sym2};
use crate::intrinsic::{IntrinsicData, MetricProfile};
use crate::minimal::{frame_closed_form, minimal_point, MinimalParams};
use crate::ode::{dopri_step, integrate_adaptive, integrate_fixed, AdaptiveOptions, StepControl, StepStats};
use crate::scalar::{linspace, Real};
use crate::vec3::Vec3;

/// Default relative and absolute tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// The integration stops once `ρ` falls below this value.
pub const RHO_FLOOR: f64 = 1e-8;

/// The integration stops once `|ρ'|` exceeds this value.
pub const DRHO_CEILING: f64 = 1e8;

/// Default cap on the step size is the span divided by this count.
pub const MIN_STEPS_PER_SPAN: usize = 256;

/// Fixed Dormand–Prince steps per leg in [`TransportedSurface`].
pub const DEFAULT_TRANSPORT_STEPS: usize = 256;

/// Sign `σ` in the reduced equation `F'' = −4b e^{σ·2au} sinh F`, where
/// `ρ = e^{φ/2}` and `φ = F + 2au + log b`.
pub const SMYTH_EXPONENT_SIGN: f64 = 1.0;

/// Initial value problem for the conformal factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoProblem<T> {
    pub mean_curvature: T,
    pub twist: T,
    pub codazzi: T,
    pub rho0: T,
    pub drho0: T,
    /// Point `u₀` where `ρ(u₀) = rho0` and `ρ'(u₀) = drho0`.
    pub anchor: T,
}

impl<T: Real> RhoProblem<T> {
    pub fn new(mean_curvature: T, twist: T, codazzi: T, rho0: T, drho0: T) -> Self {
        Self { mean_curvature, twist, codazzi, rho0, drho0, anchor: T::zero() }
    }

    pub fn at(mut self, anchor: T) -> Self {
        self.anchor = anchor;
        self
    }

    /// Right-hand side of the first-order system in `(ρ, ρ')`.
    pub fn rhs(&self, u: T, y: &[T; 2]) -> [T; 2] {
        [y[1], self.second_derivative(u, y[0], y[1])]
    }

    pub fn second_derivative(&self, u: T, rho: T, drho: T) -> T {
        let h = self.mean_curvature;
        let b = self.codazzi;
        let rho2 = rho * rho;
        (drho * drho - T::lit(0.25) * h * h * rho2 * rho2 + b * b * (T::lit(4.0) * self.twist * u).exp()) / rho
    }
}

/// Numerical solution of a [`RhoProblem`].
///
/// Off the grid, `(ρ, ρ')` come from one Dormand–Prince step taken from the
/// node the solver itself stepped from (the left node for `u ≥ u₀`, the right
/// node for `u < u₀`), and `ρ''` from the right-hand side. The result
/// reproduces the nodes exactly, is continuous across them, and is smooth
/// enough inside each segment for finite differences.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution<T> {
    pub problem: RhoProblem<T>,
    /// Strictly increasing nodes.
    pub u: Vec<T>,
    pub rho: Vec<T>,
    pub drho: Vec<T>,
    /// `ρ''` at the nodes, from the right-hand side.
    pub ddrho: Vec<T>,
    pub stats: StepStats,
    /// Where the backward run stopped early, if it did.
    pub truncated_below: Option<T>,
    /// Where the forward run stopped early, if it did.
    pub truncated_above: Option<T>,
}

impl<T: Real> OdeSolution<T> {
    pub fn is_truncated(&self) -> bool {
        self.truncated_below.is_some() || self.truncated_above.is_some()
    }

    /// Covered interval `[u_first, u_last]`.
    pub fn span(&self) -> (T, T) {
        (self.u[0], self.u[self.u.len() - 1])
    }

    /// Fails with [`Error::BlowUp`] if either run stopped early.
    pub fn require_complete(&self) -> Result<&Self> {
        match self.truncated_below.or(self.truncated_above) {
            None => Ok(self),
            Some(u) => {
                let (lo, hi) = self.span();
                Err(Error::BlowUp { u: u.as_f64(), lo: lo.as_f64(), hi: hi.as_f64() })
            }
        }
    }

    /// Intrinsic data backed by this solution.
    pub fn intrinsic(&self) -> IntrinsicData<T, &Self> {
        IntrinsicData::new(self, self.problem.mean_curvature, self.problem.twist, self.problem.codazzi)
    }

    /// `(ρ, ρ', ρ'')` at `u`.
    pub fn state(&self, u: T) -> [T; 3] {
        let n = self.u.len();
        let exact = self.u.binary_search_by(|x| x.partial_cmp(&u).unwrap_or(std::cmp::Ordering::Less));
        if let Ok(i) = exact {
            return [self.rho[i], self.drho[i], self.ddrho[i]];
        }
        let start = if n == 1 {
            0
        } else {
            let i = self.u.partition_point(|&x| x <= u).clamp(1, n - 1) - 1;
            if u >= self.problem.anchor { i } else { i + 1 }
        };
        let rhs = |t: T, y: &[T; 2]| self.problem.rhs(t, y);
        let (y, _) = dopri_step(&rhs, self.u[start], &[self.rho[start], self.drho[start]], u - self.u[start]);
        [y[0], y[1], self.problem.second_derivative(u, y[0], y[1])]
    }
}

impl<T: Real> MetricProfile<T> for OdeSolution<T> {
    fn rho(&self, u: T) -> T {
        self.state(u)[0]
    }
    fn drho(&self, u: T) -> T {
        self.state(u)[1]
    }
    fn ddrho(&self, u: T) -> T {
        self.state(u)[2]
    }
    fn interval(&self) -> (T, T) {
        self.span()
    }
}

/// Solves the conformal-factor equation on `u_range` with `rtol = atol = tol`
/// and the default step cap.
pub fn solve_rho<T: Real>(problem: &RhoProblem<T>, u_range: (T, T), tol: T) -> Result<OdeSolution<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let span = (u_range.1 - u_range.0).abs();
    let opts = AdaptiveOptions::with_tol(tol).max_step(span / T::from_count(MIN_STEPS_PER_SPAN));
    solve_rho_with(problem, u_range, &opts)
}

pub fn solve_rho_with<T: Real>(
    problem: &RhoProblem<T>,
    u_range: (T, T),
    opts: &AdaptiveOptions<T>,
) -> Result<OdeSolution<T>> {
    let p = problem;
    if !(p.rho0 > T::zero()) {
        return Err(Error::NonPositiveInitialRho(p.rho0.as_f64()));
    }
    let all_finite = [p.mean_curvature, p.twist, p.codazzi, p.drho0, p.anchor, u_range.0, u_range.1]
        .iter()
        .all(|x| x.is_finite());
    if !all_finite || !(u_range.0 < u_range.1) {
        return Err(Error::InvalidParameter("u range must be finite with lo < hi".into()));
    }
    if p.anchor < u_range.0 || p.anchor > u_range.1 {
        return Err(Error::InvalidParameter(format!(
            "anchor u0 = {} lies outside [{}, {}]",
            p.anchor, u_range.0, u_range.1
        )));
    }
    let rhs = |u: T, y: &[T; 2]| p.rhs(u, y);
    let mut stats = StepStats::default();

    // nodes (u, ρ, ρ') of one direction and where it stopped early
    type Leg<T> = (Vec<(T, T, T)>, Option<T>);
    let mut run = |end: T| -> Result<Leg<T>> {
        let mut nodes = Vec::new();
        let mut stopped_at = None;
        let outcome = integrate_adaptive(&rhs, p.anchor, [p.rho0, p.drho0], end, opts, |u, y| {
            if y[0] < T::lit(RHO_FLOOR) || y[1].abs() > T::lit(DRHO_CEILING) {
                stopped_at = Some(u);
                return StepControl::Stop;
            }
            nodes.push((u, y[0], y[1]));
            StepControl::Continue
        });
        match outcome {
            Ok(out) => stats += out.stats,
            Err(Error::StepSizeUnderflow { t }) => stopped_at = Some(T::lit(t)),
            Err(e) => return Err(e),
        }
        Ok((nodes, stopped_at))
    };

    let (back, truncated_below) = if p.anchor > u_range.0 { run(u_range.0)? } else { (Vec::new(), None) };
    let (fwd, truncated_above) = if p.anchor < u_range.1 { run(u_range.1)? } else { (Vec::new(), None) };

    let nodes: Vec<(T, T, T)> = back
        .into_iter()
        .rev()
        .chain(std::iter::once((p.anchor, p.rho0, p.drho0)))
        .chain(fwd)
        .collect();
    let ddrho = nodes.iter().map(|&(u, r, d)| p.second_derivative(u, r, d)).collect();
    Ok(OdeSolution {
        problem: *p,
        u: nodes.iter().map(|n| n.0).collect(),
        rho: nodes.iter().map(|n| n.1).collect(),
        drho: nodes.iter().map(|n| n.2).collect(),
        ddrho,
        stats,
        truncated_below,
        truncated_above,
    })
}

/// Position and orthonormal frame `(X̃, Ỹ, Ñ)` at a parameter point, where
/// `X̃ = f_u/ρ`, `Ỹ = f_v/ρ` and `Ñ = X̃ × Ỹ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameState<T> {
    pub position: Vec3<T>,
    pub e_u: Vec3<T>,
    pub e_v: Vec3<T>,
    pub normal: Vec3<T>,
}

impl<T: Real> FrameState<T> {
    /// Standard basis at `position`.
    pub fn standard(position: Vec3<T>) -> Self {
        Self { position, e_u: Vec3::unit_x(), e_v: Vec3::unit_y(), normal: Vec3::unit_z() }
    }

    /// Frame of the closed-form minimal immersion at `(u0, 0)`.
    pub fn minimal(p: &MinimalParams<T>, u0: T) -> Self {
        let fr = frame_closed_form(p, u0);
        Self { position: minimal_point(p, u0, T::zero()), e_u: fr.e_u, e_v: fr.e_v, normal: fr.normal }
    }

    /// Frame of [`cylinder_point`] at `(u0, 0)`.
    pub fn cylinder(mean_curvature: T, twist: T, codazzi: T, u0: T) -> Self {
        let r = cylinder_angle(mean_curvature, twist, codazzi, u0);
        let (s, c) = r.sin_cos();
        Self {
            position: Vec3::new(c, s, T::zero()) / mean_curvature,
            e_u: Vec3::new(-s, c, T::zero()),
            e_v: Vec3::unit_z(),
            normal: Vec3::new(c, s, T::zero()),
        }
    }

    pub fn to_array(&self) -> [T; 12] {
        let mut out = [T::zero(); 12];
        for (k, v) in [self.position, self.e_u, self.e_v, self.normal].iter().enumerate() {
            out[3 * k..3 * k + 3].copy_from_slice(&v.to_array());
        }
        out
    }

    pub fn from_array(y: &[T; 12]) -> Self {
        let v = |k: usize| Vec3::new(y[3 * k], y[3 * k + 1], y[3 * k + 2]);
        Self { position: v(0), e_u: v(1), e_v: v(2), normal: v(3) }
    }

    /// Largest entry of `|GᵀG − Id|` for the frame matrix `G`.
    pub fn orthonormality_defect(&self) -> T {
        let e = [self.e_u, self.e_v, self.normal];
        let mut worst = T::zero();
        for i in 0..3 {
            for j in i..3 {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((e[i].dot(e[j]) - target).abs());
            }
        }
        worst
    }

    /// Modified Gram–Schmidt in the order `X̃, Ỹ, Ñ`.
    pub fn orthonormalize(&mut self) {
        self.e_u = self.e_u.normalize();
        self.e_v = (self.e_v - self.e_u * self.e_v.dot(self.e_u)).normalize();
        let mut n = self.normal;
        n = n - self.e_u * n.dot(self.e_u);
        n = n - self.e_v * n.dot(self.e_v);
        self.normal = n.normalize();
    }
}

/// Frame equations along `u` at fixed `v`:
/// `f_u = ρX̃`, `X̃_u = −ρ s₁₁ Ñ`, `Ỹ_u = −ρ s₁₂ Ñ`, `Ñ_u = ρ(s₁₁X̃ + s₁₂Ỹ)`.
fn u_transport<T: Real, P: MetricProfile<T>>(data: &IntrinsicData<T, P>, v: T) -> impl Fn(T, &[T; 12]) -> [T; 12] + '_ {
    move |u, y| {
        let f = FrameState::from_array(y);
        let rho = data.profile.rho(u);
        let s = data.shape_in_frame(u, v);
        FrameState {
            position: f.e_u * rho,
            e_u: f.normal * (-rho * s.xx),
            e_v: f.normal * (-rho * s.xy),
            normal: (f.e_u * s.xx + f.e_v * s.xy) * rho,
        }
        .to_array()
    }
}

/// Frame equations along `v` at fixed `u`, with `κ = ρ'/ρ`:
/// `f_v = ρỸ`, `X̃_v = κỸ − ρ s₁₂ Ñ`, `Ỹ_v = −κX̃ − ρ s₂₂ Ñ`, `Ñ_v = ρ(s₁₂X̃ + s₂₂Ỹ)`.
fn v_transport<T: Real, P: MetricProfile<T>>(data: &IntrinsicData<T, P>, u: T) -> impl Fn(T, &[T; 12]) -> [T; 12] + '_ {
    let rho = data.profile.rho(u);
    let kappa = data.profile.drho(u) / rho;
    move |v, y| {
        let f = FrameState::from_array(y);
        let s = data.shape_in_frame(u, v);
        FrameState {
            position: f.e_v * rho,
            e_u: f.e_v * kappa - f.normal * (rho * s.xy),
            e_v: -(f.e_u * kappa) - f.normal * (rho * s.yy),
            normal: (f.e_u * s.xy + f.e_v * s.yy) * rho,
        }
        .to_array()
    }
}

/// Frames at sorted sample times, integrated outward from `t0` in both
/// directions with re-orthonormalization after every accepted step.
struct Transported<T> {
    states: Vec<FrameState<T>>,
    max_drift: T,
    stats: StepStats,
}

fn transport_to_samples<T: Real, F: Fn(T, &[T; 12]) -> [T; 12]>(
    f: &F,
    t0: T,
    init: &FrameState<T>,
    samples: &[T],
    opts: &AdaptiveOptions<T>,
) -> Result<Transported<T>> {
    let mut states = vec![*init; samples.len()];
    let mut max_drift = T::zero();
    let mut stats = StepStats::default();
    let split = samples.partition_point(|&s| s < t0);
    let forward: Vec<usize> = (split..samples.len()).collect();
    let backward: Vec<usize> = (0..split).rev().collect();
    for order in [forward, backward] {
        let (mut t, mut y) = (t0, init.to_array());
        for k in order {
            let out = integrate_adaptive(f, t, y, samples[k], opts, |_, y| {
                let mut fr = FrameState::from_array(y);
                max_drift = max_drift.max(fr.orthonormality_defect());
                fr.orthonormalize();
                *y = fr.to_array();
                StepControl::Continue
            })?;
            stats += out.stats;
            t = samples[k];
            y = out.y;
            states[k] = FrameState::from_array(&y);
        }
    }
    Ok(Transported { states, max_drift, stats })
}

fn check_sorted<T: Real>(samples: &[T]) -> Result<()> {
    if samples.windows(2).all(|w| w[0] < w[1]) && samples.iter().all(|s| s.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter("samples must be finite and strictly increasing".into()))
    }
}

fn check_covered<T: Real, P: MetricProfile<T>>(profile: &P, lo: T, hi: T) -> Result<()> {
    let (a, b) = profile.interval();
    if lo < a || hi > b {
        return Err(Error::InvalidParameter(format!(
            "u range [{lo}, {hi}] exceeds the profile interval [{a}, {b}]"
        )));
    }
    Ok(())
}

fn adaptive_defaults<T: Real>(span: T) -> AdaptiveOptions<T> {
    let opts = AdaptiveOptions::with_tol(T::lit(DEFAULT_TOL));
    if span > T::zero() {
        opts.max_step(span / T::from_count(MIN_STEPS_PER_SPAN))
    } else {
        opts
    }
}

/// Frames along the profile curve `v = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTrack<T> {
    pub s: Vec<T>,
    pub frames: Vec<FrameState<T>>,
    /// Largest orthonormality defect seen before any re-orthonormalization.
    pub max_drift: T,
    pub stats: StepStats,
}

/// Integrates `c̃' = ρX̃`, `X̃' = −ρλ₁Ñ`, `Ỹ' = 0`, `Ñ' = ρλ₁X̃` from
/// `init` at `s = anchor` to each of the sorted `samples`.
pub fn integrate_profile<T: Real, P: MetricProfile<T>>(
    data: &IntrinsicData<T, P>,
    anchor: T,
    init: &FrameState<T>,
    samples: &[T],
    opts: Option<&AdaptiveOptions<T>>,
) -> Result<ProfileTrack<T>> {
    check_sorted(samples)?;
    if samples.is_empty() {
        return Ok(ProfileTrack { s: Vec::new(), frames: Vec::new(), max_drift: T::zero(), stats: StepStats::default() });
    }
    let (lo, hi) = (samples[0].min(anchor), samples[samples.len() - 1].max(anchor));
    check_covered(&data.profile, lo, hi)?;
    let defaults = adaptive_defaults(hi - lo);
    let rhs = u_transport(data, T::zero());
    let out = transport_to_samples(&rhs, anchor, init, samples, opts.unwrap_or(&defaults))?;
    Ok(ProfileTrack { s: samples.to_vec(), frames: out.states, max_drift: out.max_drift, stats: out.stats })
}

/// A mesh built by frame transport, with the frames at every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratedSurface<T> {
    pub mesh: Mesh<T>,
    pub frames: Vec<FrameState<T>>,
    pub max_drift: T,
    pub stats: StepStats,
}

/// Builds an `nu × nv` mesh: the profile pass along `v = 0` through the
/// `u` samples, then an independent `v` transport for every column.
pub fn integrate_surface<T: Real, P: MetricProfile<T>>(
    data: &IntrinsicData<T, P>,
    anchor: T,
    init: &FrameState<T>,
    domain: Domain<T>,
    nu: usize,
    nv: usize,
    opts: Option<&AdaptiveOptions<T>>,
) -> Result<IntegratedSurface<T>> {
    if nu < 2 || nv < 2 {
        return Err(Error::InvalidParameter(format!("mesh needs nu, nv >= 2 (got {nu} x {nv})")));
    }
    let u_samples = linspace(domain.u.0, domain.u.1, nu);
    let v_samples = linspace(domain.v.0, domain.v.1, nv);
    check_sorted(&u_samples)?;
    check_sorted(&v_samples)?;
    let span = (domain.u.1 - domain.u.0).max(domain.v.1 - domain.v.0);
    let defaults = adaptive_defaults(span);
    let opts = opts.unwrap_or(&defaults);

    let profile = integrate_profile(data, anchor, init, &u_samples, Some(opts))?;
    let columns: Vec<Transported<T>> = u_samples
        .par_iter()
        .zip(profile.frames.par_iter())
        .map(|(&u, frame)| transport_to_samples(&v_transport(data, u), T::zero(), frame, &v_samples, opts))
        .collect::<Result<_>>()?;

    let mut max_drift = profile.max_drift;
    let mut stats = profile.stats;
    let mut frames = Vec::with_capacity(nu * nv);
    for col in columns {
        max_drift = max_drift.max(col.max_drift);
        stats += col.stats;
        frames.extend(col.states);
    }
    let mesh = Mesh {
        nu,
        nv,
        u_samples,
        v_samples,
        vertices: frames.iter().map(|f| f.position).collect(),
        normals: frames.iter().map(|f| f.normal).collect(),
    };
    Ok(IntegratedSurface { mesh, frames, max_drift, stats })
}

/// Order in which [`TransportedSurface`] walks from the anchor to `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportPath {
    /// Along `v = v₀` to `u`, then along `v`.
    UThenV,
    /// Along `u = u₀` to `v`, then along `u`.
    VThenU,
}

/// Frame transport as a [`SurfaceMap`], starting from `init` at
/// `(anchor, anchor_v)`.
///
/// Each evaluation uses a fixed number of Dormand–Prince steps per leg, so
/// the map is smooth in `(u, v)` and safe to differentiate numerically.
#[derive(Debug, Clone, Copy)]
pub struct TransportedSurface<T, P> {
    pub data: IntrinsicData<T, P>,
    pub anchor: T,
    pub anchor_v: T,
    pub init: FrameState<T>,
    pub domain: Domain<T>,
    pub steps: usize,
    pub path: TransportPath,
}

impl<T: Real, P: MetricProfile<T>> TransportedSurface<T, P> {
    pub fn new(data: IntrinsicData<T, P>, anchor: T, init: FrameState<T>, domain: Domain<T>) -> Self {
        Self {
            data,
            anchor,
            anchor_v: T::zero(),
            init,
            domain,
            steps: DEFAULT_TRANSPORT_STEPS,
            path: TransportPath::UThenV,
        }
    }

    /// Moves the base point to `(anchor, v)`. A short chart around a known
    /// frame needs only a handful of steps.
    pub fn anchor_v(mut self, v: T) -> Self {
        self.anchor_v = v;
        self
    }

    pub fn steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn path(mut self, path: TransportPath) -> Self {
        self.path = path;
        self
    }

    pub fn frame(&self, u: T, v: T) -> FrameState<T> {
        let y0 = self.init.to_array();
        let y = match self.path {
            TransportPath::UThenV => {
                let y1 = integrate_fixed(&u_transport(&self.data, self.anchor_v), self.anchor, y0, u, self.steps);
                integrate_fixed(&v_transport(&self.data, u), self.anchor_v, y1, v, self.steps)
            }
            TransportPath::VThenU => {
                let y1 = integrate_fixed(&v_transport(&self.data, self.anchor), self.anchor_v, y0, v, self.steps);
                integrate_fixed(&u_transport(&self.data, v), self.anchor, y1, u, self.steps)
            }
        };
        FrameState::from_array(&y)
    }
}

impl<T: Real, P: MetricProfile<T>> SurfaceMap<T> for TransportedSurface<T, P> {
    fn eval(&self, u: T, v: T) -> Vec3<T> {
        self.frame(u, v).position
    }
    fn domain(&self) -> Domain<T> {
        self.domain
    }
}

fn cylinder_angle<T: Real>(mean_curvature: T, twist: T, codazzi: T, u: T) -> T {
    (T::two() * codazzi * mean_curvature).sqrt() * (twist * u).exp() / twist
}

/// Cylinder of radius `1/H` in geodesic polar coordinates:
/// with `r = √(2bH) e^{au}/a`,
/// `f = (cos(r cos av), sin(r cos av), r sin av)/H`.
pub fn cylinder_point<T: Real>(mean_curvature: T, twist: T, codazzi: T, u: T, v: T) -> Vec3<T> {
    let r = cylinder_angle(mean_curvature, twist, codazzi, u);
    let (s, c) = (twist * v).sin_cos();
    let (sa, ca) = (r * c).sin_cos();
    Vec3::new(ca, sa, r * s) / mean_curvature
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderSurface<T> {
    pub mean_curvature: T,
    pub twist: T,
    pub codazzi: T,
    pub domain: Domain<T>,
}

impl<T: Real> CylinderSurface<T> {
    pub fn new(mean_curvature: T, twist: T, codazzi: T, domain: Domain<T>) -> Result<Self> {
        if !(mean_curvature > T::zero() && codazzi > T::zero() && twist != T::zero()) {
            return Err(Error::InvalidParameter("cylinder needs H > 0, b > 0 and a != 0".into()));
        }
        Ok(Self { mean_curvature, twist, codazzi, domain })
    }
}

impl<T: Real> SurfaceMap<T> for CylinderSurface<T> {
    fn eval(&self, u: T, v: T) -> Vec3<T> {
        cylinder_point(self.mean_curvature, self.twist, self.codazzi, u, v)
    }
    fn domain(&self) -> Domain<T> {
        self.domain
    }
}

/// Hopf differential `Ω(z) = ½ b e^{2az}`.
pub fn hopf<T: Real>(codazzi: T, twist: T, z: Complex<T>) -> Complex<T> {
    (z * (T::two() * twist)).exp() * (T::half() * codazzi)
}

/// `Ω = I(S ∂z, ∂z) = ¼ρ²(s₁₁ − s₂₂ − 2i s₁₂)` from the shape operator in the
/// orthonormal frame.
pub fn hopf_from_shape<T: Real>(rho: T, s: &Sym2<T>) -> Complex<T> {
    Complex::new(s.xx - s.yy, -T::two() * s.xy) * (T::lit(0.25) * rho * rho)
}

/// Smyth's variables for a profile with Codazzi constant `b > 0`:
/// `φ = 2 log ρ` and `F = φ − 2au − log b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmythForm<T, P> {
    pub profile: P,
    pub twist: T,
    pub codazzi: T,
}

impl<T: Real, P: MetricProfile<T>> SmythForm<T, P> {
    pub fn new(profile: P, twist: T, codazzi: T) -> Result<Self> {
        if !(codazzi > T::zero()) {
            return Err(Error::InvalidParameter(format!("Smyth reduction needs b > 0, got {codazzi}")));
        }
        Ok(Self { profile, twist, codazzi })
    }

    pub fn phi(&self, u: T) -> T {
        T::two() * self.profile.rho(u).ln()
    }

    pub fn reduced(&self, u: T) -> T {
        self.phi(u) - T::two() * self.twist * u - self.codazzi.ln()
    }

    /// `F'' = φ'' = 2(ρρ'' − ρ'²)/ρ²`.
    pub fn reduced_second_derivative(&self, u: T) -> T {
        let rho = self.profile.rho(u);
        let drho = self.profile.drho(u);
        T::two() * (rho * self.profile.ddrho(u) - drho * drho) / (rho * rho)
    }

    /// `μ = ρ²(λ₁ − H/2) = b e^{2au}`.
    pub fn mu(&self, u: T) -> T {
        self.codazzi * (T::two() * self.twist * u).exp()
    }

    /// `F'' + 4b e^{σ·2au} sinh F` for an explicit sign `σ`.
    pub fn residual_with_sign(&self, u: T, sign: T) -> T {
        let f = self.reduced(u);
        self.reduced_second_derivative(u)
            + T::lit(4.0) * self.codazzi * (sign * T::two() * self.twist * u).exp() * f.sinh()
    }

    pub fn residual(&self, u: T) -> T {
        self.residual_with_sign(u, T::lit(SMYTH_EXPONENT_SIGN))
    }
}

/// Residual of the reduced equation for an `H = 2` profile.
pub fn smyth_residual<T: Real, P: MetricProfile<T>>(profile: P, twist: T, codazzi: T, u: T) -> Result<T> {
    Ok(SmythForm::new(profile, twist, codazzi)?.residual(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intrinsic::ExpProfile;

    #[test]
    fn dense_output_matches_nodes_and_is_continuous() {
        let p = RhoProblem::new(0.5_f64, 1.0, 4.2625, 2.0, 2.0);
        let sol = solve_rho(&p, (-1.0, 1.0), 1e-10).unwrap();
        for (k, &u) in sol.u.iter().enumerate() {
            assert_eq!(sol.rho(u), sol.rho[k]);
            assert_eq!(sol.drho(u), sol.drho[k]);
            let eps = 1e-12 * (1.0 + u.abs());
            for x in [u - eps, u + eps] {
                assert!((sol.rho(x) - sol.rho[k]).abs() < 1e-10 * sol.rho[k]);
                assert!((sol.drho(x) - sol.drho[k]).abs() < 1e-9 * (1.0 + sol.drho[k].abs()));
            }
        }
    }

    #[test]
    fn dense_output_between_nodes_follows_the_cylinder() {
        let e = 1.0_f64.exp();
        let p = RhoProblem::new(1.0, 1.0, 0.5, e, e).at(1.0);
        let sol = solve_rho(&p, (0.0, 2.0), 1e-10).unwrap();
        for u in linspace(0.0, 2.0, 397) {
            assert!((sol.rho(u) - u.exp()).abs() < 1e-9 * u.exp());
            assert!((sol.drho(u) - u.exp()).abs() < 1e-9 * u.exp());
        }
    }

    #[test]
    fn nonpositive_rho_is_rejected() {
        let p = RhoProblem::new(1.0, 1.0, 0.5, 0.0, 1.0);
        assert_eq!(solve_rho(&p, (0.0, 1.0), 1e-8), Err(Error::NonPositiveInitialRho(0.0)));
        let p = RhoProblem::new(1.0, 1.0, 0.5, 1.0, 1.0).at(3.0);
        assert!(solve_rho(&p, (0.0, 1.0), 1e-8).is_err());
    }

    #[test]
    fn cylinder_rho_is_recovered() {
        let p = RhoProblem::new(1.0_f64, 1.0, 0.5, 1.0, 1.0);
        let sol = solve_rho(&p, (0.0, 2.0), 1e-10).unwrap();
        assert!(!sol.is_truncated());
        for (&u, &r) in sol.u.iter().zip(&sol.rho) {
            assert!((r - u.exp()).abs() <= 1e-9 * u.exp(), "u={u}");
        }
    }

    #[test]
    fn blow_up_is_flagged_with_partial_solution() {
        // ρ'' ≈ ρ'²/ρ + e^{4u}/ρ grows without bound well before u = 10.
        let p = RhoProblem::new(0.0, 1.0, 1.0, 1.0, 2.0);
        let sol = solve_rho(&p, (0.0, 10.0), 1e-8).unwrap();
        assert!(sol.truncated_above.is_some() && sol.span().1 < 10.0);
        let p = RhoProblem::new(0.0, 0.0, 0.0, 1.0, -2.0);
        let sol = solve_rho(&p, (0.0, 5.0), 1e-8).unwrap();
        // ρ'²/ρ keeps ρ'' positive, ρ = e^{-2u} never vanishes
        assert!(!sol.is_truncated());
        // log ρ is concave with slope below −3, so ρ drops under the floor
        let p = RhoProblem::new(4.0, 0.0, 0.0, 1.0, -3.0);
        let sol = solve_rho(&p, (0.0, 10.0), 1e-8).unwrap();
        assert!(sol.is_truncated());
        assert!(matches!(sol.require_complete(), Err(Error::BlowUp { .. })));
        assert!(sol.rho.iter().all(|&r| r > 0.0));
    }

    #[test]
    fn frame_packing_round_trips() {
        let f = FrameState::cylinder(1.0, 1.0, 0.5, 0.3);
        assert_eq!(FrameState::from_array(&f.to_array()), f);
        assert!(f.orthonormality_defect() < 1e-15);
        assert!((f.e_u.cross(f.e_v) - f.normal).norm() < 1e-15);
    }

    #[test]
    fn gram_schmidt_restores_orthonormality() {
        let mut f = FrameState::standard(Vec3::zero());
        f.e_u = Vec3::new(1.01, 0.02, 0.0);
        f.e_v = Vec3::new(0.03, 0.99, 0.01);
        f.normal = Vec3::new(0.0, -0.02, 1.02);
        assert!(f.orthonormality_defect() > 1e-2);
        f.orthonormalize();
        assert!(f.orthonormality_defect() < 1e-15);
    }

    #[test]
    fn cylinder_point_lies_on_the_cylinder() {
        for &(u, v) in &[(0.0, 0.0), (0.7, 1.3), (-1.0, 4.0)] {
            let p = cylinder_point(0.5_f64, 1.0, 0.3, u, v);
            assert!((p.x * p.x + p.y * p.y - 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cylinder_frame_matches_the_parametrization() {
        let (h, a, b, u) = (0.5, 1.3, 0.3, 0.2);
        let f = FrameState::cylinder(h, a, b, u);
        let rho = ExpProfile::cylinder(h, a, b).rho(u);
        let d = 1e-6;
        let fu = (cylinder_point(h, a, b, u + d, 0.0) - cylinder_point(h, a, b, u - d, 0.0)) / (2.0 * d);
        let fv = (cylinder_point(h, a, b, u, d) - cylinder_point(h, a, b, u, -d)) / (2.0 * d);
        assert!((fu / rho - f.e_u).norm() < 1e-8);
        assert!((fv / rho - f.e_v).norm() < 1e-8);
        assert!((f.position - cylinder_point(h, a, b, u, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hopf_values() {
        assert_eq!(hopf(3.0, 1.0, Complex::new(0.0, 0.0)), Complex::new(1.5, 0.0));
        let d = IntrinsicData::new(ExpProfile::cylinder(1.0, 0.7, 0.4), 1.0, 0.7, 0.4);
        for &(u, v) in &[(0.1, 0.2), (-0.5, 2.0)] {
            let got = hopf_from_shape(d.profile.rho(u), &d.shape_in_frame(u, v));
            assert!((got - hopf(0.4, 0.7, Complex::new(u, v))).norm() < 1e-12);
        }
    }

    #[test]
    fn smyth_sign_selects_the_vanishing_residual() {
        // The cylinder has F ≡ 0 and cannot tell the signs apart; a
        // non-explicit solution can.
        let p = RhoProblem::new(2.0, 1.0, 1.0, 1.0, 0.0);
        let sol = solve_rho(&p, (-0.5, 0.5), 1e-11).unwrap();
        let form = SmythForm::new(&sol, 1.0, 1.0).unwrap();
        let worst = |sign: f64| sol.u.iter().map(|&u| form.residual_with_sign(u, sign).abs()).fold(0.0, f64::max);
        assert!(worst(1.0) < 1e-8, "{}", worst(1.0));
        assert!(worst(-1.0) > 1e-2);
        assert_eq!(SMYTH_EXPONENT_SIGN, 1.0);
        assert!(SmythForm::new(&sol, 1.0, 0.0).is_err());
    }

    #[test]
    fn local_chart_reproduces_the_global_map() {
        let p = RhoProblem::new(0.5_f64, 1.0, 4.2625, 2.0, 2.0);
        let sol = solve_rho(&p, (-1.0, 1.0), 1e-10).unwrap();
        let dom = Domain::new((-1.0, 1.0), (0.0, 6.3));
        let global = TransportedSurface::new(sol.intrinsic(), 0.0, FrameState::standard(Vec3::zero()), dom).steps(400);
        let (u0, v0) = (0.4, 2.5);
        let local = TransportedSurface::new(sol.intrinsic(), u0, global.frame(u0, v0), dom).anchor_v(v0).steps(4);
        for (du, dv) in [(1e-3, 0.0), (0.0, -1e-3), (2e-3, 1e-3)] {
            let gap = local.eval(u0 + du, v0 + dv) - global.eval(u0 + du, v0 + dv);
            assert!(gap.norm() < 1e-9, "{}", gap.norm());
        }
    }

    #[test]
    fn solver_error_tracks_the_tolerance() {
        // uncapped steps, so the tolerance alone sets the accuracy
        let p = RhoProblem::new(1.0_f64, 1.0, 0.5, 1.0, 1.0);
        let err = |tol: f64| {
            let s = solve_rho_with(&p, (0.0, 2.0), &AdaptiveOptions::with_tol(tol).max_step(2.0)).unwrap();
            s.u.iter().map(|&u| (s.rho(u) - u.exp()).abs() / u.exp()).fold(0.0, f64::max)
        };
        let errs: Vec<f64> = [1e-5, 1e-6, 1e-7, 1e-8].into_iter().map(err).collect();
        for (k, w) in errs.windows(2).enumerate() {
            assert!(w[1] < w[0] / 4.0, "{errs:?}");
            assert!(w[0] < 10f64.powi(-5 - k as i32));
        }
        // fixed steps on the same problem: halving h gains the full order
        let fixed = |n: usize| {
            let y = integrate_fixed(&|u, y: &[f64; 2]| p.rhs(u, y), 0.0, [1.0, 1.0], 2.0, n);
            (y[0] - 2f64.exp()).abs()
        };
        assert!(fixed(16) / fixed(32) > 16.0);
    }
}
