//! Finite-difference differential geometry of parametrized surfaces.
//!
//! Everything here only needs point evaluations `f(u, v)`, which makes these
//! routines the independent referee for the closed-form and integrated
//! surfaces elsewhere in the crate.
//!
//! Sign convention: the unit normal is `N = f_u × f_v / |f_u × f_v|` and the
//! shape operator is `S = df⁻¹ ∘ dN`, so `II(X, Y) = −⟨∂_X ∂_Y f, N⟩`. With
//! this orientation the outward-parametrized unit sphere has `S = +Id`, and
//! mean curvature is the sum `λ₁ + λ₂`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{linspace, mod_pi, wrap_half_pi, Real};
use crate::vec3::Vec3;

/// Parameter rectangle `(u₁, u₂) × (v₁, v₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain<T> {
    pub u: (T, T),
    pub v: (T, T),
}

impl<T: Real> Domain<T> {
    pub fn new(u: (T, T), v: (T, T)) -> Self {
        Self { u, v }
    }

    pub fn diameter(&self) -> T {
        let du = self.u.1 - self.u.0;
        let dv = self.v.1 - self.v.0;
        (du * du + dv * dv).sqrt()
    }

    /// Default finite-difference step: `1e-4 × diameter`.
    pub fn default_step(&self) -> T {
        T::lit(1e-4) * self.diameter()
    }

    pub fn contains_with_margin(&self, u: T, v: T, margin: T) -> bool {
        u - self.u.0 > margin && self.u.1 - u > margin && v - self.v.0 > margin && self.v.1 - v > margin
    }
}

/// A parametrized surface `(u, v) ↦ f(u, v) ∈ ℝ³`.
pub trait SurfaceMap<T: Real>: Sync {
    fn eval(&self, u: T, v: T) -> Vec3<T>;
    fn domain(&self) -> Domain<T>;
}

impl<T: Real, S: SurfaceMap<T> + ?Sized> SurfaceMap<T> for &S {
    fn eval(&self, u: T, v: T) -> Vec3<T> {
        (**self).eval(u, v)
    }
    fn domain(&self) -> Domain<T> {
        (**self).domain()
    }
}

/// Surface backed by a closure.
pub struct FnSurface<T, F> {
    f: F,
    domain: Domain<T>,
}

impl<T: Real, F: Fn(T, T) -> Vec3<T> + Sync> FnSurface<T, F> {
    pub fn new(domain: Domain<T>, f: F) -> Self {
        Self { f, domain }
    }
}

impl<T: Real, F: Fn(T, T) -> Vec3<T> + Sync> SurfaceMap<T> for FnSurface<T, F> {
    fn eval(&self, u: T, v: T) -> Vec3<T> {
        (self.f)(u, v)
    }
    fn domain(&self) -> Domain<T> {
        self.domain
    }
}

/// Structured `nu × nv` grid of vertices with per-vertex unit normals.
///
/// Vertex `(i, j)` sits at `(u_samples[i], v_samples[j])` and is stored at
/// index `i * nv + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh<T> {
    pub nu: usize,
    pub nv: usize,
    pub u_samples: Vec<T>,
    pub v_samples: Vec<T>,
    pub vertices: Vec<Vec3<T>>,
    pub normals: Vec<Vec3<T>>,
}

impl<T: Real> Mesh<T> {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    pub fn vertex(&self, i: usize, j: usize) -> Vec3<T> {
        self.vertices[self.index(i, j)]
    }

    pub fn normal(&self, i: usize, j: usize) -> Vec3<T> {
        self.normals[self.index(i, j)]
    }

    /// Triangles (two per grid quad), counter-clockwise in `(u, v)`.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::with_capacity(2 * (self.nu - 1) * (self.nv - 1));
        for i in 0..self.nu.saturating_sub(1) {
            for j in 0..self.nv.saturating_sub(1) {
                let a = self.index(i, j);
                let b = self.index(i + 1, j);
                let c = self.index(i + 1, j + 1);
                let d = self.index(i, j + 1);
                out.push([a, b, c]);
                out.push([a, c, d]);
            }
        }
        out
    }
}

const IMMERSION_EPS: f64 = 1e-12;

fn first_derivatives<T: Real, M: SurfaceMap<T> + ?Sized>(map: &M, u: T, v: T, h: T) -> (Vec3<T>, Vec3<T>) {
    let two_h = T::two() * h;
    let fu = (map.eval(u + h, v) - map.eval(u - h, v)) / two_h;
    let fv = (map.eval(u, v + h) - map.eval(u, v - h)) / two_h;
    (fu, fv)
}

/// Unit normal `f_u × f_v / |f_u × f_v|` by central differences.
pub fn unit_normal<T: Real, M: SurfaceMap<T> + ?Sized>(map: &M, u: T, v: T, h: T) -> Result<Vec3<T>> {
    let (fu, fv) = first_derivatives(map, u, v, h);
    let c = fu.cross(fv);
    let n = c.norm();
    if !(n >= T::lit(IMMERSION_EPS)) {
        return Err(Error::DegenerateImmersion { u: u.as_f64(), v: v.as_f64(), cross_norm: n.as_f64() });
    }
    Ok(c / n)
}

/// Samples `map` on the `nu × nv` tensor grid spanning its domain.
pub fn sample_mesh<T: Real, M: SurfaceMap<T> + ?Sized>(map: &M, nu: usize, nv: usize) -> Result<Mesh<T>> {
    if nu < 2 || nv < 2 {
        return Err(Error::InvalidParameter(format!("mesh needs nu, nv >= 2 (got {nu} x {nv})")));
    }
    let dom = map.domain();
    let finite = [dom.u.0, dom.u.1, dom.v.0, dom.v.1].iter().all(|x| x.is_finite());
    if !finite || dom.u.1 <= dom.u.0 || dom.v.1 <= dom.v.0 {
        return Err(Error::InvalidParameter("mesh domain must be a finite non-empty rectangle".into()));
    }
    let h = dom.default_step();
    let u_samples = linspace(dom.u.0, dom.u.1, nu);
    let v_samples = linspace(dom.v.0, dom.v.1, nv);
    let nodes: Vec<(T, T)> = u_samples
        .iter()
        .flat_map(|&u| v_samples.iter().map(move |&v| (u, v)))
        .collect();
    let evaluated: Result<Vec<(Vec3<T>, Vec3<T>)>> = nodes
        .par_iter()
        .map(|&(u, v)| Ok((map.eval(u, v), unit_normal(map, u, v, h)?)))
        .collect();
    let (vertices, normals) = evaluated?.into_iter().unzip();
    Ok(Mesh { nu, nv, u_samples, v_samples, vertices, normals })
}

/// Symmetric 2×2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sym2<T> {
    pub xx: T,
    pub xy: T,
    pub yy: T,
}

impl<T: Real> Sym2<T> {
    pub fn new(xx: T, xy: T, yy: T) -> Self {
        Self { xx, xy, yy }
    }

    pub fn det(&self) -> T {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn to_mat(self) -> Mat2<T> {
        Mat2::new(self.xx, self.xy, self.xy, self.yy)
    }
}

/// General 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Self { a, b, c, d }
    }

    pub fn diag(x: T, y: T) -> Self {
        Self::new(x, T::zero(), T::zero(), y)
    }

    /// Counter-clockwise rotation by `angle`.
    pub fn rotation(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c, -s, s, c)
    }

    pub fn trace(&self) -> T {
        self.a + self.d
    }

    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn apply(&self, x: (T, T)) -> (T, T) {
        (self.a * x.0 + self.b * x.1, self.c * x.0 + self.d * x.1)
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        Some(Self::new(self.d / det, -self.b / det, -self.c / det, self.a / det))
    }

    /// Frobenius norm of the antisymmetric part, `|b − c|`.
    pub fn asymmetry(&self) -> T {
        (self.b - self.c).abs()
    }
}

/// First and second fundamental forms at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormPair<T> {
    /// `(E, F, G)`.
    pub first: Sym2<T>,
    /// `(L, M, N)`.
    pub second: Sym2<T>,
}

/// Fundamental forms by second-order central differences with step `h`.
pub fn fundamental_forms<T: Real, M: SurfaceMap<T> + ?Sized>(map: &M, u: T, v: T, h: T) -> Result<FormPair<T>> {
    if !(h > T::zero()) {
        return Err(Error::InvalidParameter(format!("finite-difference step must be positive, got {h}")));
    }
    let margin = T::two() * h;
    if !map.domain().contains_with_margin(u, v, margin) {
        return Err(Error::OutsideDomain { u: u.as_f64(), v: v.as_f64(), margin: margin.as_f64() });
    }
    let f0 = map.eval(u, v);
    let fpu = map.eval(u + h, v);
    let fmu = map.eval(u - h, v);
    let fpv = map.eval(u, v + h);
    let fmv = map.eval(u, v - h);
    let fpp = map.eval(u + h, v + h);
    let fpm = map.eval(u + h, v - h);
    let fmp = map.eval(u - h, v + h);
    let fmm = map.eval(u - h, v - h);

    let two_h = T::two() * h;
    let h2 = h * h;
    let fu = (fpu - fmu) / two_h;
    let fv = (fpv - fmv) / two_h;
    let fuu = (fpu - f0 * T::two() + fmu) / h2;
    let fvv = (fpv - f0 * T::two() + fmv) / h2;
    let fuv = (fpp - fpm - fmp + fmm) / (T::lit(4.0) * h2);

    let cross = fu.cross(fv);
    let cn = cross.norm();
    if !(cn >= T::lit(IMMERSION_EPS)) {
        return Err(Error::DegenerateImmersion { u: u.as_f64(), v: v.as_f64(), cross_norm: cn.as_f64() });
    }
    let n = cross / cn;
    Ok(FormPair {
        first: Sym2::new(fu.dot(fu), fu.dot(fv), fv.dot(fv)),
        second: Sym2::new(-fuu.dot(n), -fuv.dot(n), -fvv.dot(n)),
    })
}

/// Shape operator `S = I⁻¹ · II` in the coordinate basis.
pub fn shape_from_forms<T: Real>(fp: &FormPair<T>) -> Result<Mat2<T>> {
    let det = fp.first.det();
    if !(det > T::zero()) || !(fp.first.xx > T::zero()) {
        return Err(Error::SingularMetric { det: det.as_f64() });
    }
    let inv = fp.first.to_mat().inverse().ok_or(Error::SingularMetric { det: det.as_f64() })?;
    Ok(inv.mul(&fp.second.to_mat()))
}

/// Principal curvatures and the angle of the `λ₁` direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalData<T> {
    pub lambda1: T,
    pub lambda2: T,
    /// Angle in `[0, π)` of the `λ₁` eigendirection in the orthonormal frame
    /// `(U, V)` obtained from `(∂u, ∂v)` by Gram–Schmidt; `None` at umbilics.
    pub theta: Option<T>,
}

impl<T: Real> PrincipalData<T> {
    pub fn mean(&self) -> T {
        self.lambda1 + self.lambda2
    }

    pub fn gauss(&self) -> T {
        self.lambda1 * self.lambda2
    }

    pub fn is_umbilic(&self) -> bool {
        self.theta.is_none()
    }
}

/// Scale-aware umbilic threshold `1e-6 × max(|λ₁|, |λ₂|, 1)`, above the noise of
/// the `h = 1e-4` difference stencils.
pub fn default_gap_tol<T: Real>(l1: T, l2: T) -> T {
    T::lit(1e-6) * l1.abs().max(l2.abs()).max(T::one())
}

/// The shape operator expressed in the `I`-orthonormal frame `(U, V)`.
///
/// `U = ∂u / √E`, `V` is `∂v` made `I`-orthogonal to `U` and normalized.
pub fn shape_in_orthonormal_frame<T: Real>(s: &Mat2<T>, fp: &FormPair<T>) -> Result<Sym2<T>> {
    let (e, f) = (fp.first.xx, fp.first.xy);
    let det = fp.first.det();
    if !(det > T::zero()) || !(e > T::zero()) {
        return Err(Error::SingularMetric { det: det.as_f64() });
    }
    let se = e.sqrt();
    let sv = (det / e).sqrt();
    // columns of P are U and V in coordinates
    let p = Mat2::new(T::one() / se, -f / (e * sv), T::zero(), T::one() / sv);
    let p_inv = p.inverse().ok_or(Error::SingularMetric { det: det.as_f64() })?;
    let m = p_inv.mul(s).mul(&p);
    Ok(Sym2::new(m.a, T::half() * (m.b + m.c), m.d))
}

/// Principal data from a shape operator `s` (coordinate basis) and its forms.
pub fn principal_data<T: Real>(s: &Mat2<T>, fp: &FormPair<T>, gap_tol: T) -> Result<PrincipalData<T>> {
    let on = shape_in_orthonormal_frame(s, fp)?;
    let mean = T::half() * (on.xx + on.yy);
    let half_diff = T::half() * (on.xx - on.yy);
    let radius = (half_diff * half_diff + on.xy * on.xy).sqrt();
    let lambda1 = mean + radius;
    let lambda2 = mean - radius;
    let theta = if lambda1 - lambda2 < gap_tol {
        None
    } else {
        Some(mod_pi(T::half() * (T::two() * on.xy).atan2(on.xx - on.yy)))
    };
    Ok(PrincipalData { lambda1, lambda2, theta })
}

/// Forms, shape operator and principal data at one point, default umbilic gap.
pub fn curvature_at<T: Real, M: SurfaceMap<T> + ?Sized>(
    map: &M,
    u: T,
    v: T,
    h: T,
) -> Result<(FormPair<T>, Mat2<T>, PrincipalData<T>)> {
    let fp = fundamental_forms(map, u, v, h)?;
    let s = shape_from_forms(&fp)?;
    let on = shape_in_orthonormal_frame(&s, &fp)?;
    let rough = on.xx.abs().max(on.yy.abs()).max(on.xy.abs());
    let pd = principal_data(&s, &fp, default_gap_tol(rough, rough))?;
    Ok((fp, s, pd))
}

/// Result of fitting a linear twist `α(v) = a·v` to sampled principal angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistFit<T> {
    /// Estimated twist rate.
    pub a_est: T,
    /// Largest deviation of the unwrapped angle from the fitted line.
    pub max_dev: T,
}

/// Largest unwrap step accepted between consecutive `v` samples.
const UNWRAP_LIMIT: f64 = std::f64::consts::FRAC_PI_4;

/// Least-squares twist rate from principal angles sampled on a grid.
///
/// Each `u` row is unwrapped modulo `π` along `v`, rows share one slope and
/// keep their own intercept. The twist increases when the `λ₁` direction
/// rotates clockwise, so `a_est` is minus the angular slope.
pub fn fit_twist<T: Real, M: SurfaceMap<T> + ?Sized>(
    map: &M,
    u_samples: &[T],
    v_samples: &[T],
    h: T,
) -> Result<TwistFit<T>> {
    if v_samples.len() < 2 || u_samples.is_empty() {
        return Err(Error::InvalidParameter("twist fit needs at least one u and two v samples".into()));
    }
    let raw: Result<Vec<Vec<T>>> = u_samples
        .par_iter()
        .map(|&u| {
            v_samples
                .iter()
                .map(|&v| {
                    let (_, _, pd) = curvature_at(map, u, v, h)?;
                    pd.theta.ok_or(Error::UmbilicSample { u: u.as_f64(), v: v.as_f64() })
                })
                .collect()
        })
        .collect();
    fit_twist_from_angles(v_samples, &raw?)
}

/// The fit behind [`fit_twist`] for principal angles already in hand;
/// `angles[i][j]` belongs to `v_samples[j]` on row `i`.
pub fn fit_twist_from_angles<T: Real>(v_samples: &[T], angles: &[Vec<T>]) -> Result<TwistFit<T>> {
    if v_samples.len() < 2 || angles.is_empty() || angles.iter().any(|r| r.len() != v_samples.len()) {
        return Err(Error::InvalidParameter("twist fit needs rows of angles matching at least two v samples".into()));
    }
    let mut rows = Vec::with_capacity(angles.len());
    for raw in angles {
        let mut row: Vec<T> = Vec::with_capacity(raw.len());
        for (k, &theta) in raw.iter().enumerate() {
            match row.last() {
                None => row.push(theta),
                Some(&prev) => {
                    let jump = wrap_half_pi(theta - prev);
                    if jump.abs() > T::lit(UNWRAP_LIMIT) {
                        return Err(Error::UnwrapAmbiguity {
                            v0: v_samples[k - 1].as_f64(),
                            v1: v_samples[k].as_f64(),
                            jump: jump.as_f64(),
                        });
                    }
                    row.push(prev + jump);
                }
            }
        }
        rows.push(row);
    }

    let n = T::from_count(v_samples.len());
    let v_mean = v_samples.iter().copied().sum::<T>() / n;
    let sxx: T = v_samples.iter().map(|&v| (v - v_mean) * (v - v_mean)).sum();
    let mut sxy = T::zero();
    let mut row_means = Vec::with_capacity(rows.len());
    for row in &rows {
        let t_mean = row.iter().copied().sum::<T>() / n;
        row_means.push(t_mean);
        for (&v, &t) in v_samples.iter().zip(row) {
            sxy = sxy + (v - v_mean) * (t - t_mean);
        }
    }
    let slope = sxy / (sxx * T::from_count(rows.len()));
    let mut max_dev = T::zero();
    for (row, &t_mean) in rows.iter().zip(&row_means) {
        for (&v, &t) in v_samples.iter().zip(row) {
            let fit = t_mean + slope * (v - v_mean);
            max_dev = max_dev.max((t - fit).abs());
        }
    }
    Ok(TwistFit { a_est: -slope, max_dev })
}
