//! Untwisted data (`α ≡ 0`) realized as surfaces of revolution
//! `f(u, v) = (g(u) cos cv, g(u) sin cv, h(u))`.
//!
//! For a speed-up constant `c` with `c²ρ² − ρ'² > 0`, the principal
//! curvatures are
//! `λ₁ = (ρρ'' − ρ'²)/(ρ²√(c²ρ² − ρ'²))` and `λ₂ = −√(c²ρ² − ρ'²)/ρ²`,
//! and the meridian is `g = ρ/c`, `h' = √(c²ρ² − ρ'²)/c`.

use crate::error::{Error, Result};
use crate::geometry::{Domain, SurfaceMap};
use crate::intrinsic::{gauss_defect, MetricProfile};
use crate::quadrature::GaussLegendre;
use crate::scalar::{linspace, Real};
use crate::vec3::Vec3;

/// Gauss–Legendre nodes per quadrature panel.
pub const RULE_POINTS: usize = 8;

/// Samples used by [`min_admissible_c`] before refinement.
pub const ADMISSIBLE_SAMPLES: usize = 4001;

/// `c²ρ² − ρ'²`.
pub fn radicand<T: Real, P: MetricProfile<T>>(profile: &P, c: T, u: T) -> T {
    let rho = profile.rho(u);
    let drho = profile.drho(u);
    c * c * rho * rho - drho * drho
}

fn checked_root<T: Real, P: MetricProfile<T>>(profile: &P, c: T, u: T) -> Result<T> {
    let r = radicand(profile, c, u);
    if r > T::zero() {
        Ok(r.sqrt())
    } else {
        Err(Error::RadicandNegative { u: u.as_f64(), c: c.as_f64(), radicand: r.as_f64() })
    }
}

/// Principal curvatures `(λ₁, λ₂)` of the untwisted realization with speed-up `c`.
pub fn untwisted_lambdas<T: Real, P: MetricProfile<T>>(profile: &P, c: T, u: T) -> Result<(T, T)> {
    let root = checked_root(profile, c, u)?;
    let rho = profile.rho(u);
    let drho = profile.drho(u);
    let rho2 = rho * rho;
    let l1 = (rho * profile.ddrho(u) - drho * drho) / (rho2 * root);
    Ok((l1, -root / rho2))
}

/// `λ₂'` from the closed form, using `(c²ρ² − ρ'²)' = 2ρ'(c²ρ − ρ'')`.
pub fn untwisted_lambda2_derivative<T: Real, P: MetricProfile<T>>(profile: &P, c: T, u: T) -> Result<T> {
    let root = checked_root(profile, c, u)?;
    let rho = profile.rho(u);
    let drho = profile.drho(u);
    let dr = T::two() * drho * (c * c * rho - profile.ddrho(u));
    Ok(-dr / (T::two() * root * rho * rho) + T::two() * root * drho / (rho * rho * rho))
}

/// Gauss residual `λ₁λ₂ − (ρ'² − ρρ'')/ρ⁴`.
pub fn untwisted_gauss_residual<T: Real, P: MetricProfile<T>>(profile: &P, c: T, u: T) -> Result<T> {
    let (l1, l2) = untwisted_lambdas(profile, c, u)?;
    Ok(gauss_defect(l1, l2, profile.rho(u), profile.drho(u), profile.ddrho(u)))
}

/// Codazzi residual `(ρ'/ρ)(λ₁ − λ₂) − λ₂'`.
pub fn untwisted_codazzi_residual<T: Real, P: MetricProfile<T>>(profile: &P, c: T, u: T) -> Result<T> {
    let (l1, l2) = untwisted_lambdas(profile, c, u)?;
    let d2 = untwisted_lambda2_derivative(profile, c, u)?;
    Ok(profile.drho(u) / profile.rho(u) * (l1 - l2) - d2)
}

/// Smallest speed-up `c` with `cρ ≥ |ρ'|` on `u_range`, i.e. the supremum of
/// `|ρ'|/ρ`, by dense sampling and golden-section refinement around the best
/// sample. Every `c` strictly above the returned value is admissible.
pub fn min_admissible_c<T: Real, P: MetricProfile<T>>(profile: &P, u_range: (T, T)) -> T {
    let ratio = |u: T| (profile.drho(u) / profile.rho(u)).abs();
    let (lo, hi) = (u_range.0.min(u_range.1), u_range.0.max(u_range.1));
    if lo == hi {
        return ratio(lo);
    }
    let samples = linspace(lo, hi, ADMISSIBLE_SAMPLES);
    let (best, _) = samples
        .iter()
        .enumerate()
        .map(|(i, &u)| (i, ratio(u)))
        .fold((0, T::neg_infinity()), |acc, x| if x.1 > acc.1 { x } else { acc });
    let mut a = samples[best.saturating_sub(1)];
    let mut b = samples[(best + 1).min(samples.len() - 1)];
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let mut x1 = b - (b - a) * inv_phi;
    let mut x2 = a + (b - a) * inv_phi;
    let (mut f1, mut f2) = (ratio(x1), ratio(x2));
    for _ in 0..200 {
        if (b - a).abs() <= T::epsilon() * (T::one() + a.abs().max(b.abs())) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + (b - a) * inv_phi;
            f2 = ratio(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - (b - a) * inv_phi;
            f1 = ratio(x1);
        }
    }
    [ratio(samples[best]), f1, f2, ratio(lo), ratio(hi)]
        .into_iter()
        .fold(T::neg_infinity(), T::max)
}

/// Meridian `(g, h)` of the realization, with `h(u₁) = 0`.
#[derive(Debug, Clone)]
pub struct RevolveProfile<T, P> {
    pub profile: P,
    pub c: T,
    pub u_range: (T, T),
    edges: Vec<T>,
    prefix: Vec<T>,
    rule: GaussLegendre<T>,
}

/// Builds the meridian with `n_quad` composite Gauss–Legendre panels.
///
/// Fails with [`Error::RadicandNegative`] at the first panel edge or node
/// where `c²ρ² − ρ'² ≤ 0`.
pub fn build_revolve<T: Real, P: MetricProfile<T>>(
    profile: P,
    c: T,
    u_range: (T, T),
    n_quad: usize,
) -> Result<RevolveProfile<T, P>> {
    if !(c > T::zero()) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("speed-up c must be positive, got {c}")));
    }
    if !(u_range.0 < u_range.1) || !u_range.0.is_finite() || !u_range.1.is_finite() {
        return Err(Error::InvalidParameter("u range must be finite with lo < hi".into()));
    }
    let n_quad = n_quad.max(1);
    let rule = GaussLegendre::new(RULE_POINTS);
    let edges = linspace(u_range.0, u_range.1, n_quad + 1);
    for w in edges.windows(2) {
        checked_root(&profile, c, w[0])?;
        let (mid, half) = ((w[0] + w[1]) * T::half(), (w[1] - w[0]) * T::half());
        for &x in rule.nodes() {
            checked_root(&profile, c, mid + half * x)?;
        }
    }
    checked_root(&profile, c, u_range.1)?;
    let mut prefix = Vec::with_capacity(edges.len());
    prefix.push(T::zero());
    for w in edges.windows(2) {
        let seg = rule.integrate(|u| radicand(&profile, c, u).max(T::zero()).sqrt() / c, w[0], w[1], 1);
        prefix.push(prefix[prefix.len() - 1] + seg);
    }
    Ok(RevolveProfile { profile, c, u_range, edges, prefix, rule })
}

impl<T: Real, P: MetricProfile<T>> RevolveProfile<T, P> {
    pub fn panels(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn g(&self, u: T) -> T {
        self.profile.rho(u) / self.c
    }

    pub fn dg(&self, u: T) -> T {
        self.profile.drho(u) / self.c
    }

    /// `h' = √(c²ρ² − ρ'²)/c`, clamped at zero outside the admissible set.
    pub fn dh(&self, u: T) -> T {
        radicand(&self.profile, self.c, u).max(T::zero()).sqrt() / self.c
    }

    /// `h(u) = ∫_{u₁}^{u} h'`: the prefix sum up to the panel containing `u`
    /// plus one Gauss–Legendre pass over the partial panel.
    pub fn h(&self, u: T) -> T {
        let n = self.edges.len();
        let k = self.edges.partition_point(|&e| e <= u).clamp(1, n - 1) - 1;
        let start = self.edges[k];
        if u == start {
            return self.prefix[k];
        }
        self.prefix[k] + self.rule.integrate(|s| self.dh(s), start, u, 1)
    }

    pub fn lambdas(&self, u: T) -> Result<(T, T)> {
        untwisted_lambdas(&self.profile, self.c, u)
    }

    pub fn surface(self, v_range: (T, T)) -> RevolveSurface<T, P> {
        let domain = Domain::new(self.u_range, v_range);
        RevolveSurface { meridian: self, domain }
    }
}

/// `(g(u) cos cv, g(u) sin cv, h(u))`.
pub fn revolve_point<T: Real, P: MetricProfile<T>>(rp: &RevolveProfile<T, P>, u: T, v: T) -> Vec3<T> {
    let g = rp.g(u);
    let (s, c) = (rp.c * v).sin_cos();
    Vec3::new(g * c, g * s, rp.h(u))
}

#[derive(Debug, Clone)]
pub struct RevolveSurface<T, P> {
    pub meridian: RevolveProfile<T, P>,
    pub domain: Domain<T>,
}

impl<T: Real, P: MetricProfile<T>> SurfaceMap<T> for RevolveSurface<T, P> {
    fn eval(&self, u: T, v: T) -> Vec3<T> {
        revolve_point(&self.meridian, u, v)
    }
    fn domain(&self) -> Domain<T> {
        self.domain
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intrinsic::{ExpProfile, FnProfile};

    fn quarter_enneper() -> FnProfile<impl Fn(f64) -> f64, impl Fn(f64) -> f64, impl Fn(f64) -> f64> {
        FnProfile::new(
            |u: f64| 0.25 * (u.exp() + (3.0 * u).exp()),
            |u: f64| 0.25 * (u.exp() + 3.0 * (3.0 * u).exp()),
            |u: f64| 0.25 * (u.exp() + 9.0 * (3.0 * u).exp()),
        )
    }

    #[test]
    fn enneper_lambda2_at_origin() {
        let (_, l2) = untwisted_lambdas(&quarter_enneper(), 3.0, 0.0).unwrap();
        assert!((l2 + 2.0 * 5.0_f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn unit_cylinder() {
        let p = ExpProfile::constant(1.0);
        assert_eq!(radicand(&p, 1.0, 0.3), 1.0);
        let (l1, l2) = untwisted_lambdas(&p, 1.0, 0.3).unwrap();
        assert_eq!((l1, l2), (0.0, -1.0));
        assert_eq!(untwisted_gauss_residual(&p, 1.0, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn c_equal_one_is_rejected_everywhere() {
        for u in [-3.0, -1.0, 0.0, 0.5, 2.0] {
            let err = untwisted_lambdas(&quarter_enneper(), 1.0, u).unwrap_err();
            assert!(matches!(err, Error::RadicandNegative { .. }));
            assert!(err.to_string().contains("radicand negative"));
        }
        assert!(build_revolve(quarter_enneper(), 1.0, (-1.0, 1.0), 16).is_err());
    }

    #[test]
    fn admissible_c_simple_profiles() {
        assert_eq!(min_admissible_c(&ExpProfile::constant(2.0), (-1.0, 1.0)), 0.0);
        assert!((min_admissible_c(&ExpProfile::new(1.0_f64, 1.7), (-1.0, 1.0)) - 1.7).abs() < 1e-14);
        let c = min_admissible_c(&quarter_enneper(), (-5.0, 5.0));
        assert!(c < 3.0 && c > 3.0 - 1e-3, "{c}");
    }

    #[test]
    fn interior_maximum_is_refined() {
        // |ρ'|/ρ = |sin u| peaks at π/2
        let p = FnProfile::new(|u: f64| (-u.cos()).exp(), |u: f64| u.sin() * (-u.cos()).exp(), |u: f64| {
            (u.cos() + u.sin().powi(2)) * (-u.cos()).exp()
        });
        let c = min_admissible_c(&p, (0.0, 3.0));
        assert!((c - 1.0).abs() < 1e-12, "{c}");
    }

    #[test]
    fn meridian_closed_forms() {
        let rp = build_revolve(quarter_enneper(), 3.0, (-1.0, 1.0), 32).unwrap();
        let h_closed = |u: f64| {
            (2.0 * 3.0_f64.sqrt() * ((1.5_f64).sqrt() * u.exp()).asinh() + 3.0 * u.exp() * (2.0 + 3.0 * (2.0 * u).exp()).sqrt())
                / 36.0
        };
        for u in linspace(-1.0_f64, 1.0, 41) {
            let g_closed = (2.0 * u).exp() * ((-u).exp() + u.exp()) / 12.0;
            assert!((rp.g(u) - g_closed).abs() < 1e-14);
            assert!((rp.h(u) - (h_closed(u) - h_closed(-1.0))).abs() < 1e-12);
            assert!((rp.dg(u).powi(2) + rp.dh(u).powi(2) - quarter_enneper().rho(u).powi(2)).abs() < 1e-12);
        }
    }
}
