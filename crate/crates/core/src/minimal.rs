//! The twisted minimal family (`H = 0`, `b = 1`).
//!
//! Every positive solution of `ρ'² − ρρ'' = −e^{4au}` has the form
//! `ρ(u) = e^{2au}/(2B) · (A e^{Bu} + e^{−Bu}/A)` with `A, B > 0`. The
//! corresponding surfaces are available three ways: the closed-form
//! immersion, the Weierstrass integral with `G = e^{−Bz}/A`,
//! `dh = −e^{2az}/B dz`, and the Björling formula anchored on the planar
//! curve `v = 0`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::{Domain, SurfaceMap};
use crate::intrinsic::{IntrinsicData, MetricProfile};
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Relative gap below which `B` is treated as equal to `2a`.
pub const RESONANCE_TOL: f64 = 1e-9;

/// Default number of Gauss–Legendre nodes per panel for the path integrals.
pub const DEFAULT_RULE_POINTS: usize = 8;

/// Parameters `(a, A, B)` of the minimal family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimalParams<T> {
    /// Twist rate `a`.
    pub twist: T,
    /// Gauss-map scale `A`.
    pub gauss_scale: T,
    /// Gauss-map exponent `B`.
    pub gauss_degree: T,
}

impl<T: Real> MinimalParams<T> {
    pub fn new(twist: T, gauss_scale: T, gauss_degree: T) -> Result<Self> {
        let ok = |x: T| x.is_finite() && x > T::zero();
        if !(ok(twist) && ok(gauss_scale) && ok(gauss_degree)) {
            return Err(Error::InvalidParameter(format!(
                "minimal family needs a, A, B > 0 (got a = {twist}, A = {gauss_scale}, B = {gauss_degree})"
            )));
        }
        Ok(Self { twist, gauss_scale, gauss_degree })
    }

    /// Normalizes `H = 0` initial data `(ρ(u₀), ρ'(u₀))` with Codazzi constant
    /// `b ≠ 0` to `b = 1` and recovers `(A, B)`.
    ///
    /// Returns the parameters together with the factor `|b|` such that the
    /// original profile is `|b| · ρ_minimal`.
    pub fn from_initial_data(twist: T, codazzi: T, rho0: T, drho0: T, u0: T) -> Result<(Self, T)> {
        if codazzi == T::zero() {
            return Err(Error::PlanarCase);
        }
        let scale = codazzi.abs();
        Ok((recover_ab(rho0 / scale, drho0 / scale, u0, twist)?, scale))
    }

    /// `B = 2a` within [`RESONANCE_TOL`] (relative).
    pub fn is_resonant(&self) -> bool {
        let two_a = T::two() * self.twist;
        (self.gauss_degree - two_a).abs() < T::lit(RESONANCE_TOL) * self.gauss_degree.max(two_a)
    }

    /// Intrinsic data `(ρ, H = 0, a, b = 1)`.
    pub fn intrinsic_data(&self) -> IntrinsicData<T, Self> {
        IntrinsicData::new(*self, T::zero(), self.twist, T::one())
    }

    fn c(x: T) -> Complex<T> {
        Complex::new(x, T::zero())
    }

    /// Gauss map `G(z) = e^{−Bz}/A`.
    pub fn gauss_map(&self, z: Complex<T>) -> Complex<T> {
        (-z * self.gauss_degree).exp() / self.gauss_scale
    }

    /// Height differential density `dh/dz = −e^{2az}/B`.
    pub fn height_density(&self, z: Complex<T>) -> Complex<T> {
        -(z * (T::two() * self.twist)).exp() / self.gauss_degree
    }

    /// Weierstrass integrand `(½(1/G − G), i/2 (1/G + G), 1) · dh/dz`.
    pub fn weierstrass_integrand(&self, z: Complex<T>) -> [Complex<T>; 3] {
        let g = self.gauss_map(z);
        let ginv = (z * self.gauss_degree).exp() * self.gauss_scale;
        let dh = self.height_density(z);
        let half = T::half();
        [
            (ginv - g) * dh * half,
            Complex::new(T::zero(), half) * (ginv + g) * dh,
            dh,
        ]
    }

    /// Holomorphic extension of the profile curve `c̃(z)`.
    pub fn profile_curve_complex(&self, z: Complex<T>) -> [Complex<T>; 3] {
        let (a, aa, bb) = (self.twist, self.gauss_scale, self.gauss_degree);
        let two_a = T::two() * a;
        let zero = Self::c(T::zero());
        if self.is_resonant() {
            let e2 = (z * two_a).exp();
            let pre = -e2 / (T::lit(4.0) * a * a);
            [
                pre * e2 * (T::lit(0.25) * aa) + z / (T::lit(4.0) * a * aa),
                zero,
                pre,
            ]
        } else {
            let pre = -(z * two_a).exp() / (T::two() * bb);
            let ebz = (z * bb).exp();
            let x = ebz * aa / (bb + two_a) + ebz.inv() / (aa * (bb - two_a));
            [pre * x, zero, pre / a]
        }
    }

    /// Holomorphic extension of `c̃'(z) = −e^{2az}/(2B) · (A e^{Bz} − e^{−Bz}/A, 0, 2)`.
    pub fn profile_tangent_complex(&self, z: Complex<T>) -> [Complex<T>; 3] {
        let (a, aa, bb) = (self.twist, self.gauss_scale, self.gauss_degree);
        let pre = -(z * (T::two() * a)).exp() / (T::two() * bb);
        let ebz = (z * bb).exp();
        [pre * (ebz * aa - ebz.inv() / aa), Self::c(T::zero()), pre * T::two()]
    }

    /// Holomorphic extension of the frame normal `Ñ(z)`.
    pub fn frame_normal_complex(&self, z: Complex<T>) -> [Complex<T>; 3] {
        let aa = self.gauss_scale;
        let t = (z * self.gauss_degree).exp() * aa;
        let t2 = t * t;
        let den = t2 + T::one();
        [t * T::two() / den, Self::c(T::zero()), (-t2 + T::one()) / den]
    }
}

impl<T: Real> MetricProfile<T> for MinimalParams<T> {
    fn rho(&self, u: T) -> T {
        rho_minimal(self, u)
    }

    fn drho(&self, u: T) -> T {
        let (a, aa, bb) = (self.twist, self.gauss_scale, self.gauss_degree);
        let two_a = T::two() * a;
        (two_a * u).exp() / (T::two() * bb)
            * ((two_a + bb) * aa * (bb * u).exp() + (two_a - bb) * (-bb * u).exp() / aa)
    }

    fn ddrho(&self, u: T) -> T {
        let (a, aa, bb) = (self.twist, self.gauss_scale, self.gauss_degree);
        let two_a = T::two() * a;
        let p = two_a + bb;
        let m = two_a - bb;
        (two_a * u).exp() / (T::two() * bb) * (p * p * aa * (bb * u).exp() + m * m * (-bb * u).exp() / aa)
    }
}

/// `ρ(u) = e^{2au}/(2B) · (A e^{Bu} + e^{−Bu}/A)`.
pub fn rho_minimal<T: Real>(p: &MinimalParams<T>, u: T) -> T {
    let (a, aa, bb) = (p.twist, p.gauss_scale, p.gauss_degree);
    (T::two() * a * u).exp() / (T::two() * bb) * (aa * (bb * u).exp() + (-bb * u).exp() / aa)
}

/// Recovers `(A, B)` from `(σ(u), σ'(u))` of a positive solution with twist `a`.
///
/// `B = √(e^{4au} + (σ' − 2aσ)²)/σ` and `A = e^{−(2a+B)u}(σ' − 2aσ + Bσ)`.
/// The second form agrees with the larger root
/// `A = e^{−Bu}(B e^{−2au} σ + √(B² e^{−4au} σ² − 1))` whenever `σ' ≥ 2aσ`
/// and stays correct when `A e^{Bu} < 1`.
pub fn recover_ab<T: Real>(sigma: T, dsigma: T, u: T, a: T) -> Result<MinimalParams<T>> {
    if !(sigma > T::zero()) {
        return Err(Error::InvalidParameter(format!("conformal factor must be positive, got {sigma}")));
    }
    let e4 = (T::lit(4.0) * a * u).exp();
    let shifted = dsigma - T::two() * a * sigma;
    let b_sigma = (e4 + shifted * shifted).sqrt();
    let degree = b_sigma / sigma;
    let radicand = degree * degree * sigma * sigma / e4 - T::one();
    debug_assert!(radicand > -T::lit(1e-9), "radicand {radicand} must be nonnegative");
    let scale = (-(T::two() * a + degree) * u).exp() * (shifted + b_sigma);
    MinimalParams::new(a, scale, degree)
}

/// Closed-form immersion of the minimal family.
pub fn minimal_point<T: Real>(p: &MinimalParams<T>, u: T, v: T) -> Vec3<T> {
    let (a, aa, bb) = (p.twist, p.gauss_scale, p.gauss_degree);
    let two_a = T::two() * a;
    if p.is_resonant() {
        let four_a = T::lit(4.0) * a;
        let e4 = (four_a * u).exp();
        let (s4, c4) = (four_a * v).sin_cos();
        let quarter = T::lit(0.25);
        Vec3::new(
            a * u / aa - quarter * aa * e4 * c4,
            a * v / aa + quarter * aa * e4 * s4,
            -(two_a * u).exp() * (two_a * v).cos(),
        ) / (four_a * a)
    } else {
        let pre = (two_a * u).exp() / (T::two() * bb);
        let em = (-bb * u).exp() / (two_a * aa - aa * bb);
        let ep = aa * (bb * u).exp() / (two_a + bb);
        let (sm, cm) = ((two_a - bb) * v).sin_cos();
        let (sp, cp) = ((two_a + bb) * v).sin_cos();
        Vec3::new(em * cm - ep * cp, em * sm + ep * sp, -(two_a * v).cos() / a) * pre
    }
}

/// Translation `f(u, v + π/a) − f(u, v) = (0, π/(4a²A), 0)` in the `B = 2a`
/// case; `None` otherwise.
pub fn period_vector<T: Real>(p: &MinimalParams<T>) -> Option<Vec3<T>> {
    p.is_resonant().then(|| {
        let a = p.twist;
        Vec3::new(T::zero(), T::PI() / (T::lit(4.0) * a * a * p.gauss_scale), T::zero())
    })
}

/// Orthonormal moving frame along a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame<T> {
    /// Image of `U = ∂u/ρ`.
    pub e_u: Vec3<T>,
    /// Image of `V = ∂v/ρ`.
    pub e_v: Vec3<T>,
    /// `e_u × e_v`.
    pub normal: Vec3<T>,
}

/// Closed-form frame along `v = 0`, normalized so that `e_u → (1, 0, 0)` and
/// `normal → (0, 0, 1)` as `s → −∞`.
pub fn frame_closed_form<T: Real>(p: &MinimalParams<T>, s: T) -> Frame<T> {
    let t = p.gauss_scale * (p.gauss_degree * s).exp();
    let den = T::one() + t * t;
    Frame {
        e_u: Vec3::new(T::one() - t * t, T::zero(), -T::two() * t) / den,
        e_v: Vec3::unit_y(),
        normal: Vec3::new(T::two() * t, T::zero(), T::one() - t * t) / den,
    }
}

fn real_part<T: Real>(z: [Complex<T>; 3]) -> Vec3<T> {
    Vec3::new(z[0].re, z[1].re, z[2].re)
}

/// The planar curve `c̃(s) = f(s, 0)`.
pub fn profile_curve<T: Real>(p: &MinimalParams<T>, s: T) -> Vec3<T> {
    real_part(p.profile_curve_complex(Complex::new(s, T::zero())))
}

/// `c̃'(s) = ρ(s) · e_u(s)`.
pub fn profile_tangent<T: Real>(p: &MinimalParams<T>, s: T) -> Vec3<T> {
    real_part(p.profile_tangent_complex(Complex::new(s, T::zero())))
}

/// Unit normal obtained by inverse stereographic projection of the Gauss map
/// value `g`: `(2 Re g, 2 Im g, |g|² − 1)/(|g|² + 1)`.
pub fn stereographic_normal<T: Real>(g: Complex<T>) -> Vec3<T> {
    let m = g.norm_sqr();
    Vec3::new(T::two() * g.re, T::two() * g.im, m - T::one()) / (m + T::one())
}

/// `Re ∫_{z0}^{z} Φ(w) dw` along the straight segment, with `n_steps` panels
/// of the default Gauss–Legendre rule.
pub fn weierstrass_integrate<T: Real>(p: &MinimalParams<T>, z0: Complex<T>, z: Complex<T>, n_steps: usize) -> Vec3<T> {
    weierstrass_integrate_with(p, z0, z, n_steps, &GaussLegendre::new(DEFAULT_RULE_POINTS))
}

pub fn weierstrass_integrate_with<T: Real>(
    p: &MinimalParams<T>,
    z0: Complex<T>,
    z: Complex<T>,
    n_steps: usize,
    rule: &GaussLegendre<T>,
) -> Vec3<T> {
    real_part(rule.integrate_segment(|w| p.weierstrass_integrand(w), z0, z, n_steps))
}

/// Björling representation
/// `f(z) = Re(c̃(z) − i ∫_u^z Ñ(w) × c̃'(w) dw)`, integrated from the real
/// point `u` straight up to `z = u + iv`.
pub fn bjorling_point<T: Real>(p: &MinimalParams<T>, u: T, v: T, n_steps: usize) -> Vec3<T> {
    bjorling_point_with(p, u, v, n_steps, &GaussLegendre::new(DEFAULT_RULE_POINTS))
}

pub fn bjorling_point_with<T: Real>(
    p: &MinimalParams<T>,
    u: T,
    v: T,
    n_steps: usize,
    rule: &GaussLegendre<T>,
) -> Vec3<T> {
    let z0 = Complex::new(u, T::zero());
    let z = Complex::new(u, v);
    let curve = real_part(p.profile_curve_complex(z));
    if v == T::zero() {
        return curve;
    }
    let integrand = |w: Complex<T>| {
        let n = p.frame_normal_complex(w);
        let t = p.profile_tangent_complex(w);
        [
            n[1] * t[2] - n[2] * t[1],
            n[2] * t[0] - n[0] * t[2],
            n[0] * t[1] - n[1] * t[0],
        ]
    };
    let integral = rule.integrate_segment(integrand, z0, z, n_steps);
    let minus_i = Complex::new(T::zero(), -T::one());
    curve + real_part(integral.map(|c| c * minus_i))
}

/// Minimal-family immersion on a parameter rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimalSurface<T> {
    pub params: MinimalParams<T>,
    pub domain: Domain<T>,
}

impl<T: Real> MinimalSurface<T> {
    pub fn new(params: MinimalParams<T>, domain: Domain<T>) -> Self {
        Self { params, domain }
    }
}

impl<T: Real> SurfaceMap<T> for MinimalSurface<T> {
    fn eval(&self, u: T, v: T) -> Vec3<T> {
        minimal_point(&self.params, u, v)
    }
    fn domain(&self) -> Domain<T> {
        self.domain
    }
}

/// The classical Enneper surface in conformal polar coordinates,
/// `f = e^u/6 · (3 cos v − e^{2u} cos 3v, −3 sin v − e^{2u} sin 3v, 3 e^u cos 2v)`.
///
/// It is the `a = A = B = 1` member of the family composed with the rotation
/// `(x, y, z) ↦ (x, −y, −z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicEnneper<T> {
    pub domain: Domain<T>,
}

pub fn classic_enneper_point<T: Real>(u: T, v: T) -> Vec3<T> {
    let e = u.exp();
    let e2 = e * e;
    let three = T::lit(3.0);
    Vec3::new(
        three * v.cos() - e2 * (three * v).cos(),
        -three * v.sin() - e2 * (three * v).sin(),
        three * e * (T::two() * v).cos(),
    ) * (e / T::lit(6.0))
}

impl<T: Real> SurfaceMap<T> for ClassicEnneper<T> {
    fn eval(&self, u: T, v: T) -> Vec3<T> {
        classic_enneper_point(u, v)
    }
    fn domain(&self) -> Domain<T> {
        self.domain
    }
}

/// Named members of the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Enneper surface with cyclic symmetry of order `n + 1`: `B = n`, `a = (n+1)/2`.
    Enneper,
    /// Planar Enneper surface of order `n`: `B = n + 1`, `a = n/2`.
    PlanarEnneper,
    /// Translation-invariant surface `B = 1`, `a = 1/2`.
    TranslationInvariant,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Enneper, Preset::PlanarEnneper, Preset::TranslationInvariant];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Enneper => "enneper",
            Preset::PlanarEnneper => "planar-enneper",
            Preset::TranslationInvariant => "translation-invariant",
        }
    }

    pub fn params<T: Real>(self, n: u32) -> Result<MinimalParams<T>> {
        if n < 1 && self != Preset::TranslationInvariant {
            return Err(Error::InvalidParameter(format!("preset {} needs order n >= 1", self.name())));
        }
        let nf = T::from_u32(n).expect("order representable");
        let one = T::one();
        match self {
            Preset::Enneper => MinimalParams::new((nf + one) * T::half(), one, nf),
            Preset::PlanarEnneper => MinimalParams::new(nf * T::half(), one, nf + one),
            Preset::TranslationInvariant => MinimalParams::new(T::half(), one, one),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// Looks up a preset by name.
pub fn preset<T: Real>(name: &str, n: u32) -> Result<MinimalParams<T>> {
    name.parse::<Preset>()?.params(n)
}
