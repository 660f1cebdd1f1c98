//! Intrinsic data `(ρ, H, a, b)` and the residuals of the structure
//! equations it must satisfy.
//!
//! The first fundamental form is `ρ(u)²(du² + dv²)` and the shape operator,
//! written in the orthonormal frame `U = ∂u/ρ`, `V = ∂v/ρ`, is
//! `S = R(−a v) · diag(λ₁, λ₂) · R(a v)` with principal curvatures
//! `λ₁,₂ = H/2 ± b e^{2au}/ρ²`.

use crate::geometry::Sym2;
use crate::scalar::Real;

/// Conformal factor `ρ(u) > 0` together with its first two derivatives.
pub trait MetricProfile<T: Real>: Sync {
    fn rho(&self, u: T) -> T;
    fn drho(&self, u: T) -> T;
    fn ddrho(&self, u: T) -> T;

    /// Interval on which the profile is defined.
    fn interval(&self) -> (T, T) {
        (T::neg_infinity(), T::infinity())
    }
}

impl<T: Real, P: MetricProfile<T> + ?Sized> MetricProfile<T> for &P {
    fn rho(&self, u: T) -> T {
        (**self).rho(u)
    }
    fn drho(&self, u: T) -> T {
        (**self).drho(u)
    }
    fn ddrho(&self, u: T) -> T {
        (**self).ddrho(u)
    }
    fn interval(&self) -> (T, T) {
        (**self).interval()
    }
}

/// `ρ(u) = scale · e^{rate·u}`; covers constant profiles (`rate = 0`) and the
/// cylinder solution `√(2b/H)·e^{au}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpProfile<T> {
    pub scale: T,
    pub rate: T,
}

impl<T: Real> ExpProfile<T> {
    pub fn new(scale: T, rate: T) -> Self {
        Self { scale, rate }
    }

    pub fn constant(value: T) -> Self {
        Self::new(value, T::zero())
    }

    /// The explicit constant-mean-curvature solution `ρ = √(2b/H)·e^{au}`.
    pub fn cylinder(mean_curvature: T, twist: T, codazzi: T) -> Self {
        Self::new((T::two() * codazzi / mean_curvature).sqrt(), twist)
    }
}

impl<T: Real> MetricProfile<T> for ExpProfile<T> {
    fn rho(&self, u: T) -> T {
        self.scale * (self.rate * u).exp()
    }
    fn drho(&self, u: T) -> T {
        self.rate * self.rho(u)
    }
    fn ddrho(&self, u: T) -> T {
        self.rate * self.rate * self.rho(u)
    }
}

/// A profile multiplied by a constant factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled<P, T> {
    pub inner: P,
    pub factor: T,
}

impl<T: Real, P: MetricProfile<T>> MetricProfile<T> for Scaled<P, T> {
    fn rho(&self, u: T) -> T {
        self.factor * self.inner.rho(u)
    }
    fn drho(&self, u: T) -> T {
        self.factor * self.inner.drho(u)
    }
    fn ddrho(&self, u: T) -> T {
        self.factor * self.inner.ddrho(u)
    }
    fn interval(&self) -> (T, T) {
        self.inner.interval()
    }
}

/// Profile given by three closures `(ρ, ρ', ρ'')`.
pub struct FnProfile<F0, F1, F2> {
    rho: F0,
    drho: F1,
    ddrho: F2,
}

impl<F0, F1, F2> FnProfile<F0, F1, F2> {
    pub fn new(rho: F0, drho: F1, ddrho: F2) -> Self {
        Self { rho, drho, ddrho }
    }
}

impl<T, F0, F1, F2> MetricProfile<T> for FnProfile<F0, F1, F2>
where
    T: Real,
    F0: Fn(T) -> T + Sync,
    F1: Fn(T) -> T + Sync,
    F2: Fn(T) -> T + Sync,
{
    fn rho(&self, u: T) -> T {
        (self.rho)(u)
    }
    fn drho(&self, u: T) -> T {
        (self.drho)(u)
    }
    fn ddrho(&self, u: T) -> T {
        (self.ddrho)(u)
    }
}

/// Gauss-equation defect `λ₁λ₂ − (ρ'² − ρρ'')/ρ⁴` for raw values.
pub fn gauss_defect<T: Real>(lambda1: T, lambda2: T, rho: T, drho: T, ddrho: T) -> T {
    let rho2 = rho * rho;
    lambda1 * lambda2 - (drho * drho - rho * ddrho) / (rho2 * rho2)
}

/// Intrinsic data of a surface with linear twist `α(v) = a·v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntrinsicData<T, P> {
    pub profile: P,
    /// Mean curvature `H = λ₁ + λ₂` (sum convention).
    pub mean_curvature: T,
    /// Twist rate `a`.
    pub twist: T,
    /// Codazzi integration constant `b`.
    pub codazzi: T,
}

impl<T: Real, P: MetricProfile<T>> IntrinsicData<T, P> {
    pub fn new(profile: P, mean_curvature: T, twist: T, codazzi: T) -> Self {
        Self { profile, mean_curvature, twist, codazzi }
    }

    /// `b·e^{2au}/ρ²`, half the principal-curvature gap.
    fn half_gap(&self, u: T) -> T {
        let rho = self.profile.rho(u);
        self.codazzi * (T::two() * self.twist * u).exp() / (rho * rho)
    }

    /// `μ(u) = ρ²(λ₁ − H/2)`, which equals `b·e^{2au}` on every solution.
    pub fn mu(&self, u: T) -> T {
        self.codazzi * (T::two() * self.twist * u).exp()
    }

    /// Principal curvatures `(λ₁, λ₂) = H/2 ± b e^{2au}/ρ²`.
    pub fn lambda_pair(&self, u: T) -> (T, T) {
        let half_h = T::half() * self.mean_curvature;
        let gap = self.half_gap(u);
        (half_h + gap, half_h - gap)
    }

    /// `(λ₁', λ₂')` by differentiating the closed form.
    pub fn lambda_derivatives(&self, u: T) -> (T, T) {
        let rho = self.profile.rho(u);
        let drho = self.profile.drho(u);
        let a = self.twist;
        let d1 = T::two() * self.codazzi * (T::two() * a * u).exp() * (a * rho - drho) / (rho * rho * rho);
        (d1, -d1)
    }

    /// Twist angle `α(v) = a·v`.
    pub fn twist_angle(&self, v: T) -> T {
        self.twist * v
    }

    /// Shape operator in the orthonormal frame `(U, V)`:
    /// `R(−av) · diag(λ₁, λ₂) · R(av)`.
    pub fn shape_in_frame(&self, u: T, v: T) -> Sym2<T> {
        let (l1, l2) = self.lambda_pair(u);
        let (s, c) = self.twist_angle(v).sin_cos();
        Sym2::new(l1 * c * c + l2 * s * s, (l2 - l1) * s * c, l1 * s * s + l2 * c * c)
    }

    /// Gauss-equation residual `λ₁λ₂ − (ρ'² − ρρ'')/ρ⁴`.
    pub fn gauss_residual(&self, u: T) -> T {
        let (l1, l2) = self.lambda_pair(u);
        gauss_defect(l1, l2, self.profile.rho(u), self.profile.drho(u), self.profile.ddrho(u))
    }

    /// Codazzi residuals `(r₁, r₂)`:
    ///
    /// * `r₁ = (λ₁' + λ₂') sin(av) cos(av)`
    /// * `r₂ = (λ₁ − λ₂)(ρ' − aρ)/ρ + λ₁' sin²(av) − λ₂' cos²(av)`
    pub fn codazzi_residuals(&self, u: T, v: T) -> (T, T) {
        let (l1, l2) = self.lambda_pair(u);
        let (d1, d2) = self.lambda_derivatives(u);
        let rho = self.profile.rho(u);
        let drho = self.profile.drho(u);
        let (s, c) = self.twist_angle(v).sin_cos();
        let r1 = (d1 + d2) * s * c;
        let r2 = (l1 - l2) * (drho - rho * self.twist) / rho - (-d1 * s * s + d2 * c * c);
        (r1, r2)
    }

    /// Residual of `ρ'² − ρρ'' = ¼H²ρ⁴ − b²e^{4au}` (left minus right).
    pub fn master_ode_residual(&self, u: T) -> T {
        let rho = self.profile.rho(u);
        let drho = self.profile.drho(u);
        let ddrho = self.profile.ddrho(u);
        let h = self.mean_curvature;
        let rho2 = rho * rho;
        let rhs = T::lit(0.25) * h * h * rho2 * rho2
            - self.codazzi * self.codazzi * (T::lit(4.0) * self.twist * u).exp();
        drho * drho - rho * ddrho - rhs
    }
}
