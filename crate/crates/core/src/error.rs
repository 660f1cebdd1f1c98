use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate immersion at (u, v) = ({u}, {v}): |f_u x f_v| = {cross_norm:e}")]
    DegenerateImmersion { u: f64, v: f64, cross_norm: f64 },

    #[error("sample (u, v) = ({u}, {v}) is closer than 2h = {margin:e} to the domain boundary")]
    OutsideDomain { u: f64, v: f64, margin: f64 },

    #[error("first fundamental form is singular (det = {det:e})")]
    SingularMetric { det: f64 },

    #[error("umbilic sample at (u, v) = ({u}, {v}): principal direction undefined")]
    UmbilicSample { u: f64, v: f64 },

    #[error("principal angle unwrap is ambiguous between v = {v0} and v = {v1} (jump {jump} rad)")]
    UnwrapAmbiguity { v0: f64, v1: f64, jump: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("the b = 0 case is a plane and has no twisted minimal realization")]
    PlanarCase,

    #[error("unknown preset {0:?} (expected enneper, planar-enneper or translation-invariant)")]
    UnknownPreset(String),

    #[error("initial conformal factor must be positive, got {0}")]
    NonPositiveInitialRho(f64),

    #[error("radicand negative: c^2 rho^2 - rho'^2 = {radicand:e} <= 0 at u = {u} (speed-up c = {c} inadmissible)")]
    RadicandNegative { u: f64, c: f64, radicand: f64 },

    #[error("conformal-factor integration blew up at u = {u}; solution only covers [{lo}, {hi}]")]
    BlowUp { u: f64, lo: f64, hi: f64 },

    #[error("integration step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
}
