//! Construction and numerical verification of intrinsic surfaces of
//! revolution: surfaces with conformal metric `ρ(u)²(du² + dv²)` whose
//! principal directions rotate at a constant rate in `v`.
//!
//! The crate covers
//!
//! * [`geometry`]: a finite-difference curvature oracle for any parametrized surface;
//! * [`intrinsic`]: the intrinsic data `(ρ, H, a, b)` and its structure-equation residuals;
//! * [`minimal`]: the closed-form twisted minimal family, its Weierstrass and
//!   Björling representations;
//! * [`cmc`]: numerical constant-mean-curvature surfaces by ODE and moving-frame integration;
//! * [`revolve`]: untwisted data realized as honest surfaces of revolution.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the scalar to `f64`.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cmc;
pub mod error;
pub mod geometry;
pub mod intrinsic;
pub mod minimal;
pub mod ode;
pub mod quadrature;
pub mod revolve;
pub mod scalar;
pub mod vec3;

pub use error::{Error, Result};
pub use geometry::{Domain, FormPair, Mat2, Mesh, PrincipalData, SurfaceMap, Sym2, TwistFit};
pub use intrinsic::{IntrinsicData, MetricProfile};
pub use scalar::Real;
pub use vec3::Vec3;

pub type Point = Vec3<f64>;
pub type Mesh64 = Mesh<f64>;
pub type Domain64 = Domain<f64>;
pub type FormPair64 = FormPair<f64>;
pub type PrincipalData64 = PrincipalData<f64>;
pub type MinimalParams64 = minimal::MinimalParams<f64>;
pub type OdeSolution64 = cmc::OdeSolution<f64>;
pub type FrameState64 = cmc::FrameState<f64>;
pub type Complex64 = num_complex::Complex<f64>;
