use std::f64::consts::TAU;

use isor_core::geometry::{curvature_at, fundamental_forms};
use isor_core::intrinsic::{ExpProfile, IntrinsicData, MetricProfile};
use isor_core::minimal::{minimal_point, recover_ab, MinimalParams, MinimalSurface};
use isor_core::scalar::mod_pi;
use isor_core::{Domain, SurfaceMap};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = MinimalParams<f64>> {
    (0.3..3.0f64, 0.3..3.0f64, 0.3..3.0f64).prop_map(|(a, s, d)| MinimalParams::new(a, s, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn minimal_family_is_conformal_and_minimal(p in params(), u in -0.8..0.8f64, v in -3.0..3.0f64) {
        let map = MinimalSurface::new(p, Domain::new((-1.0, 1.0), (-TAU, TAU)));
        let (fp, _, pd) = curvature_at(&map, u, v, 1e-4).unwrap();
        let e0 = p.rho(u).powi(2);
        prop_assert!((fp.first.xx - e0).abs() / e0 < 1e-6);
        prop_assert!((fp.first.yy - e0).abs() / e0 < 1e-6);
        prop_assert!(fp.first.xy.abs() / e0 < 1e-6);
        let scale = pd.lambda1.abs().max(1.0);
        prop_assert!((pd.lambda1 + pd.lambda2).abs() / scale < 1e-5);
    }

    #[test]
    fn principal_direction_rotates_with_the_twist(p in params(), u in -0.5..0.5f64, v in 0.0..1.0f64) {
        // compare θ at v and v + δ: the λ₁ direction turns by −aδ
        let map = MinimalSurface::new(p, Domain::new((-1.0, 1.0), (-TAU, TAU)));
        let delta = 0.05;
        let (_, _, p0) = curvature_at(&map, u, v, 1e-4).unwrap();
        let (_, _, p1) = curvature_at(&map, u, v + delta, 1e-4).unwrap();
        let turned = mod_pi(p1.theta.unwrap() - p0.theta.unwrap() + p.twist * delta);
        prop_assert!(turned.min(std::f64::consts::PI - turned) < 1e-5);
    }

    #[test]
    fn master_residual_is_gauss_residual_times_minus_rho4(
        scale in 0.2..3.0f64, rate in -1.5..1.5f64, h in -2.0..2.0f64, a in 0.1..2.0f64, b in 0.1..3.0f64, u in -1.0..1.0f64
    ) {
        // arbitrary (non-solution) data: the two residuals still agree
        let data = IntrinsicData::new(ExpProfile::new(scale, rate), h, a, b);
        let rho = data.profile.rho(u);
        let lhs = data.master_ode_residual(u);
        let rhs = -data.gauss_residual(u) * rho.powi(4);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1e-300) + 1e-13);
    }

    #[test]
    fn recover_ab_inverts_rho(p in params(), u in -1.0..1.0f64) {
        let q = recover_ab(p.rho(u), p.drho(u), u, p.twist).unwrap();
        prop_assert!((q.gauss_scale - p.gauss_scale).abs() / p.gauss_scale < 1e-10);
        prop_assert!((q.gauss_degree - p.gauss_degree).abs() / p.gauss_degree < 1e-10);
    }

    #[test]
    fn minimal_data_satisfies_the_structure_equations(p in params(), u in -1.0..1.0f64, v in -3.0..3.0f64) {
        let data = p.intrinsic_data();
        let scale = (4.0 * p.twist * u).exp().max(1.0);
        prop_assert!(data.master_ode_residual(u).abs() / scale < 1e-10);
        let (r1, r2) = data.codazzi_residuals(u, v);
        let (l1, _) = data.lambda_pair(u);
        prop_assert!(r1.abs() < 1e-9 * l1.abs().max(1.0));
        prop_assert!(r2.abs() < 1e-9 * l1.abs().max(1.0));
    }

    #[test]
    fn oracle_is_invariant_under_rigid_motion(p in params(), u in -0.5..0.5f64, v in -2.0..2.0f64, t in -3.0..3.0f64) {
        let base = MinimalSurface::new(p, Domain::new((-1.0, 1.0), (-TAU, TAU)));
        let (s, c) = t.sin_cos();
        let moved = isor_core::geometry::FnSurface::new(base.domain(), move |u, v| {
            let x = minimal_point(&p, u, v);
            isor_core::Vec3::new(c * x.x - s * x.y + 1.0, s * x.x + c * x.y - 2.0, x.z + 0.5)
        });
        let f0 = fundamental_forms(&base, u, v, 1e-4).unwrap();
        let f1 = fundamental_forms(&moved, u, v, 1e-4).unwrap();
        let tol = 1e-6 * f0.first.xx.max(1.0);
        prop_assert!((f0.first.xx - f1.first.xx).abs() < tol);
        prop_assert!((f0.second.xy - f1.second.xy).abs() < tol);
        prop_assert!((f0.second.xx - f1.second.xx).abs() < tol);
    }
}
