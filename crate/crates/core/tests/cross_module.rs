use std::f64::consts::TAU;

use isor_core::cmc::{hopf, hopf_from_shape, solve_rho, FrameState, RhoProblem, TransportPath, TransportedSurface};
use isor_core::geometry::{curvature_at, fundamental_forms, shape_from_forms, shape_in_orthonormal_frame};
use isor_core::intrinsic::{MetricProfile, Scaled};
use isor_core::minimal::{classic_enneper_point, minimal_point, MinimalParams, MinimalSurface};
use isor_core::revolve::{build_revolve, min_admissible_c};
use isor_core::scalar::linspace;
use isor_core::{Complex64, Domain, Vec3};
use nalgebra::Matrix2;

fn reference_cmc() -> RhoProblem<f64> {
    RhoProblem::new(0.5, 1.0, 4.2625, 2.0, 2.0)
}

#[test]
fn frame_transport_is_path_independent() {
    let sol = solve_rho(&reference_cmc(), (-1.0, 1.0), 1e-10).unwrap();
    let domain = Domain::new((-1.0, 1.0), (0.0, TAU));
    let init = FrameState::standard(Vec3::zero());
    let uv = TransportedSurface::new(sol.intrinsic(), 0.0, init, domain).steps(800);
    let vu = TransportedSurface::new(sol.intrinsic(), 0.0, init, domain).steps(800).path(TransportPath::VThenU);
    for (u, v) in [(0.7, 1.3), (-0.8, 5.0), (0.3, 3.0)] {
        let (a, b) = (uv.frame(u, v), vu.frame(u, v));
        assert!((a.position - b.position).norm() < 1e-6, "position gap at ({u}, {v})");
        assert!((a.normal - b.normal).norm() < 1e-6, "normal gap at ({u}, {v})");
    }
}

#[test]
fn hopf_differential_of_the_shape_is_holomorphic() {
    let data = MinimalParams::new(0.8, 1.3, 2.0).unwrap().intrinsic_data();
    let omega = |u: f64, v: f64| hopf_from_shape(data.profile.rho(u), &data.shape_in_frame(u, v));
    let h = 1e-5;
    for (u, v) in [(0.1, 0.4), (-0.6, 2.5), (0.9, -1.0)] {
        let target = hopf(1.0, 0.8, Complex64::new(u, v));
        assert!((omega(u, v) - target).norm() < 1e-12 * target.norm().max(1.0));
        // Cauchy–Riemann: ∂Ω/∂v = i ∂Ω/∂u
        let du = (omega(u + h, v) - omega(u - h, v)) / (2.0 * h);
        let dv = (omega(u, v + h) - omega(u, v - h)) / (2.0 * h);
        assert!((dv - Complex64::i() * du).norm() < 1e-6 * du.norm().max(1.0));
    }
}

#[test]
fn hopf_differential_measured_on_a_cmc_surface() {
    let p = reference_cmc();
    let sol = solve_rho(&p, (-1.0, 1.0), 1e-10).unwrap();
    let map = TransportedSurface::new(sol.intrinsic(), 0.0, FrameState::standard(Vec3::zero()), Domain::new((-1.0, 1.0), (-1.0, 7.0)));
    for (u, v) in [(0.2, 0.5), (-0.5, 2.0)] {
        let fp = fundamental_forms(&map, u, v, 1e-4).unwrap();
        let s = shape_in_orthonormal_frame(&shape_from_forms(&fp).unwrap(), &fp).unwrap();
        let measured = hopf_from_shape(fp.first.xx.sqrt(), &s);
        let target = hopf(p.codazzi, p.twist, Complex64::new(u, v));
        assert!((measured - target).norm() < 1e-4 * target.norm(), "({u}, {v}): {measured} vs {target}");
    }
}

#[test]
fn classic_enneper_is_a_rotated_family_member() {
    let p = MinimalParams::new(1.0, 1.0, 1.0).unwrap();
    for u in linspace(-1.0, 1.0, 7) {
        for v in linspace(0.0, TAU, 9) {
            let m = minimal_point(&p, u, v);
            let c = classic_enneper_point(u, v);
            assert!((Vec3::new(m.x, -m.y, -m.z) - c).norm() < 1e-12 * c.norm().max(1.0));
        }
    }
}

#[test]
fn revolved_enneper_metric_is_isometric_to_enneper() {
    // same ρ, different immersion: revolve at c = 4 and the classical surface
    let p = MinimalParams::new(1.0, 1.0, 1.0).unwrap();
    let range = (-1.0, 1.0);
    let c = 4.0;
    assert!(min_admissible_c(&p, range) < c);
    let rev = build_revolve(p, c, range, 32).unwrap().surface((0.0, TAU / c));
    let enn = MinimalSurface::new(p, Domain::new(range, (0.0, TAU)));
    for u in [-0.7, 0.0, 0.6] {
        for v in [0.3, 1.0] {
            let a = fundamental_forms(&rev, u, v, 1e-4).unwrap().first;
            let b = fundamental_forms(&enn, u, v, 1e-4).unwrap().first;
            let e = p.rho(u).powi(2);
            for (x, y) in [(a.xx, b.xx), (a.xy, b.xy), (a.yy, b.yy)] {
                assert!((x - y).abs() < 1e-6 * e, "u={u} v={v}");
            }
        }
    }
}

#[test]
fn min_admissible_c_grows_with_the_interval() {
    let profile = Scaled { inner: MinimalParams::new(1.0, 1.0, 1.0).unwrap(), factor: 0.5 };
    let mut last = 0.0_f64;
    for half in [0.25, 0.5, 1.0, 2.0, 5.0] {
        let c = min_admissible_c(&profile, (-half, half));
        assert!(c >= last - 1e-12, "{c} < {last}");
        last = c;
    }
    assert!((last - 3.0).abs() < 1e-3);
}

#[test]
fn single_precision_pipeline() {
    let p = MinimalParams::<f32>::new(1.5, 0.7, 2.0).unwrap();
    let q = MinimalParams::<f64>::new(1.5, 0.7, 2.0).unwrap();
    for (u, v) in [(0.2_f32, 0.4_f32), (-0.5, 2.0)] {
        let a = minimal_point(&p, u, v);
        let b = minimal_point(&q, u as f64, v as f64);
        let gap = Vec3::new(a.x as f64, a.y as f64, a.z as f64) - b;
        assert!(gap.norm() < 1e-5 * b.norm().max(1.0));
    }
    let map = MinimalSurface::new(p, Domain::new((-1.0, 1.0), (0.0, 6.0)));
    let (fp, _, pd) = curvature_at(&map, 0.1, 1.0, 1e-2).unwrap();
    let e = p.rho(0.1).powi(2);
    assert!((fp.first.xx - e).abs() / e < 1e-2);
    assert!((pd.lambda1 + pd.lambda2).abs() < 1e-2 * pd.lambda1.abs());
}

#[test]
fn principal_curvatures_agree_with_a_dense_eigensolver() {
    let p = MinimalParams::new(0.9, 1.4, 1.6).unwrap();
    let map = MinimalSurface::new(p, Domain::new((-1.0, 1.0), (0.0, TAU)));
    for (u, v) in [(0.3, 0.2), (-0.4, 4.0)] {
        let (fp, s, pd) = curvature_at(&map, u, v, 1e-4).unwrap();
        let m = Matrix2::new(s.a, s.b, s.c, s.d);
        let mut eig: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.re).collect();
        eig.sort_by(|x, y| y.partial_cmp(x).unwrap());
        assert!((eig[0] - pd.lambda1).abs() < 1e-9 * eig[0].abs().max(1.0));
        assert!((eig[1] - pd.lambda2).abs() < 1e-9 * eig[0].abs().max(1.0));
        let e = fp.first.xx;
        assert!((m.determinant() - pd.gauss()).abs() < 1e-8 * pd.gauss().abs().max(1.0 / e));
    }
}

#[test]
fn w_chart_data_gives_the_half_turned_surface() {
    // G(w) = −wᴮ/A and dh = w^{−2a−1}/B dw under w = e^{−z}
    use isor_core::minimal::weierstrass_integrate;
    use isor_core::quadrature::GaussLegendre;
    let p = MinimalParams::new(0.7, 1.3, 1.5).unwrap();
    let (z0, z1) = (Complex64::new(0.1, 0.2), Complex64::new(-0.3, 0.9));
    let (w0, w1) = ((-z0).exp(), (-z1).exp());
    let phi = |w: Complex64| {
        let g = -(w.ln() * p.gauss_degree).exp() / p.gauss_scale;
        let dh = (w.ln() * (-2.0 * p.twist - 1.0)).exp() / p.gauss_degree;
        [(1.0 / g - g) * dh * 0.5, Complex64::i() * 0.5 * (1.0 / g + g) * dh, dh]
    };
    let gl = GaussLegendre::<f64>::new(8);
    let comp = |k: usize| gl.integrate(|t| (phi(w0 + (w1 - w0) * t)[k] * (w1 - w0)).re, 0.0, 1.0, 32);
    let via_w = Vec3::new(comp(0), comp(1), comp(2));
    let via_z = weierstrass_integrate(&p, z0, z1, 32);
    assert!((via_w - Vec3::new(-via_z.x, -via_z.y, via_z.z)).norm() < 1e-12, "{via_w:?} vs {via_z:?}");
}
