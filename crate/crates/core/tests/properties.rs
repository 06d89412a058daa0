use proptest::prelude::*;

use qcurves::curve::{
    reparametrize_by_arclength, synthesize_on, CurvatureSpec, CurveKind, CurveSpec, Dimension, ScalarFn,
};
use qcurves::frenet::{curvature_profile, FrameConfig};
use qcurves::mannheim::{mannheim_lambda_3d, CorrespondenceMap};
use qcurves::quat::{cross4, det4, h_form, quat_conj, quat_mul, quat_norm, Quaternion};

fn quaternion() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-10.0f64..10.0).prop_map(Quaternion::from_array)
}

fn spatial() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform3(-10.0f64..10.0).prop_map(|v| Quaternion::new(v[0], v[1], v[2], 0.0))
}

fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
    (a - b).max_abs_component() <= tol * (1.0 + a.max_abs_component().max(b.max_abs_component()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn conjugation_is_an_involutory_antiautomorphism(p in quaternion(), q in quaternion()) {
        prop_assert_eq!(quat_conj(quat_conj(p)), p);
        prop_assert!(close(quat_conj(quat_mul(p, q)), quat_mul(quat_conj(q), quat_conj(p)), 1e-12));
    }

    #[test]
    fn product_is_associative(p in quaternion(), q in quaternion(), r in quaternion()) {
        prop_assert!(close(quat_mul(quat_mul(p, q), r), quat_mul(p, quat_mul(q, r)), 1e-12));
    }

    #[test]
    fn h_form_is_the_euclidean_product(p in quaternion(), q in quaternion()) {
        let euclid: f64 = p.to_array().iter().zip(q.to_array()).map(|(a, b)| a * b).sum();
        prop_assert!((h_form(p, q) - euclid).abs() <= 1e-12 * (1.0 + euclid.abs()));
        prop_assert_eq!(h_form(p, q), h_form(q, p));
    }

    #[test]
    fn norm_is_multiplicative(p in quaternion(), q in quaternion()) {
        let lhs = quat_norm(quat_mul(p, q));
        prop_assert!((lhs - quat_norm(p) * quat_norm(q)).abs() <= 1e-12 * (1.0 + lhs));
    }

    #[test]
    fn spatial_product_splits_into_dot_and_cross(p in spatial(), q in spatial()) {
        let pq = quat_mul(p, q);
        let cross = p.vector_part().cross(q.vector_part()).to_quaternion();
        prop_assert!((pq.d + h_form(p, q)).abs() <= 1e-12 * (1.0 + pq.d.abs()));
        prop_assert!(close(pq.vector_part().to_quaternion(), cross, 1e-12));
    }

    #[test]
    fn cross4_is_orthogonal_to_its_factors(u in quaternion(), v in quaternion(), w in quaternion()) {
        let x = cross4(u, v, w);
        let scale = 1.0 + quat_norm(u) * quat_norm(v) * quat_norm(w);
        for f in [u, v, w] {
            prop_assert!(h_form(x, f).abs() <= 1e-10 * scale * (1.0 + quat_norm(f)));
        }
        prop_assert!((det4([u, v, w, x]) - h_form(x, x)).abs() <= 1e-9 * scale * scale);
    }

    #[test]
    fn correspondence_rejects_any_non_increasing_row(mut s in prop::collection::vec(0.0f64..100.0, 2..30), k in 0usize..29) {
        s.sort_by(f64::total_cmp);
        s.dedup();
        prop_assume!(s.len() >= 2);
        let k = 1 + k % (s.len() - 1);
        let mut rows: Vec<(f64, f64)> = s.iter().map(|v| (*v, 2.0 * v)).collect();
        prop_assert!(CorrespondenceMap::new(rows.clone()).is_ok());
        rows[k].1 = rows[k - 1].1;
        prop_assert!(CorrespondenceMap::new(rows).is_err());
    }
}

/// Rotation taking the standard basis to `R e_i`.
fn rotation(yaw: f64, pitch: f64) -> impl Fn(Quaternion) -> Quaternion {
    move |q: Quaternion| {
        let (cy, sy) = (yaw.cos(), yaw.sin());
        let (cp, sp) = (pitch.cos(), pitch.sin());
        let (a, b) = (cy * q.a - sy * q.b, sy * q.a + cy * q.b);
        Quaternion::new(a, cp * b - sp * q.c, sp * b + cp * q.c, q.d)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn synthesis_is_frame_equivariant(yaw in -3.0f64..3.0, pitch in -3.0f64..3.0, k in 0.2f64..1.0, r in -0.5f64..0.5) {
        let profile = CurvatureSpec::E3 { curvature: ScalarFn::Constant(k), torsion: ScalarFn::Affine { offset: r, slope: 0.05 } };
        let seed: Vec<Quaternion> = (0..3).map(Quaternion::basis).collect();
        let rot = rotation(yaw, pitch);
        let turned: Vec<Quaternion> = seed.iter().map(|v| rot(*v)).collect();
        let a = synthesize_on(&profile, &seed, (0.0, 5.0), 501).unwrap();
        let b = synthesize_on(&profile, &turned, (0.0, 5.0), 501).unwrap();
        for (p, q) in a.curve.points().iter().zip(b.curve.points()) {
            prop_assert!((rot(*p) - *q).norm() <= 1e-8);
        }
    }

    #[test]
    fn helix_lambda_scales_linearly(c in 0.2f64..5.0) {
        let spec = CurveSpec::new(Dimension::Three, CurveKind::Helix3 { a: 2.0 * c, b: c }, (0.0, 6.0), 101).unwrap();
        let curve = reparametrize_by_arclength(&spec, 401).unwrap();
        let e = mannheim_lambda_3d(&curvature_profile(&curve, &FrameConfig::default()).unwrap(), 1e-8).unwrap();
        prop_assert!((e.lambda - 2.0 * c).abs() <= 1e-9 * c);
    }
}

/// Fourth-order convergence of the integrator, measured where its error is above
/// round-off: constant curvatures, coarse steps, one fixed stencil spacing.
#[test]
fn integrator_converges_at_fourth_order() {
    let profile = CurvatureSpec::E4 {
        curvature: ScalarFn::Constant(0.4),
        torsion: ScalarFn::Constant(0.2),
        bitorsion: ScalarFn::Constant(0.3),
    };
    let seed: Vec<Quaternion> = (0..4).map(Quaternion::basis).collect();
    let mut cfg = FrameConfig::default();
    cfg.differentiation.target_spacing = 0.2;
    let error = |ds: f64| {
        let n = (20.0 / ds).round() as usize + 1;
        let curve = synthesize_on(&profile, &seed, (0.0, 20.0), n).unwrap().curve;
        let p = curvature_profile(&curve, &cfg).unwrap();
        let b = p.bitorsion.clone().unwrap();
        (0..p.len())
            .map(|j| (p.curvature[j] - 0.4).abs().max((p.torsion[j] - 0.2).abs()).max((b[j] - 0.3).abs()))
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (error(0.2), error(0.1));
    assert!(e1 / e2 >= 8.0, "{e1:e} -> {e2:e}");
}
