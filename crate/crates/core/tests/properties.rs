use asymnet::camc::field_at_rho;
use asymnet::conormal::propagate_default;
use asymnet::generators::{minimal_from_polylines, perturb_polylines, planar_polylines, standard_pair};
use asymnet::io::NetDocument;
use asymnet::quadric::{canonicalize_pair, eval_standard, permute_parameter, Permutation};
use asymnet::{AsymptoticNet, CanonicalPair, Edge, GridDomain, Quad, QuadricPatch, Vec3};
use nalgebra::Matrix3;
use proptest::prelude::*;

fn vec3(range: std::ops::Range<f64>) -> impl Strategy<Value = Vec3> {
    (range.clone(), range.clone(), range).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn orientation_preserving() -> impl Strategy<Value = Matrix3<f64>> {
    prop::array::uniform9(-1.0..1.0f64).prop_filter_map("well-conditioned", |e| {
        let m = Matrix3::identity() + Matrix3::from_row_slice(&e) * 0.5;
        (m.determinant() > 0.2).then_some(m)
    })
}

fn standard_corners() -> [Vec3; 4] {
    [Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::new(1.0, 1.0, 1.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_coordinates_are_affine_invariant(
        x1 in -2.0..-0.1f64, y1 in -1.0..1.0f64, x2 in -2.0..-0.1f64, y2 in 0.2..2.0f64,
        m in orientation_preserving(), t in vec3(-3.0..3.0),
    ) {
        let net = standard_pair(x1, y1, x2, y2).unwrap();
        let moved = net.map_affine(&m, &t);
        let edge = Edge::Vertical { i: 1, j: 0 };
        let p = canonicalize_pair(&moved, edge, 1e-9).unwrap();
        prop_assert!((p.x1 - x1).abs() < 1e-9);
        prop_assert!((p.y1 - y1).abs() < 1e-9);
        prop_assert!((p.x2 - x2).abs() < 1e-9);
        prop_assert!((p.y2 - y2).abs() < 1e-9);
    }

    #[test]
    fn standard_interpolator_hits_corners(a in -0.95..10.0f64) {
        let corners = standard_corners();
        for (k, (u, v)) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)].into_iter().enumerate() {
            prop_assert!((eval_standard(a, u, v).unwrap() - corners[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn permuted_patch_is_the_same_quadric(a in -0.9..5.0f64, k in 0usize..4) {
        let perm = Permutation::ALL[k];
        let patch = QuadricPatch::new(standard_corners(), a).unwrap();
        let permuted = patch.permuted(perm).unwrap();
        prop_assert!((permuted.parameter() - permute_parameter(a, perm)).abs() < 1e-12 * (1.0 + a.abs()));
        prop_assert!(patch.homogeneous().distance(&permuted.homogeneous()) < 1e-12);
    }

    #[test]
    fn compatible_partner_closes_the_relation(
        x1 in -2.0..-0.1f64, y1 in -1.0..1.0f64, x2 in -2.0..-0.1f64, y2 in 0.2..2.0f64, a in -0.8..3.0f64,
    ) {
        let pair = CanonicalPair::from_coordinates(x1, y1, x2, y2).unwrap();
        let b_bar = pair.compatible_b_bar(a);
        prop_assert!(b_bar > -1.0);
        prop_assert!(pair.compatibility_defect(a, b_bar) < 1e-14);
    }

    #[test]
    fn black_white_rescale_keeps_lelieuvre(seed in 0u64..1000, log_rho in -1.0..1.0f64) {
        let (alpha, beta) = planar_polylines(3, 3);
        let (alpha, beta) = perturb_polylines(&alpha, &beta, 0.3, seed);
        let Ok((net, _)) = minimal_from_polylines(&alpha, &beta, Vec3::zeros()) else {
            return Ok(());
        };
        let base = propagate_default(&net, 1e-9).unwrap();
        let rho = log_rho.exp();
        let scaled = base.black_white_rescale(rho).unwrap();
        prop_assert!(scaled.lelieuvre_residual(&net) < 1e-9);
        prop_assert!(scaled.moutard_angle() < 1e-8);
        for q in net.domain().quads() {
            let expected = base.lambda(q) * rho.powi(-q.parity());
            prop_assert!((scaled.lambda(q) - expected).abs() < 1e-12 * expected);
            prop_assert!((scaled.compute_lambda(q, 1e-8).unwrap() - expected).abs() < 1e-9 * expected);
        }
        let field = field_at_rho(&net, rho).unwrap();
        prop_assert!(field.max_edge_residual() < 1e-8);
    }

    #[test]
    fn document_round_trip_is_exact(points in prop::collection::vec(vec3(-1e6..1e6), 6)) {
        let net = AsymptoticNet::new(GridDomain::new(2, 1).unwrap(), points).unwrap();
        let doc = NetDocument::from_net(&net).with_meta("note", "random");
        let back = NetDocument::parse(&doc.to_string()).unwrap();
        prop_assert_eq!(back.to_net().unwrap(), net);
        prop_assert_eq!(back.meta("note"), Some("random"));
    }

    #[test]
    fn quad_parity_alternates(i in 0usize..50, j in 0usize..50) {
        prop_assert_eq!(Quad::new(i, j).parity(), -Quad::new(i + 1, j).parity());
        prop_assert_eq!(Quad::new(i, j).parity(), -Quad::new(i, j + 1).parity());
    }
}
