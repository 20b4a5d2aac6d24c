//! Property tests for the structural invariants of each module.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use xvariety::charts::{from_chart_i, involution_j, to_chart_i, to_chart_j, ProjectiveZ};
use xvariety::heisenberg::{dilate, inv, inversion, kc_distance, rotate, star, translate, BoundaryPoint};
use xvariety::hermitian::{apply, heis_matrix, normalize_quadruple, HeisenbergGenerator};
use xvariety::invariants::{cartan_quad, triple_cross_ratios};
use xvariety::involution::Similarity;
use xvariety::reconstruction::{coordinate_gap, roundtrip_residual, variety_to_quadruple};
use xvariety::variety::{self, involution_t, VarietyPoint};
use xvariety::{angle_gap, json, wrap_angle, Quadruple};

fn coord() -> impl Strategy<Value = f64> {
    -3.0..3.0f64
}

fn point() -> impl Strategy<Value = BoundaryPoint> {
    (coord(), coord(), coord()).prop_map(|(x, y, t)| BoundaryPoint::from_parts(x, y, t))
}

/// `(p1, infinity, o, p4)` with well separated points.
fn quadruple() -> impl Strategy<Value = Quadruple> {
    (point(), point())
        .prop_map(|(p1, p4)| [p1, BoundaryPoint::Infinity, BoundaryPoint::ORIGIN, p4])
        .prop_filter("separated", |q| {
            (0..4).all(|i| (i + 1..4).all(|j| kc_distance(&q[i], &q[j]) > 1e-2))
        })
}

fn variety_point() -> impl Strategy<Value = VarietyPoint> {
    quadruple().prop_filter_map("regular cross-ratios", |q| {
        VarietyPoint::from_cross_ratios(&triple_cross_ratios(&q).ok()?).ok()
    })
}

fn xstar_point() -> impl Strategy<Value = VarietyPoint> {
    variety_point().prop_filter("Im X3 away from zero", |v| v.z3().im.abs() > 1e-2)
}

fn generator() -> impl Strategy<Value = HeisenbergGenerator> {
    prop_oneof![
        (coord(), coord(), coord()).prop_map(|(x, y, s)| HeisenbergGenerator::Translation {
            w: Complex64::new(x, y),
            s
        }),
        (-PI..PI).prop_map(|angle| HeisenbergGenerator::Rotation { angle }),
        (0.5..2.0f64).prop_map(|scale| HeisenbergGenerator::Dilation { scale }),
        Just(HeisenbergGenerator::Inversion),
    ]
}

fn close(a: &BoundaryPoint, b: &BoundaryPoint, tol: f64) -> bool {
    coordinate_gap(a, b) <= tol * (1.0 + a.coords().map_or(0.0, |(z, t)| z.norm() + t.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn group_law_is_associative_with_inverses(p in point(), q in point(), r in point()) {
        let left = star(&star(&p, &q).unwrap(), &r).unwrap();
        let right = star(&p, &star(&q, &r).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-13));
        let e = star(&p, &inv(&p).unwrap()).unwrap();
        prop_assert!(close(&e, &BoundaryPoint::ORIGIN, 1e-13));
    }

    #[test]
    fn kc_distance_is_translation_invariant_and_scales(p in point(), q in point(), by in point(), r in 0.5..2.0f64) {
        let d = kc_distance(&p, &q);
        let dt = kc_distance(&translate(&by, &p).unwrap(), &translate(&by, &q).unwrap());
        prop_assert!((d - dt).abs() <= 1e-6 * (1.0 + d));
        let dd = kc_distance(&dilate(r, &p).unwrap(), &dilate(r, &q).unwrap());
        prop_assert!((dd - r * d).abs() <= 1e-6 * (1.0 + d));
        let dr = kc_distance(&rotate(1.1, &p), &rotate(1.1, &q));
        prop_assert!((dr - d).abs() <= 1e-6 * (1.0 + d));
    }

    #[test]
    fn inversion_is_an_involution(p in point()) {
        prop_assume!(kc_distance(&p, &BoundaryPoint::ORIGIN) > 1e-2);
        prop_assert!(close(&inversion(&inversion(&p)), &p, 1e-12));
    }

    #[test]
    fn generators_preserve_the_form_and_agree_with_coordinate_maps(g in generator(), p in point()) {
        let m = heis_matrix(g).unwrap();
        prop_assert!(m.form_defect() < 1e-12);
        let image = apply(&m, &p).unwrap();
        let direct = match g {
            HeisenbergGenerator::Translation { w, s } => {
                translate(&BoundaryPoint::new(w, s).unwrap(), &p).unwrap()
            }
            HeisenbergGenerator::Rotation { angle } => rotate(angle, &p),
            HeisenbergGenerator::Dilation { scale } => dilate(scale, &p).unwrap(),
            HeisenbergGenerator::Inversion => inversion(&p),
        };
        prop_assume!(!image.is_infinity());
        prop_assert!(close(&image, &direct, 1e-10));
    }

    #[test]
    fn invariants_survive_isometries(q in quadruple(), gs in prop::collection::vec(generator(), 1..5)) {
        let g = gs.iter().fold(heis_matrix(HeisenbergGenerator::Rotation { angle: 0.0 }).unwrap(), |acc, k| {
            heis_matrix(*k).unwrap() * acc
        });
        let moved: Vec<BoundaryPoint> = q.iter().map(|p| apply(&g, p).unwrap()).collect();
        let moved: Quadruple = [moved[0], moved[1], moved[2], moved[3]];
        let x = triple_cross_ratios(&q).unwrap();
        let y = triple_cross_ratios(&moved).unwrap();
        for (a, b) in [(x.x1, y.x1), (x.x2, y.x2), (x.x3, y.x3)] {
            prop_assert!((a - b).norm() <= 1e-8 * (1.0 + a.norm()));
        }
        let a = cartan_quad(&q).unwrap().as_array();
        let b = cartan_quad(&moved).unwrap().as_array();
        for k in 0..4 {
            prop_assert!(angle_gap(a[k], b[k]) < 1e-8);
        }
    }

    #[test]
    fn cross_ratios_lie_on_the_variety(v in variety_point()) {
        let (r1, r2) = variety::normalized_residuals(&v);
        prop_assert!(r1.abs() < 1e-9 && r2.abs() < 1e-9);
        let t = involution_t(&v);
        let (s1, s2) = variety::normalized_residuals(&t);
        prop_assert!(s1.abs() < 1e-9 && s2.abs() < 1e-9);
        prop_assert_eq!(involution_t(&t), v);
    }

    #[test]
    fn cartan_invariants_are_bounded(q in quadruple()) {
        for a in cartan_quad(&q).unwrap().as_array() {
            prop_assert!(a.abs() <= PI / 2.0 + 1e-12);
        }
    }

    #[test]
    fn levi_form_is_positive_with_vanishing_first_component(v in variety_point()) {
        let l = variety::levi(&v).unwrap();
        prop_assert!(l.l2 > 0.0);
        let g = variety::minors(&v);
        let scale = g.d31.norm_sqr() + (v.z1() * g.d12 + v.z3() * g.d23).norm_sqr();
        prop_assert!(l.l1.abs() <= 1e-9 * scale);
    }

    #[test]
    fn chart_i_roundtrips(v in xstar_point()) {
        let back = from_chart_i(&to_chart_i(&v).unwrap()).unwrap();
        for (a, b) in v.zeta.iter().zip(back.zeta.iter()) {
            prop_assert!((a - b).norm() <= 1e-9 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn chart_j_intertwines_the_involution(v in xstar_point()) {
        let c = to_chart_j(&v).unwrap();
        let twice = involution_j(&involution_j(&c));
        prop_assert!((twice.w - c.w).norm() <= 1e-12 * (1.0 + c.w.norm()));
        if let (ProjectiveZ::Finite(a), ProjectiveZ::Finite(b)) = (twice.z, c.z) {
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
        }
        let direct = to_chart_j(&involution_t(&v)).unwrap();
        let via = involution_j(&c);
        prop_assert!((direct.w - via.w).norm() <= 1e-9 * (1.0 + via.w.norm()));
    }

    #[test]
    fn reconstruction_roundtrips(v in xstar_point()) {
        let q = variety_to_quadruple(&v).unwrap();
        prop_assert!(roundtrip_residual(&v, &q).unwrap() <= 1e-8 * v.scale().sqrt());
    }

    #[test]
    fn normalisation_fixes_infinity_and_origin(q in quadruple(), g in generator()) {
        let m = heis_matrix(g).unwrap();
        let moved: Vec<BoundaryPoint> = q.iter().map(|p| apply(&m, p).unwrap()).collect();
        let n = normalize_quadruple(&[moved[0], moved[1], moved[2], moved[3]]).unwrap();
        prop_assert!(n.points[1].is_infinity());
        prop_assert!(close(&n.points[2], &BoundaryPoint::ORIGIN, 1e-9));
    }

    #[test]
    fn similarities_form_a_group(r1 in 0.2..5.0f64, a1 in -10.0..10.0f64, r2 in 0.2..5.0f64, a2 in -10.0..10.0f64, p in point()) {
        let g = Similarity::new(r1, a1).unwrap();
        let h = Similarity::new(r2, a2).unwrap();
        let gh = g.compose(&h);
        prop_assert!(close(&gh.apply(&p), &g.apply(&h.apply(&p)), 1e-12));
        let e = g.compose(&g.inverse());
        prop_assert!((e.scale - 1.0).abs() < 1e-14 && angle_gap(e.angle, 0.0) < 1e-14);
    }

    #[test]
    fn angles_wrap_into_the_principal_range(a in -100.0..100.0f64) {
        let w = wrap_angle(a);
        prop_assert!(w > -PI && w <= PI);
        prop_assert!(angle_gap(w, a) < 1e-12);
    }

    #[test]
    fn points_roundtrip_through_json(p in point()) {
        let text = json::to_string(&json::point(&p));
        let back = json::parse_point(&json::parse(&text).unwrap(), "$").unwrap();
        prop_assert_eq!(back, p);
    }
}
