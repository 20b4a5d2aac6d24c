//! Cartan angular invariants and complex cross-ratios of boundary configurations.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{GeometryError, Result};
use crate::heisenberg::{gauge, inv, kc_distance, star, BoundaryPoint};
use crate::hermitian::{herm, standard_lift, Lift};
use crate::tolerances;
use crate::{angle_gap, Quadruple};

/// The three cross-ratios `X1 = X(p1,p2,p3,p4)`, `X2 = X(p1,p3,p2,p4)`, `X3 = X(p2,p3,p1,p4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossRatios {
    pub x1: Complex64,
    pub x2: Complex64,
    pub x3: Complex64,
}

/// Cartan invariants `A1 = A(p2,p3,p4)`, `A2 = A(p1,p3,p4)`, `A3 = A(p1,p2,p4)`, `A4 = A(p1,p2,p3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartanQuad {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

impl CartanQuad {
    pub fn as_array(&self) -> [f64; 4] {
        [self.a1, self.a2, self.a3, self.a4]
    }
}

fn check_distinct(lifts: &[(usize, Lift)]) -> Result<()> {
    for (i, (a_idx, a)) in lifts.iter().enumerate() {
        for (b_idx, b) in &lifts[i + 1..] {
            if herm(a, b).norm() <= tolerances::COINCIDENT * a.norm() * b.norm() {
                return Err(GeometryError::CoincidentPoints(*a_idx, *b_idx));
            }
        }
    }
    Ok(())
}

/// `arg(-<a,b><b,c><c,a>)` for arbitrary lifts, clamped to `[-pi/2, pi/2]`.
pub fn cartan_of_lifts(a: &Lift, b: &Lift, c: &Lift) -> f64 {
    let triple = -(herm(a, b) * herm(b, c) * herm(c, a));
    triple.arg().clamp(-FRAC_PI_2, FRAC_PI_2)
}

/// Cartan's angular invariant of three pairwise distinct boundary points.
pub fn cartan(p1: &BoundaryPoint, p2: &BoundaryPoint, p3: &BoundaryPoint) -> Result<f64> {
    let lifts = [(0, standard_lift(p1)), (1, standard_lift(p2)), (2, standard_lift(p3))];
    check_distinct(&lifts)?;
    Ok(cartan_of_lifts(&lifts[0].1, &lifts[1].1, &lifts[2].1))
}

/// `<l3,l1><l4,l2> / (<l4,l1><l3,l2>)` for arbitrary lifts.
pub fn cross_ratio_of_lifts(l: [&Lift; 4]) -> Complex64 {
    herm(l[2], l[0]) * herm(l[3], l[1]) / (herm(l[3], l[0]) * herm(l[2], l[1]))
}

/// Complex cross-ratio of four pairwise distinct boundary points.
pub fn cross_ratio(
    p1: &BoundaryPoint,
    p2: &BoundaryPoint,
    p3: &BoundaryPoint,
    p4: &BoundaryPoint,
) -> Result<Complex64> {
    let lifts = [
        (0, standard_lift(p1)),
        (1, standard_lift(p2)),
        (2, standard_lift(p3)),
        (3, standard_lift(p4)),
    ];
    check_distinct(&lifts)?;
    Ok(cross_ratio_of_lifts([
        &lifts[0].1,
        &lifts[1].1,
        &lifts[2].1,
        &lifts[3].1,
    ]))
}

fn gauge_of_quotient(p: &BoundaryPoint, q: &BoundaryPoint) -> Result<Complex64> {
    Ok(gauge(&star(&inv(q)?, p)?)?.0)
}

/// Cross-ratio written with the Korányi gauge:
/// `A(p2^{-1} p4) A(p1^{-1} p3) / (A(p1^{-1} p4) A(p2^{-1} p3))`.
///
/// Each index occurs once upstairs and once downstairs, so the two factors
/// involving a point at infinity are dropped together.
pub fn cross_ratio_koranyi(
    p1: &BoundaryPoint,
    p2: &BoundaryPoint,
    p3: &BoundaryPoint,
    p4: &BoundaryPoint,
) -> Result<Complex64> {
    let pts = [p1, p2, p3, p4];
    for i in 0..4 {
        for j in i + 1..4 {
            if kc_distance(pts[i], pts[j]) == 0.0 {
                return Err(GeometryError::CoincidentPoints(i, j));
            }
        }
    }
    let factor = |a: usize, b: usize| -> Result<Complex64> {
        if pts[a].is_infinity() || pts[b].is_infinity() {
            Ok(Complex64::new(1.0, 0.0))
        } else {
            gauge_of_quotient(pts[b], pts[a])
        }
    };
    let num = factor(1, 3)? * factor(0, 2)?;
    let den = factor(0, 3)? * factor(1, 2)?;
    if den.norm() == 0.0 || num.norm() == 0.0 {
        return Err(GeometryError::CoincidentPoints(0, 3));
    }
    Ok(num / den)
}

/// `(X1, X2, X3)` of a quadruple.
pub fn triple_cross_ratios(q: &Quadruple) -> Result<CrossRatios> {
    let [p1, p2, p3, p4] = q;
    Ok(CrossRatios {
        x1: cross_ratio(p1, p2, p3, p4)?,
        x2: cross_ratio(p1, p3, p2, p4)?,
        x3: cross_ratio(p2, p3, p1, p4)?,
    })
}

/// `(A1, A2, A3, A4)` of a quadruple.
pub fn cartan_quad(q: &Quadruple) -> Result<CartanQuad> {
    let [p1, p2, p3, p4] = q;
    Ok(CartanQuad {
        a1: cartan(p2, p3, p4)?,
        a2: cartan(p1, p3, p4)?,
        a3: cartan(p1, p2, p4)?,
        a4: cartan(p1, p2, p3)?,
    })
}

/// Wrapped residuals of
/// `arg X1 = A1 - A2`, `arg X2 = -A2 - A4`, `arg X3 = A4 - A1`, `A3 = A2 - A1 + A4`.
pub fn prop_xa_residuals(x: &CrossRatios, a: &CartanQuad) -> [f64; 4] {
    [
        angle_gap(x.x1.arg(), a.a1 - a.a2),
        angle_gap(x.x2.arg(), -a.a2 - a.a4),
        angle_gap(x.x3.arg(), a.a4 - a.a1),
        angle_gap(a.a3, a.a2 - a.a1 + a.a4),
    ]
}

/// Absolute residuals of the six modulus identities, in order:
///
/// 1. `|X1 + X2 - 1|^2 = 4 |X1||X2| cos A1 cos A4`
/// 2. `|X1 + conj X2 - 1|^2 = 4 |X1||X2| cos A2 cos A3`
/// 3. `|X3 + 1/X1 - 1|^2 = 4 |X3|/|X1| cos A2 cos A4`
/// 4. `|conj X3 + 1/X1 - 1|^2 = 4 |X3|/|X1| cos A1 cos A3`
/// 5. `|1/X2 + 1/X3 - 1|^2 = 4 / (|X2||X3|) cos A3 cos A4`
/// 6. `|1/X2 + 1/conj X3 - 1|^2 = 4 / (|X2||X3|) cos A1 cos A2`
pub fn lemma_xa_residuals(x: &CrossRatios, a: &CartanQuad) -> [f64; 6] {
    let one = Complex64::new(1.0, 0.0);
    let (x1, x2, x3) = (x.x1, x.x2, x.x3);
    let (m1, m2, m3) = (x1.norm(), x2.norm(), x3.norm());
    let [c1, c2, c3, c4] = a.as_array().map(f64::cos);
    [
        ((x1 + x2 - one).norm_sqr() - 4.0 * m1 * m2 * c1 * c4).abs(),
        ((x1 + x2.conj() - one).norm_sqr() - 4.0 * m1 * m2 * c2 * c3).abs(),
        ((x3 + one / x1 - one).norm_sqr() - 4.0 * m3 / m1 * c2 * c4).abs(),
        ((x3.conj() + one / x1 - one).norm_sqr() - 4.0 * m3 / m1 * c1 * c3).abs(),
        ((one / x2 + one / x3 - one).norm_sqr() - 4.0 / (m2 * m3) * c3 * c4).abs(),
        ((one / x2 + one / x3.conj() - one).norm_sqr() - 4.0 / (m2 * m3) * c1 * c2).abs(),
    ]
}

/// Residual of
/// `|X1|^2 + |X2|^2 = 2|X1||X2| cos(A1 - A4) + 2|X1| cos(A2 - A1) + 2|X2| cos(A2 + A4) - 1`.
pub fn alternative_description_residual(x: &CrossRatios, a: &CartanQuad) -> f64 {
    let (m1, m2) = (x.x1.norm(), x.x2.norm());
    let lhs = m1 * m1 + m2 * m2;
    let rhs =
        2.0 * m1 * m2 * (a.a1 - a.a4).cos() + 2.0 * m1 * (a.a2 - a.a1).cos() + 2.0 * m2 * (a.a2 + a.a4).cos() - 1.0;
    (lhs - rhs).abs()
}

/// Relative residual of `|X(p1..p4)|^{1/2} = d(p4,p2) d(p3,p1) / (d(p4,p1) d(p3,p2))`,
/// dropping the distances to a point at infinity in matched pairs.
pub fn modulus_law_residual(q: &Quadruple) -> Result<f64> {
    let x = cross_ratio(&q[0], &q[1], &q[2], &q[3])?;
    let d = |a: usize, b: usize| {
        if q[a].is_infinity() || q[b].is_infinity() {
            1.0
        } else {
            kc_distance(&q[a], &q[b])
        }
    };
    let ratio = d(3, 1) * d(2, 0) / (d(3, 0) * d(2, 1));
    Ok((x.norm().sqrt() / ratio - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn pt(re: f64, im: f64, t: f64) -> BoundaryPoint {
        BoundaryPoint::from_parts(re, im, t)
    }

    fn q1() -> Quadruple {
        [
            pt(1.0, 0.0, 1.0),
            BoundaryPoint::Infinity,
            BoundaryPoint::ORIGIN,
            pt(0.0, 1.0, 1.0),
        ]
    }

    fn q2() -> Quadruple {
        [
            pt(1.0, 0.0, 1.0),
            BoundaryPoint::Infinity,
            BoundaryPoint::ORIGIN,
            pt(0.0, 2.0, 1.0),
        ]
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cartan_examples() {
        let a = cartan(&pt(1.0, 0.0, 1.0), &BoundaryPoint::Infinity, &BoundaryPoint::ORIGIN).unwrap();
        assert!((a - FRAC_PI_4).abs() < 1e-15);
        let r = cartan(&pt(1.0, 0.0, 0.0), &pt(2.0, 0.0, 0.0), &BoundaryPoint::Infinity).unwrap();
        assert!(r.abs() < 1e-15);
        let v = cartan(&pt(0.0, 0.0, 1.0), &pt(0.0, 0.0, -1.0), &BoundaryPoint::Infinity).unwrap();
        assert!((v.abs() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn cartan_rejects_coincident_points() {
        let p = pt(1.0, 1.0, 0.5);
        assert_eq!(
            cartan(&p, &p, &BoundaryPoint::ORIGIN),
            Err(GeometryError::CoincidentPoints(0, 1))
        );
    }

    #[test]
    fn fixture_q1_cross_ratios() {
        let x = triple_cross_ratios(&q1()).unwrap();
        assert!((x.x1 - c(0.0, 0.5)).norm() < 1e-15);
        assert!((x.x2 - c(0.5, 0.0)).norm() < 1e-15);
        assert!((x.x3 - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn fixture_q2_cross_ratios() {
        let x = triple_cross_ratios(&q2()).unwrap();
        assert!((x.x1 - c(1.0 / 41.0, 9.0 / 41.0)).norm() < 1e-15);
        assert!((x.x2 - c(24.0 / 41.0, 11.0 / 41.0)).norm() < 1e-15);
        assert!((x.x3 - c(2.5, 1.5)).norm() < 1e-15);
    }

    #[test]
    fn fixture_q2_cartan_quad() {
        // Oracle: arguments of the exact triple products 4+i, 13-35i, 5-4i, 1+i.
        let a = cartan_quad(&q2()).unwrap();
        assert!((a.a1 - c(4.0, 1.0).arg()).abs() < 1e-14);
        assert!((a.a2 - c(13.0, -35.0).arg()).abs() < 1e-14);
        assert!((a.a3 - c(5.0, -4.0).arg()).abs() < 1e-14);
        assert!((a.a4 - FRAC_PI_4).abs() < 1e-15);
        let x = triple_cross_ratios(&q2()).unwrap();
        assert!(prop_xa_residuals(&x, &a).iter().all(|r| *r < 1e-12));
        assert!(lemma_xa_residuals(&x, &a).iter().all(|r| *r < 1e-12));
        assert!(alternative_description_residual(&x, &a) < 1e-12);
    }

    #[test]
    fn koranyi_form_matches_lift_form() {
        for q in [q1(), q2()] {
            let a = cross_ratio(&q[0], &q[1], &q[2], &q[3]).unwrap();
            let b = cross_ratio_koranyi(&q[0], &q[1], &q[2], &q[3]).unwrap();
            assert!((a - b).norm() < 1e-14);
        }
        let finite = [
            pt(1.0, 0.5, -1.0),
            pt(-0.3, 2.0, 0.4),
            pt(0.7, -1.1, 2.2),
            pt(-2.0, 0.1, -0.6),
        ];
        let a = cross_ratio(&finite[0], &finite[1], &finite[2], &finite[3]).unwrap();
        let b = cross_ratio_koranyi(&finite[0], &finite[1], &finite[2], &finite[3]).unwrap();
        assert!((a - b).norm() < 1e-13 * a.norm());
        // |X1(Q1)| = 1/2.
        let k = cross_ratio_koranyi(&q1()[0], &q1()[1], &q1()[2], &q1()[3]).unwrap();
        assert!((k.norm() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn real_axis_quadruple_has_positive_cross_ratio() {
        let x = cross_ratio_koranyi(
            &pt(1.0, 0.0, 0.0),
            &pt(-1.0, 0.0, 0.0),
            &BoundaryPoint::ORIGIN,
            &BoundaryPoint::Infinity,
        )
        .unwrap();
        assert!(x.re > 0.0 && x.im.abs() < 1e-15);
    }

    #[test]
    fn c_circle_quadruple_conditions() {
        let q = [
            pt(0.0, 0.0, 1.3),
            BoundaryPoint::Infinity,
            BoundaryPoint::ORIGIN,
            pt(0.0, 0.0, -0.4),
        ];
        let x = triple_cross_ratios(&q).unwrap();
        assert!((x.x1 + x.x2 - 1.0).norm() < 1e-14);
        assert!((x.x3 + x.x2 / x.x1).norm() < 1e-14);
        for v in [x.x1, x.x2, x.x3] {
            assert!(v.im.abs() < 1e-14);
        }
        // The first modulus identity degenerates to 0 = 0.
        let a = cartan_quad(&q).unwrap();
        assert!(lemma_xa_residuals(&x, &a)[0] < 1e-14);
    }

    #[test]
    fn modulus_law_on_fixtures() {
        assert!(modulus_law_residual(&q1()).unwrap() < 1e-14);
        assert!(modulus_law_residual(&q2()).unwrap() < 1e-14);
    }

    #[test]
    fn lift_rescaling_is_invisible() {
        let q = q2();
        let l: Vec<Lift> = q.iter().map(standard_lift).collect();
        let scales = [c(2.0, -1.0), c(-0.3, 0.7), c(5.0, 0.0), c(0.0, -1.5)];
        let s: Vec<Lift> = l.iter().zip(scales).map(|(v, k)| v.scale(k)).collect();
        let a = cross_ratio_of_lifts([&l[0], &l[1], &l[2], &l[3]]);
        let b = cross_ratio_of_lifts([&s[0], &s[1], &s[2], &s[3]]);
        assert!((a - b).norm() < 1e-14);
        assert!((cartan_of_lifts(&l[0], &l[1], &l[2]) - cartan_of_lifts(&s[0], &s[1], &s[2])).abs() < 1e-14);
    }

    #[test]
    fn cartan_range_is_respected_by_clamping() {
        let a = cartan(&pt(0.0, 0.0, 2.0), &pt(0.0, 0.0, -3.0), &BoundaryPoint::ORIGIN).unwrap();
        assert!(a.abs() <= FRAC_PI_2 && (a.abs() - PI / 2.0).abs() < 1e-15);
    }
}
