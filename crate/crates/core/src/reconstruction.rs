//! Passing between quadruples and variety points, recovering Cartan invariants
//! from cross-ratios and building the normal-form quadruple.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::charts::{to_chart_j, ProjectiveZ};
use crate::error::{GeometryError, Result};
use crate::heisenberg::BoundaryPoint;
use crate::hermitian::normalize_quadruple;
use crate::invariants::{cartan_quad, lemma_xa_residuals, prop_xa_residuals, triple_cross_ratios, CartanQuad};
use crate::tolerances;
use crate::variety::{ensure_on_variety, VarietyPoint};
use crate::{wrap_angle, Quadruple};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// The triple `(X1, X2, X3)` of a quadruple, checked against the defining equations.
pub fn quadruple_to_variety(q: &Quadruple) -> Result<VarietyPoint> {
    let v = VarietyPoint::from_cross_ratios(&triple_cross_ratios(q)?)?;
    ensure_on_variety(&v, tolerances::DEFAULT_TOL)?;
    Ok(v)
}

/// A quadruple `(p1, infinity, o, p4)` with cross-ratios `v`.
///
/// With `(z, w)` the J-chart coordinates, `z = z1/z4` and `w = X3`. For
/// `|z| <= 1` the representative has `z4 = 1`; otherwise `z1 = 1, z4 = 1/z`.
/// The heights solve `X3 (-|z1|^2 + i t1) = -|z4|^2 + i t4`.
pub fn variety_to_quadruple(v: &VarietyPoint) -> Result<Quadruple> {
    let j = to_chart_j(v)?;
    let w = j.w;
    let (z1, z4) = match j.z {
        ProjectiveZ::Finite(z) if z.norm() <= 1.0 => (z, ONE),
        ProjectiveZ::Finite(z) => (ONE, ONE / z),
        ProjectiveZ::Infinity => (ONE, Complex64::new(0.0, 0.0)),
    };
    let (a1, a4) = (z1.norm_sqr(), z4.norm_sqr());
    let t1 = (a4 - a1 * w.re) / w.im;
    let t4 = t1 * w.re - a1 * w.im;
    Ok([
        BoundaryPoint::new(z1, t1)?,
        BoundaryPoint::Infinity,
        BoundaryPoint::ORIGIN,
        BoundaryPoint::new(z4, t4)?,
    ])
}

/// Cartan invariants measured on the reconstructed quadruple.
pub fn cartan_from_variety(v: &VarietyPoint) -> Result<CartanQuad> {
    cartan_quad(&variety_to_quadruple(v)?)
}

fn in_cartan_range(a: f64) -> bool {
    a.abs() <= FRAC_PI_2 + 1e-12
}

/// Cartan invariants solved directly from the cross-ratios.
///
/// With `d = arg X3 = A4 - A1` and `K = |1 - X1 - X2|^2 / (4|X1||X2|) = cos A1 cos A4`,
/// the sum `s = A1 + A4` satisfies `cos s = 2K - cos d`. Each sign of `s` gives
/// `A2 = A1 - arg X1` and `A3 = A2 - A1 + A4`; the branch with the smaller
/// identity residuals is returned.
pub fn cartan_direct(v: &VarietyPoint) -> Result<CartanQuad> {
    let x = v.as_cross_ratios();
    let d = x.x3.arg();
    let k = (ONE - x.x1 - x.x2).norm_sqr() / (4.0 * x.x1.norm() * x.x2.norm());
    let c = 2.0 * k - d.cos();
    if c.abs() > 1.0 + tolerances::DEFAULT_TOL {
        return Err(GeometryError::DegenerateCartan("cos(A1 + A4) outside [-1, 1]"));
    }
    let s0 = c.clamp(-1.0, 1.0).acos();
    let mut best: Option<(f64, CartanQuad)> = None;
    for s in [s0, -s0] {
        let a4 = (s + d) / 2.0;
        let a1 = (s - d) / 2.0;
        let a2 = wrap_angle(a1 - x.x1.arg());
        let a3 = wrap_angle(a2 - a1 + a4);
        let cand = CartanQuad { a1, a2, a3, a4 };
        if !cand.as_array().iter().all(|a| in_cartan_range(*a)) {
            continue;
        }
        let score = prop_xa_residuals(&x, &cand)
            .iter()
            .chain(lemma_xa_residuals(&x, &cand).iter())
            .fold(0.0, |m: f64, r| m.max(*r));
        if best.as_ref().is_none_or(|(b, _)| score < *b) {
            best = Some((score, cand));
        }
    }
    best.map(|(_, a)| a)
        .ok_or(GeometryError::DegenerateCartan("no branch within the Cartan range"))
}

/// The normalised quadruple
/// `p1 = (sqrt(cos A4) e^{-i A3}, sin A4)`,
/// `p4 = (-sqrt(cos A1) |X3|^{1/2} e^{2 i eta}, |X3| sin A1)` with `2 eta = arg(1 - X1 - X2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalForm {
    pub points: Quadruple,
    pub eta: f64,
    pub cartan: CartanQuad,
}

/// `eta = arg(1 - X1 - X2) / 2`, in `(-pi/2, pi/2]`.
pub fn eta(v: &VarietyPoint) -> Result<f64> {
    let u = ONE - v.z1() - v.z2();
    if u.norm() == 0.0 {
        return Err(GeometryError::DegenerateCartan("1 - X1 - X2 vanishes"));
    }
    Ok(u.arg() / 2.0)
}

pub fn normal_form(v: &VarietyPoint) -> Result<NormalForm> {
    let a = cartan_from_variety(v)?;
    normal_form_with(v, a)
}

/// As [`normal_form`] with caller-supplied Cartan invariants.
pub fn normal_form_with(v: &VarietyPoint, a: CartanQuad) -> Result<NormalForm> {
    let tol = tolerances::DEFAULT_TOL;
    if a.a1.cos() <= tol {
        return Err(GeometryError::DegenerateCartan("cos A1 vanishes"));
    }
    if a.a4.cos() <= tol {
        return Err(GeometryError::DegenerateCartan("cos A4 vanishes"));
    }
    let e = eta(v)?;
    let m3 = v.z3().norm();
    let p1 = BoundaryPoint::new(Complex64::from_polar(a.a4.cos().sqrt(), -a.a3), a.a4.sin())?;
    let p4 = BoundaryPoint::new(
        -Complex64::from_polar(a.a1.cos().sqrt() * m3.sqrt(), 2.0 * e),
        m3 * a.a1.sin(),
    )?;
    Ok(NormalForm {
        points: [p1, BoundaryPoint::Infinity, BoundaryPoint::ORIGIN, p4],
        eta: e,
        cartan: a,
    })
}

/// Residual of `2 |X1|^{1/2} |X2|^{1/2} sqrt(cos A1 cos A4) = |1 - X1 - X2|`.
pub fn eta_modulus_residual(v: &VarietyPoint, a: &CartanQuad) -> f64 {
    let lhs = 2.0 * (v.z1().norm() * v.z2().norm()).sqrt() * (a.a1.cos() * a.a4.cos()).max(0.0).sqrt();
    (lhs - (ONE - v.z1() - v.z2()).norm()).abs()
}

/// Largest cross-ratio component gap between `v` and the triple of `q`.
pub fn roundtrip_residual(v: &VarietyPoint, q: &Quadruple) -> Result<f64> {
    let w = triple_cross_ratios(q)?;
    Ok([w.x1 - v.z1(), w.x2 - v.z2(), w.x3 - v.z3()]
        .iter()
        .map(|d| d.norm())
        .fold(0.0, f64::max))
}

/// `|dz| + |dt|` for finite points, `0` for two infinities, infinite otherwise.
///
/// Used where rounding-level agreement is checked: the Korányi–Cygan distance
/// is a square root of the gauge and turns `1e-16` coordinate noise into `1e-8`.
pub fn coordinate_gap(a: &BoundaryPoint, b: &BoundaryPoint) -> f64 {
    match (a.coords(), b.coords()) {
        (Some((z, t)), Some((w, s))) => (z - w).norm() + (t - s).abs(),
        (None, None) => 0.0,
        _ => f64::INFINITY,
    }
}

/// Agreement of the two reconstruction routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteAgreement {
    /// Largest coordinate gap `|dz| + |dt|` between the normalised J-chart
    /// representative and the normal form, point by point.
    pub point_gap: f64,
    /// Largest cross-ratio gap between the two quadruples.
    pub cross_ratio_gap: f64,
}

/// Normalises the J-chart representative and compares it with the normal form.
pub fn route_agreement(v: &VarietyPoint) -> Result<RouteAgreement> {
    let rep = variety_to_quadruple(v)?;
    let nf = normal_form(v)?;
    let normalized = normalize_quadruple(&rep)?;
    let point_gap = normalized
        .points
        .iter()
        .zip(nf.points.iter())
        .map(|(a, b)| coordinate_gap(a, b))
        .fold(0.0, f64::max);
    let x = triple_cross_ratios(&rep)?;
    let y = triple_cross_ratios(&nf.points)?;
    let cross_ratio_gap = [x.x1 - y.x1, x.x2 - y.x2, x.x3 - y.x3]
        .iter()
        .map(|d| d.norm())
        .fold(0.0, f64::max);
    Ok(RouteAgreement {
        point_gap,
        cross_ratio_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle_gap;
    use crate::variety::involution_t;
    use std::f64::consts::FRAC_PI_4;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(re: f64, im: f64, t: f64) -> BoundaryPoint {
        BoundaryPoint::from_parts(re, im, t)
    }

    fn q2_quad() -> Quadruple {
        [
            pt(1.0, 0.0, 1.0),
            BoundaryPoint::Infinity,
            BoundaryPoint::ORIGIN,
            pt(0.0, 2.0, 1.0),
        ]
    }

    fn q2() -> VarietyPoint {
        VarietyPoint::new(c(1.0 / 41.0, 9.0 / 41.0), c(24.0 / 41.0, 11.0 / 41.0), c(2.5, 1.5)).unwrap()
    }

    #[test]
    fn fixtures_to_variety() {
        let v = quadruple_to_variety(&q2_quad()).unwrap();
        for (a, b) in v.zeta.iter().zip(q2().zeta) {
            assert!((a - b).norm() < 1e-15);
        }
        let q1 = [
            pt(1.0, 0.0, 1.0),
            BoundaryPoint::Infinity,
            BoundaryPoint::ORIGIN,
            pt(0.0, 1.0, 1.0),
        ];
        let v = quadruple_to_variety(&q1).unwrap();
        assert!((v.z1() - c(0.0, 0.5)).norm() < 1e-15);
        assert!((v.z2() - c(0.5, 0.0)).norm() < 1e-15);
        assert!((v.z3() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn q2_reconstruction() {
        let q = variety_to_quadruple(&q2()).unwrap();
        let (z1, t1) = q[0].coords().unwrap();
        assert!((z1 - c(0.0, -0.5)).norm() < 1e-15);
        // t1 = (1 - |z|^2 Re w)/Im w = (1 - 5/8)/(3/2) = 1/4.
        assert!((t1 - 0.25).abs() < 1e-15);
        let (z4, t4) = q[3].coords().unwrap();
        assert_eq!(z4, ONE);
        // t4 = t1 Re w - |z|^2 Im w = 5/8 - 3/8.
        assert!((t4 - 0.25).abs() < 1e-15);
        assert!(roundtrip_residual(&q2(), &q).unwrap() < 1e-14);
    }

    #[test]
    fn infinite_z_branch() {
        // Involution image of the CR singular fixture: zeta1 + zeta2 = 1, z = infinity.
        let v = VarietyPoint::new(c(1.0, 1.0), c(0.0, -1.0), c(0.5, -0.5)).unwrap();
        let q = variety_to_quadruple(&v).unwrap();
        let (z4, t4) = q[3].coords().unwrap();
        assert_eq!(z4, c(0.0, 0.0));
        assert!(t4.abs() > 0.1);
        assert!(roundtrip_residual(&v, &q).unwrap() < 1e-12);
        // And the zero branch on the singular set itself.
        let q = variety_to_quadruple(&involution_t(&v)).unwrap();
        assert!(roundtrip_residual(&involution_t(&v), &q).unwrap() < 1e-12);
    }

    #[test]
    fn cartan_routes_agree_at_q2() {
        let a = cartan_from_variety(&q2()).unwrap();
        assert!((a.a4 - FRAC_PI_4).abs() < 1e-12);
        for r in prop_xa_residuals(&q2().as_cross_ratios(), &a) {
            assert!(r < 1e-10);
        }
        let b = cartan_direct(&q2()).unwrap();
        for (x, y) in a.as_array().iter().zip(b.as_array()) {
            assert!(angle_gap(*x, y) < 1e-10, "{a:?} {b:?}");
        }
        let exact = [0.24497866312686414, -1.215160442494137, -0.6747409422235526, FRAC_PI_4];
        for (x, y) in a.as_array().iter().zip(exact) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn normal_form_at_q2() {
        let nf = normal_form(&q2()).unwrap();
        let (z1, t1) = nf.points[0].coords().unwrap();
        assert!((z1 - Complex64::from_polar(FRAC_PI_4.cos().sqrt(), -nf.cartan.a3)).norm() < 1e-15);
        assert!((t1 - FRAC_PI_4.sin()).abs() < 1e-12);
        assert!(roundtrip_residual(&q2(), &nf.points).unwrap() < 1e-10);
        assert!((2.0 * nf.eta - (-0.8960553845713439)).abs() < 1e-14);
        let u = ONE - q2().z1() - q2().z2();
        assert!((Complex64::from_polar(1.0, 2.0 * nf.eta) - u / u.norm()).norm() < 1e-15);
        assert!(eta_modulus_residual(&q2(), &nf.cartan) < 1e-10);
        let g = route_agreement(&q2()).unwrap();
        assert!(g.point_gap < 1e-8 && g.cross_ratio_gap < 1e-9, "{g:?}");
    }

    #[test]
    fn degenerate_inputs() {
        let real = VarietyPoint::new(c(2.0, 0.0), c(-1.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!(matches!(variety_to_quadruple(&real), Err(GeometryError::NotInXStar(_))));
        // On the CR singular set p1 lies on the vertical axis, so cos A4 = 0.
        let xcr = VarietyPoint::new(c(1.0, 1.0), c(0.0, -1.0), c(0.5, 0.5)).unwrap();
        assert!(matches!(normal_form(&xcr), Err(GeometryError::DegenerateCartan(_))));
    }
}
