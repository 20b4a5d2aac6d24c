//! Geometric realisation of the involution `(X1, X2, X3) -> (X1, X2, conj X3)` by
//! Heisenberg similarities fixing infinity and the origin.
//!
//! All checks run in the normalised frame `p2 = infinity, p3 = o`, so the
//! statements "conjugate to a rotation/dilation" reduce to reading off the
//! angle and scale of a similarity.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{GeometryError, Result};
use crate::heisenberg::{kc_distance, BoundaryPoint};
use crate::hermitian::{heis_matrix, HeisenbergGenerator, Isometry};
use crate::invariants::{cartan_quad, triple_cross_ratios, CartanQuad, CrossRatios};
use crate::reconstruction::{coordinate_gap, eta, normal_form, NormalForm};
use crate::tolerances;
use crate::variety::{involution_t, VarietyPoint};
use crate::{angle_gap, wrap_angle, Quadruple};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `(z, t) -> (r e^{i phi} z, r^2 t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub scale: f64,
    pub angle: f64,
}

impl Similarity {
    pub const IDENTITY: Similarity = Similarity { scale: 1.0, angle: 0.0 };

    pub fn new(scale: f64, angle: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(GeometryError::NonPositiveDilation(scale));
        }
        if !angle.is_finite() {
            return Err(GeometryError::NonFinite("similarity angle"));
        }
        Ok(Similarity {
            scale,
            angle: wrap_angle(angle),
        })
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Similarity) -> Similarity {
        Similarity {
            scale: self.scale * other.scale,
            angle: wrap_angle(self.angle + other.angle),
        }
    }

    pub fn inverse(&self) -> Similarity {
        Similarity {
            scale: 1.0 / self.scale,
            angle: wrap_angle(-self.angle),
        }
    }

    pub fn apply(&self, p: &BoundaryPoint) -> BoundaryPoint {
        match *p {
            BoundaryPoint::Finite { z, t } => BoundaryPoint::Finite {
                z: z * Complex64::from_polar(self.scale, self.angle),
                t: t * self.scale * self.scale,
            },
            BoundaryPoint::Infinity => BoundaryPoint::Infinity,
        }
    }

    pub fn to_isometry(&self) -> Result<Isometry> {
        Ok(heis_matrix(HeisenbergGenerator::Rotation { angle: self.angle })?
            * heis_matrix(HeisenbergGenerator::Dilation { scale: self.scale })?)
    }
}

/// `g1 = (|X3|^{1/2}, pi + 2 eta + A3)` and `g4 = (|X3|^{-1/2}, pi - 2 eta - A2)`;
/// the offset `pi` is the leading minus sign of the displayed maps.
pub fn build_g1_g4(v: &VarietyPoint) -> Result<(Similarity, Similarity)> {
    let nf = normal_form(v)?;
    g_pair(v, &nf)
}

fn g_pair(v: &VarietyPoint, nf: &NormalForm) -> Result<(Similarity, Similarity)> {
    let m = v.z3().norm();
    let e2 = 2.0 * nf.eta;
    Ok((
        Similarity::new(m.sqrt(), PI + e2 + nf.cartan.a3)?,
        Similarity::new(1.0 / m.sqrt(), PI - e2 - nf.cartan.a2)?,
    ))
}

/// Residuals of the three theorem conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremReport {
    pub g1: Similarity,
    pub g4: Similarity,
    /// Korányi–Cygan distances `d(g1 p1, p4')` and `d(g4 p4, p1')`.
    pub point_distances: [f64; 2],
    /// Coordinate gaps `|dz| + |dt|` of the same pairs.
    pub point_coordinate_gaps: [f64; 2],
    /// `d(g o, o)` for both maps; infinity is fixed structurally.
    pub origin_drift: f64,
    /// `|scale(g1 g4) - 1|` and the wrapped gap `angle(g1 g4) - arg X3`.
    pub rotation: [f64; 2],
    /// Relative `|scale(g1 g4^{-1}) - |X3||` and the wrapped gap to
    /// `2 arg((1 - X1 - X2)/(X1^{1/2} X2^{1/2}))`.
    pub dilation: [f64; 2],
    /// Wrapped gap between `4 eta + A2 + A3` and the principal-root expression.
    pub dilation_angle_forms: f64,
    /// Wrapped gaps `A3 - A2` and `A4 - A1` against `arg X3`.
    pub angle_consistency: [f64; 2],
    pub passed: bool,
}

impl TheoremReport {
    /// Largest residual across the three conditions.
    pub fn max_residual(&self) -> f64 {
        self.point_distances
            .iter()
            .chain(&[self.origin_drift])
            .chain(&self.rotation)
            .chain(&self.dilation)
            .fold(0.0, |m: f64, r| m.max(*r))
    }
}

fn check_hypotheses(v: &VarietyPoint) -> Result<()> {
    if v.z3().im.abs() <= tolerances::DEFAULT_TOL {
        return Err(GeometryError::HypothesisFailed("(a) Im X3 vanishes"));
    }
    Ok(())
}

fn normal_form_checked(v: &VarietyPoint) -> Result<NormalForm> {
    normal_form(v).map_err(|e| match e {
        GeometryError::DegenerateCartan(_) => GeometryError::HypothesisFailed("(b) a triple lies on a C-circle"),
        other => other,
    })
}

pub fn verify_theorem_git(v: &VarietyPoint, tol: f64) -> Result<TheoremReport> {
    check_hypotheses(v)?;
    let tv = involution_t(v);
    let nf = normal_form_checked(v)?;
    let nf_t = normal_form_checked(&tv)?;
    let (g1, g4) = g_pair(v, &nf)?;
    let (p1, p4) = (nf.points[0], nf.points[3]);
    let (q1, q4) = (nf_t.points[0], nf_t.points[3]);
    let (img1, img4) = (g1.apply(&p1), g4.apply(&p4));
    let o = BoundaryPoint::ORIGIN;
    let origin_drift = kc_distance(&g1.apply(&o), &o).max(kc_distance(&g4.apply(&o), &o));

    let rot = g1.compose(&g4);
    let x3 = v.z3();
    let rotation = [(rot.scale - 1.0).abs(), angle_gap(rot.angle, x3.arg())];

    let dil = g1.compose(&g4.inverse());
    let u = ONE - v.z1() - v.z2();
    let target = 2.0 * (u / (v.z1().sqrt() * v.z2().sqrt())).arg();
    let dilation = [(dil.scale / x3.norm() - 1.0).abs(), angle_gap(dil.angle, target)];
    let a = nf.cartan;
    let dilation_angle_forms = angle_gap(4.0 * nf.eta + a.a2 + a.a3, target);
    let angle_consistency = [angle_gap(a.a3 - a.a2, x3.arg()), angle_gap(a.a4 - a.a1, x3.arg())];

    let mut report = TheoremReport {
        g1,
        g4,
        point_distances: [kc_distance(&img1, &q4), kc_distance(&img4, &q1)],
        point_coordinate_gaps: [coordinate_gap(&img1, &q4), coordinate_gap(&img4, &q1)],
        origin_drift,
        rotation,
        dilation,
        dilation_angle_forms,
        angle_consistency,
        passed: false,
    };
    report.passed = report.max_residual() < tol;
    Ok(report)
}

/// The three equivalent conditions relating `q` and `q'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GitEquivalences {
    /// `X' = (X1, X2, conj X3)`.
    pub cond_i: bool,
    /// `|X1| = |X1'|`, `|X2| = |X2'|` and the Cartan swaps.
    pub cond_ii: bool,
    /// `|X3| = |X3'|`, `eta = eta' (mod pi)` and the Cartan swaps.
    pub cond_iii: bool,
}

impl GitEquivalences {
    pub fn agree(&self) -> bool {
        self.cond_i == self.cond_ii && self.cond_ii == self.cond_iii
    }
}

fn cartan_swaps_hold(a: &CartanQuad, b: &CartanQuad, tol: f64) -> bool {
    angle_gap(a.a1, b.a4) < tol
        && angle_gap(a.a2, b.a3) < tol
        && angle_gap(a.a3, b.a2) < tol
        && angle_gap(a.a4, b.a1) < tol
}

pub fn lemma_git_equivalences(q: &Quadruple, q_prime: &Quadruple, tol: f64) -> Result<GitEquivalences> {
    let x: CrossRatios = triple_cross_ratios(q)?;
    let y: CrossRatios = triple_cross_ratios(q_prime)?;
    let a = cartan_quad(q)?;
    let b = cartan_quad(q_prime)?;
    let vx = VarietyPoint::from_cross_ratios(&x)?;
    let vy = VarietyPoint::from_cross_ratios(&y)?;
    let swaps = cartan_swaps_hold(&a, &b, tol);
    let cond_i = (x.x1 - y.x1).norm() < tol && (x.x2 - y.x2).norm() < tol && (x.x3.conj() - y.x3).norm() < tol;
    let cond_ii = (x.x1.norm() - y.x1.norm()).abs() < tol && (x.x2.norm() - y.x2.norm()).abs() < tol && swaps;
    let cond_iii =
        (x.x3.norm() - y.x3.norm()).abs() < tol && angle_gap(2.0 * eta(&vx)?, 2.0 * eta(&vy)?) < tol && swaps;
    Ok(GitEquivalences {
        cond_i,
        cond_ii,
        cond_iii,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::BoundaryPoint as B;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn q2() -> VarietyPoint {
        VarietyPoint::new(c(1.0 / 41.0, 9.0 / 41.0), c(24.0 / 41.0, 11.0 / 41.0), c(2.5, 1.5)).unwrap()
    }

    #[test]
    fn similarity_group_law() {
        let a = Similarity::new(2.0, 1.0).unwrap();
        let b = Similarity::new(0.5, 3.0).unwrap();
        let ab = a.compose(&b);
        assert!((ab.scale - 1.0).abs() < 1e-15);
        assert!(angle_gap(ab.angle, 4.0) < 1e-15);
        let id = a.compose(&a.inverse());
        assert!((id.scale - 1.0).abs() < 1e-15 && id.angle.abs() < 1e-15);
        let p = B::from_parts(0.3, -1.0, 2.0);
        let direct = a.apply(&b.apply(&p));
        assert!(coordinate_gap(&direct, &ab.apply(&p)) < 1e-14);
        let via_matrix = crate::hermitian::apply(&a.to_isometry().unwrap(), &p).unwrap();
        assert!(coordinate_gap(&via_matrix, &a.apply(&p)) < 1e-14);
        assert!(Similarity::new(0.0, 1.0).is_err());
    }

    #[test]
    fn q2_pair() {
        let (g1, g4) = build_g1_g4(&q2()).unwrap();
        assert!((g1.scale - 8.5f64.powf(0.25)).abs() < 1e-15);
        assert!((g4.scale - 8.5f64.powf(-0.25)).abs() < 1e-15);
        assert!((g1.compose(&g4).scale - 1.0).abs() < 1e-15);
    }

    #[test]
    fn theorem_at_q2() {
        let r = verify_theorem_git(&q2(), 1e-9).unwrap();
        assert!(r.point_coordinate_gaps.iter().all(|g| *g < 1e-14), "{r:?}");
        assert!(r.rotation.iter().chain(&r.dilation).all(|g| *g < 1e-12), "{r:?}");
        assert!(r.dilation_angle_forms < 1e-12);
        assert!(r.angle_consistency.iter().all(|g| *g < 1e-12));
        assert_eq!(r.origin_drift, 0.0);
    }

    #[test]
    fn theorem_hypotheses() {
        let q1 = VarietyPoint::new(c(0.0, 0.5), c(0.5, 0.0), c(1.0, 0.0)).unwrap();
        assert!(matches!(
            verify_theorem_git(&q1, 1e-9),
            Err(GeometryError::HypothesisFailed(_))
        ));
        let xcr = VarietyPoint::new(c(1.0, 1.0), c(0.0, -1.0), c(0.5, 0.5)).unwrap();
        assert!(matches!(
            verify_theorem_git(&xcr, 1e-9),
            Err(GeometryError::HypothesisFailed(_))
        ));
    }

    #[test]
    fn lemma_equivalences() {
        let nf = normal_form(&q2()).unwrap().points;
        let nf_t = normal_form(&involution_t(&q2())).unwrap().points;
        let e = lemma_git_equivalences(&nf, &nf_t, 1e-9).unwrap();
        assert!(e.cond_i && e.cond_ii && e.cond_iii);
        let e = lemma_git_equivalences(&nf, &nf, 1e-9).unwrap();
        assert!(!e.cond_i && !e.cond_ii && !e.cond_iii);
        let q1 = [
            B::from_parts(1.0, 0.0, 1.0),
            B::Infinity,
            B::ORIGIN,
            B::from_parts(0.0, 1.0, 1.0),
        ];
        let e = lemma_git_equivalences(&q1, &q1, 1e-9).unwrap();
        assert!(e.cond_i && e.cond_ii && e.cond_iii);
    }
}
