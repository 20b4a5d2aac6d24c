//! Linear algebra in `C^{2,1}`: the Hermitian form, standard lifts, form-preserving
//! matrices and normalisation of quadruples to the frame `(p2, p3) = (inf, o)`.

use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{GeometryError, Result};
use crate::heisenberg::{gauge, BoundaryPoint};
use crate::invariants::cartan;
use crate::tolerances;
use crate::Quadruple;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Homogeneous coordinates of a point of `C^{2,1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lift(pub [Complex64; 3]);

impl Lift {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, by: Complex64) -> Lift {
        Lift(self.0.map(|c| c * by))
    }
}

/// The form `<a, b> = a1 conj(b3) + a2 conj(b2) + a3 conj(b1)`.
pub fn herm(a: &Lift, b: &Lift) -> Complex64 {
    a.0[0] * b.0[2].conj() + a.0[1] * b.0[1].conj() + a.0[2] * b.0[0].conj()
}

/// Standard lift: `(-|z|^2 + i t, sqrt(2) z, 1)` for finite points, `(1, 0, 0)` for infinity.
pub fn standard_lift(p: &BoundaryPoint) -> Lift {
    match *p {
        BoundaryPoint::Infinity => Lift([ONE, ZERO, ZERO]),
        BoundaryPoint::Finite { z, t } => Lift([Complex64::new(-z.norm_sqr(), t), z * std::f64::consts::SQRT_2, ONE]),
    }
}

/// Boundary point of a null lift.
pub fn project(v: &Lift) -> Result<BoundaryPoint> {
    let n = v.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(GeometryError::NonFinite("lift"));
    }
    let q = herm(v, v).norm();
    if q >= tolerances::NULL_LIFT * n * n {
        return Err(GeometryError::NonNullLift(q / (n * n)));
    }
    if v.0[2].norm() <= tolerances::PROJECT_INFINITY * n {
        return Ok(BoundaryPoint::Infinity);
    }
    let a = v.0[0] / v.0[2];
    let b = v.0[1] / v.0[2];
    BoundaryPoint::new(b / std::f64::consts::SQRT_2, a.im)
}

/// A 3x3 matrix acting on `C^{2,1}`; representatives of `PU(2,1)` are not
/// normalised to determinant one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    pub m: [[Complex64; 3]; 3],
}

/// Generators realised by [`heis_matrix`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeisenbergGenerator {
    Translation { w: Complex64, s: f64 },
    Rotation { angle: f64 },
    Dilation { scale: f64 },
    Inversion,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        m: [[ONE, ZERO, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, ONE]],
    };

    pub fn act(&self, v: &Lift) -> Lift {
        let mut out = [ZERO; 3];
        for (i, row) in self.m.iter().enumerate() {
            out[i] = row[0] * v.0[0] + row[1] * v.0[1] + row[2] * v.0[2];
        }
        Lift(out)
    }

    /// Max-entry deviation `max |m^* J m - J|`.
    pub fn form_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                // (m^* J m)_{ij} = sum_k conj(m_{k i}) m_{2-k, j}
                let mut acc = ZERO;
                for k in 0..3 {
                    acc += self.m[k][i].conj() * self.m[2 - k][j];
                }
                let target = if i + j == 2 { ONE } else { ZERO };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }

    /// Inverse of a form-preserving matrix: `J m^* J`.
    pub fn form_inverse(&self) -> Isometry {
        let mut m = [[ZERO; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = self.m[2 - j][2 - i].conj();
            }
        }
        Isometry { m }
    }
}

impl Mul for Isometry {
    type Output = Isometry;

    fn mul(self, rhs: Isometry) -> Isometry {
        let mut m = [[ZERO; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..3).map(|k| self.m[i][k] * rhs.m[k][j]).sum();
            }
        }
        Isometry { m }
    }
}

/// Action on the boundary through standard lifts.
pub fn apply(g: &Isometry, p: &BoundaryPoint) -> Result<BoundaryPoint> {
    project(&g.act(&standard_lift(p)))
}

/// Matrix realisation of a Heisenberg generator.
///
/// The inversion is the swap of the first and third coordinates with middle
/// entry `+1`; the `-1` variant conjugates `z`.
pub fn heis_matrix(kind: HeisenbergGenerator) -> Result<Isometry> {
    let r2 = std::f64::consts::SQRT_2;
    let m = match kind {
        HeisenbergGenerator::Translation { w, s } => [
            [ONE, -w.conj() * r2, Complex64::new(-w.norm_sqr(), s)],
            [ZERO, ONE, w * r2],
            [ZERO, ZERO, ONE],
        ],
        HeisenbergGenerator::Rotation { angle } => [
            [ONE, ZERO, ZERO],
            [ZERO, Complex64::from_polar(1.0, angle), ZERO],
            [ZERO, ZERO, ONE],
        ],
        HeisenbergGenerator::Dilation { scale } => {
            if !(scale > 0.0) {
                return Err(GeometryError::NonPositiveDilation(scale));
            }
            [
                [Complex64::new(scale, 0.0), ZERO, ZERO],
                [ZERO, ONE, ZERO],
                [ZERO, ZERO, Complex64::new(1.0 / scale, 0.0)],
            ]
        }
        HeisenbergGenerator::Inversion => [[ZERO, ZERO, ONE], [ZERO, ONE, ZERO], [ONE, ZERO, ZERO]],
    };
    Ok(Isometry { m })
}

/// Result of [`normalize_quadruple`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedQuadruple {
    pub isometry: Isometry,
    pub points: Quadruple,
    /// `|<p2, p3>| / (|p2| |p3|)` for the standard lifts.
    pub conditioning: f64,
}

impl NormalizedQuadruple {
    pub fn is_ill_conditioned(&self) -> bool {
        self.conditioning < 1e-8
    }
}

fn cross(a: [Complex64; 3], b: [Complex64; 3]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Sends `p2` to infinity and `p3` to the origin, then rescales and rotates so
/// that `p1 = (sqrt(cos A4) e^{-i A3}, sin A4)`.
pub fn normalize_quadruple(q: &Quadruple) -> Result<NormalizedQuadruple> {
    let l2 = standard_lift(&q[1]);
    let l3_raw = standard_lift(&q[2]);
    let pairing = herm(&l2, &l3_raw);
    let conditioning = pairing.norm() / (l2.norm() * l3_raw.norm());
    if conditioning < tolerances::COINCIDENT {
        return Err(GeometryError::CoincidentPoints(1, 2));
    }
    let l3 = l3_raw.scale(ONE / pairing.conj());

    // Middle vector: form-orthogonal to both frame vectors, of unit square norm.
    let flip = |v: &Lift| [v.0[2].conj(), v.0[1].conj(), v.0[0].conj()];
    let mut e = Lift(cross(flip(&l2), flip(&l3)));
    let square = herm(&e, &e).re;
    if !(square > 0.0) {
        return Err(GeometryError::CoincidentPoints(1, 2));
    }
    e = e.scale(Complex64::new(1.0 / square.sqrt(), 0.0));
    let en = e.norm();
    if let Some(lead) = e.0.iter().find(|c| c.norm() > 1e-12 * en) {
        let phase = lead.conj() / lead.norm();
        e = e.scale(phase);
    }

    let mut frame = [[ZERO; 3]; 3];
    for i in 0..3 {
        frame[i] = [l2.0[i], e.0[i], l3.0[i]];
    }
    let to_frame = Isometry { m: frame }.form_inverse();

    let p1 = apply(&to_frame, &q[0])?;
    let g = gauge(&p1)?.0.norm();
    let scale = 1.0 / g.sqrt();
    let (z1, _) = p1.coords().ok_or(GeometryError::CoincidentPoints(0, 1))?;
    let scaled = z1 * scale;
    if scaled.norm_sqr() < tolerances::DEFAULT_TOL {
        return Err(GeometryError::NormalizationDegenerate);
    }
    let a3 = cartan(&q[0], &q[1], &q[3])?;
    let angle = -a3 - scaled.arg();
    let similarity =
        heis_matrix(HeisenbergGenerator::Rotation { angle })? * heis_matrix(HeisenbergGenerator::Dilation { scale })?;
    let isometry = similarity * to_frame;
    let mut points = *q;
    for (out, p) in points.iter_mut().zip(q.iter()) {
        *out = apply(&isometry, p)?;
    }
    // The frame points are exact by construction.
    points[1] = BoundaryPoint::Infinity;
    points[2] = BoundaryPoint::ORIGIN;
    Ok(NormalizedQuadruple {
        isometry,
        points,
        conditioning,
    })
}
