//! The cross-ratio variety in `C^3`: defining residuals, singular sets, the
//! involution, the CR generator and the Levi form.
//!
//! Points are triples `(zeta1, zeta2, zeta3)` identified with `(X1, X2, X3)`.
//! The defining functions are
//!
//! ```text
//! F1 = |zeta2|^2 - |zeta1|^2 |zeta3|^2
//! F2 = |zeta1|^2 + |zeta2|^2 - 2 Re(zeta1 + zeta2) + 1 - 2 |zeta1|^2 Re(zeta3)
//! ```

use num_complex::Complex64;

use crate::error::{GeometryError, Result};
use crate::invariants::CrossRatios;
use crate::tolerances;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A candidate point `(zeta1, zeta2, zeta3)` with nonzero components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarietyPoint {
    pub zeta: [Complex64; 3],
}

impl VarietyPoint {
    pub fn new(zeta1: Complex64, zeta2: Complex64, zeta3: Complex64) -> Result<Self> {
        let zeta = [zeta1, zeta2, zeta3];
        if zeta.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(GeometryError::NonFinite("variety point"));
        }
        if zeta.iter().any(|z| z.norm() == 0.0) {
            return Err(GeometryError::ZeroComponent);
        }
        Ok(VarietyPoint { zeta })
    }

    pub fn from_cross_ratios(x: &CrossRatios) -> Result<Self> {
        Self::new(x.x1, x.x2, x.x3)
    }

    pub fn z1(&self) -> Complex64 {
        self.zeta[0]
    }

    pub fn z2(&self) -> Complex64 {
        self.zeta[1]
    }

    pub fn z3(&self) -> Complex64 {
        self.zeta[2]
    }

    /// `1 + |zeta1|^2 + |zeta2|^2 + |zeta3|^2`.
    pub fn scale(&self) -> f64 {
        1.0 + self.zeta.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn as_cross_ratios(&self) -> CrossRatios {
        CrossRatios {
            x1: self.zeta[0],
            x2: self.zeta[1],
            x3: self.zeta[2],
        }
    }
}

/// `(F1, F2)` at `v`.
pub fn residuals(v: &VarietyPoint) -> (f64, f64) {
    let [z1, z2, z3] = v.zeta;
    let (a1, a2, a3) = (z1.norm_sqr(), z2.norm_sqr(), z3.norm_sqr());
    let f1 = a2 - a1 * a3;
    let f2 = a1 + a2 - 2.0 * (z1.re + z2.re) + 1.0 - 2.0 * a1 * z3.re;
    (f1, f2)
}

/// `(F1, F2)` divided by `1 + |zeta|^2`.
pub fn normalized_residuals(v: &VarietyPoint) -> (f64, f64) {
    let (f1, f2) = residuals(v);
    let s = v.scale();
    (f1 / s, f2 / s)
}

/// Fails with [`GeometryError::OffVariety`] when a normalised residual exceeds `tol`.
pub fn ensure_on_variety(v: &VarietyPoint, tol: f64) -> Result<()> {
    let (r1, r2) = normalized_residuals(v);
    if r1.abs() > tol || r2.abs() > tol {
        return Err(GeometryError::OffVariety(r1, r2));
    }
    Ok(())
}

/// The involution conjugating the third slot.
pub fn involution_t(v: &VarietyPoint) -> VarietyPoint {
    VarietyPoint {
        zeta: [v.zeta[0], v.zeta[1], v.zeta[2].conj()],
    }
}

/// Rows `dF_i / d zeta_j` (Wirtinger derivatives).
pub fn d10(v: &VarietyPoint) -> [[Complex64; 3]; 2] {
    let [z1, z2, z3] = v.zeta;
    let a1 = z1.norm_sqr();
    [
        [-z1.conj() * z3.norm_sqr(), z2.conj(), -z3.conj() * a1],
        [
            z1.conj() - ONE - z1.conj() * (2.0 * z3.re),
            z2.conj() - ONE,
            Complex64::new(-a1, 0.0),
        ],
    ]
}

/// Real 2x6 Jacobian in coordinates `(x1, y1, x2, y2, x3, y3)`.
pub fn real_jacobian(v: &VarietyPoint) -> [[f64; 6]; 2] {
    let w = d10(v);
    let mut out = [[0.0; 6]; 2];
    for (row, wrow) in out.iter_mut().zip(w.iter()) {
        for (j, d) in wrow.iter().enumerate() {
            row[2 * j] = 2.0 * d.re;
            row[2 * j + 1] = -2.0 * d.im;
        }
    }
    out
}

/// `(sigma_max, sigma_min)` of a real 2 x n matrix.
///
/// `sigma_max sigma_min` is evaluated from the 2x2 minors, which keeps the
/// small singular value accurate near rank one.
pub fn singular_values_2xn(rows: &[[f64; 6]; 2]) -> (f64, f64) {
    let [r, s] = rows;
    let rr: f64 = r.iter().map(|x| x * x).sum();
    let ss: f64 = s.iter().map(|x| x * x).sum();
    let rs: f64 = r.iter().zip(s).map(|(a, b)| a * b).sum();
    let mut minors = 0.0;
    for i in 0..6 {
        for j in i + 1..6 {
            let m = r[i] * s[j] - r[j] * s[i];
            minors += m * m;
        }
    }
    let tr = rr + ss;
    let disc = ((rr - ss) * (rr - ss) + 4.0 * rs * rs).sqrt();
    let smax = ((tr + disc) / 2.0).sqrt();
    let smin = if smax > 0.0 { minors.sqrt() / smax } else { 0.0 };
    (smax, smin)
}

/// Numerical rank of the real Jacobian with relative threshold `tol`.
pub fn jacobian_real_rank(v: &VarietyPoint, tol: f64) -> usize {
    let (smax, smin) = singular_values_2xn(&real_jacobian(v));
    if smax == 0.0 {
        0
    } else if smin > tol * smax {
        2
    } else {
        1
    }
}

/// The minors `(D23, D31, D12)` of the `(1,0)` Jacobian: coefficients of the CR
/// generator `Z = D23 d/dzeta1 + D31 d/dzeta2 + D12 d/dzeta3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrGenerator {
    pub d23: Complex64,
    pub d31: Complex64,
    pub d12: Complex64,
}

impl CrGenerator {
    pub fn as_array(&self) -> [Complex64; 3] {
        [self.d23, self.d31, self.d12]
    }

    pub fn norm(&self) -> f64 {
        self.as_array().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Closed-form minors at an arbitrary triple (no variety check).
pub fn minors_at(z1: Complex64, z2: Complex64, z3: Complex64) -> CrGenerator {
    let (b1, b2, b3) = (z1.conj(), z2.conj(), z3.conj());
    CrGenerator {
        d23: (b2 * b3 - b2 - b3) * (z2.norm_sqr() / z3.norm_sqr()),
        d31: b3 * z1.norm_sqr() * (ONE + b1 * b3 - b1),
        d12: b2 / z1 * (ONE - b1 - b2),
    }
}

/// `D23 = (|z2|^2/|z3|^2)(b2 b3 - b2 - b3)`, `D31 = b3 |z1|^2 (1 + b1 b3 - b1)`,
/// `D12 = (b2 / z1)(1 - b1 - b2)`, with `b = conj(zeta)`.
pub fn minors(v: &VarietyPoint) -> CrGenerator {
    minors_at(v.zeta[0], v.zeta[1], v.zeta[2])
}

/// Minors computed directly from [`d10`]; equal to [`minors`] on the variety.
pub fn minors_from_d10(v: &VarietyPoint) -> CrGenerator {
    let m = d10(v);
    let det = |i: usize, j: usize| m[0][i] * m[1][j] - m[0][j] * m[1][i];
    CrGenerator {
        d23: det(1, 2),
        d31: det(2, 0),
        d12: det(0, 1),
    }
}

/// The image of the generator under the involution: minors evaluated at
/// `(zeta1, zeta2, conj zeta3)`, the third slot attached to `d/d conj(zeta3)`.
pub fn w_generator(v: &VarietyPoint) -> CrGenerator {
    minors_at(v.zeta[0], v.zeta[1], v.zeta[2].conj())
}

/// `|D23/zeta1 - D31/zeta2 + D12/zeta3|`.
pub fn symmetric_residual(v: &VarietyPoint) -> f64 {
    let g = minors(v);
    let [z1, z2, z3] = v.zeta;
    (g.d23 / z1 - g.d31 / z2 + g.d12 / z3).norm()
}

/// Membership flags for the singular sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SingularFlags {
    pub in_xr: bool,
    pub in_xcr: bool,
    pub in_xcr_star: bool,
    pub in_xc: bool,
    pub in_xc1: bool,
    pub in_xc2: bool,
}

/// Normalised residuals of each defining equation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SingularResiduals {
    /// `|zeta1 + zeta2 - 1|`, `|1/zeta2 + 1/zeta3 - 1|`, `|zeta3 + 1/zeta1 - 1|`.
    pub xcr: [f64; 3],
    /// The same with `conj zeta3`.
    pub xcr_star: [f64; 3],
    /// `|Im zeta_i|`.
    pub imaginary: [f64; 3],
    /// `|(|z1| - |z2|)^2 - (2 Re(z1 + z2) - 1)|`.
    pub xc1: f64,
    /// `|(|z1| + |z2|)^2 - (2 Re(z1 + z2) - 1)|`.
    pub xc2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub flags: SingularFlags,
    pub residuals: SingularResiduals,
}

fn cr_equations(z1: Complex64, z2: Complex64, z3: Complex64) -> [f64; 3] {
    [
        (z1 + z2 - ONE).norm(),
        (ONE / z2 + ONE / z3 - ONE).norm(),
        (z3 + ONE / z1 - ONE).norm(),
    ]
}

/// Normalised residuals of the singular-set equations (no variety check).
pub fn singular_residuals(v: &VarietyPoint) -> SingularResiduals {
    let s = v.scale();
    let [z1, z2, z3] = v.zeta;
    let lin = 2.0 * (z1.re + z2.re) - 1.0;
    let (m1, m2) = (z1.norm(), z2.norm());
    SingularResiduals {
        xcr: cr_equations(z1, z2, z3).map(|r| r / s),
        xcr_star: cr_equations(z1, z2, z3.conj()).map(|r| r / s),
        imaginary: v.zeta.map(|z| z.im.abs() / s),
        xc1: ((m1 - m2).powi(2) - lin).abs() / s,
        xc2: ((m1 + m2).powi(2) - lin).abs() / s,
    }
}

/// Classifies an on-variety point with membership band `tol`.
pub fn classify(v: &VarietyPoint, tol: f64) -> Result<Classification> {
    ensure_on_variety(v, tol)?;
    let r = singular_residuals(v);
    let in_xcr = r.xcr.iter().all(|x| *x < tol);
    let in_xcr_star = r.xcr_star.iter().all(|x| *x < tol);
    let real = r.imaginary.iter().all(|x| *x < tol);
    let in_xc = r.imaginary[2] < tol;
    let (in_xc1, in_xc2) = if !in_xc {
        (false, false)
    } else if r.xc1 < tol && r.xc2 < tol {
        (true, true)
    } else {
        (r.xc1 <= r.xc2, r.xc2 < r.xc1)
    };
    Ok(Classification {
        flags: SingularFlags {
            in_xr: real && in_xcr,
            in_xcr,
            in_xcr_star,
            in_xc,
            in_xc1,
            in_xc2,
        },
        residuals: r,
    })
}

/// Hessians `d^2 F_i / d zeta_j d conj(zeta_k)`, indexed `[j][k]`.
pub fn hessians(v: &VarietyPoint) -> [[[Complex64; 3]; 3]; 2] {
    let [z1, _, z3] = v.zeta;
    let zero = Complex64::new(0.0, 0.0);
    let h1 = [
        [Complex64::new(-z3.norm_sqr(), 0.0), zero, -z1.conj() * z3],
        [zero, ONE, zero],
        [-z1 * z3.conj(), zero, Complex64::new(-z1.norm_sqr(), 0.0)],
    ];
    let h2 = [
        [Complex64::new(1.0 - 2.0 * z3.re, 0.0), zero, -z1.conj()],
        [zero, ONE, zero],
        [-z1, zero, zero],
    ];
    [h1, h2]
}

/// `sum_{j,k} g_j H[j][k] conj(g_k)`.
pub fn sandwich(g: &[Complex64; 3], h: &[[Complex64; 3]; 3]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..3 {
        for k in 0..3 {
            acc += g[j] * h[j][k] * g[k].conj();
        }
    }
    acc.re
}

/// Levi form of the codimension-two CR structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Levi {
    pub l1: f64,
    pub l2: f64,
}

/// Levi form from the expanded minor formulas
///
/// ```text
/// L1 = |D31|^2 - |zeta1 D12 + zeta3 D23|^2
/// L2 = (1 - 2 Re zeta3)|D23|^2 + |D31|^2 - 2 Re(conj(zeta1) D23 conj(D12))
/// ```
///
/// Both equal the sandwich `Z H_i conj(Z)`; on the variety `L1 = 0` and
/// `L2 = |zeta1|^2 |zeta2 + zeta3 zeta1|^2`.
pub fn levi(v: &VarietyPoint) -> Result<Levi> {
    let r = singular_residuals(v);
    if r.xcr.iter().all(|x| *x < tolerances::SET_MEMBERSHIP) {
        return Err(GeometryError::LeviDegenerate);
    }
    let g = minors(v);
    let [z1, _, z3] = v.zeta;
    let l1 = g.d31.norm_sqr() - (z1 * g.d12 + z3 * g.d23).norm_sqr();
    let l2 = (1.0 - 2.0 * z3.re) * g.d23.norm_sqr() + g.d31.norm_sqr() - 2.0 * (z1.conj() * g.d23 * g.d12.conj()).re;
    Ok(Levi { l1, l2 })
}

/// `|zeta1|^2 |zeta2 + zeta3 zeta1|^2`, the value of `L2` on the variety.
pub fn levi_l2_sum_form(v: &VarietyPoint) -> f64 {
    let [z1, z2, z3] = v.zeta;
    z1.norm_sqr() * (z2 + z3 * z1).norm_sqr()
}

/// `|zeta1|^2 |zeta2 - zeta3 zeta1|^2`.
///
/// Differs from `L2` away from the locus `Re(zeta2 conj(zeta3 zeta1)) = 0`;
/// kept as a named quantity for comparison.
pub fn levi_l2_difference_form(v: &VarietyPoint) -> f64 {
    let [z1, z2, z3] = v.zeta;
    z1.norm_sqr() * (z2 - z3 * z1).norm_sqr()
}

/// Expansion with the cross term conjugated the other way,
/// `-2 Re(conj(zeta1) D12 conj(D23))`. This is `conj(Z) H_2 Z`, which is not
/// the Levi form and takes negative values on the variety.
pub fn levi_l2_mirror_expansion(v: &VarietyPoint) -> f64 {
    let g = minors(v);
    let [z1, _, z3] = v.zeta;
    (1.0 - 2.0 * z3.re) * g.d23.norm_sqr() + g.d31.norm_sqr() - 2.0 * (z1.conj() * g.d12 * g.d23.conj()).re
}

/// Defining function of the domain `P`: `(|z1| - |z2|)^2 - 2 Re(z1 + z2) + 1`.
pub fn p_defining(zeta1: Complex64, zeta2: Complex64) -> f64 {
    (zeta1.norm() - zeta2.norm()).powi(2) - 2.0 * (zeta1.re + zeta2.re) + 1.0
}

/// Strict membership in `P`.
pub fn in_p(zeta1: Complex64, zeta2: Complex64) -> bool {
    p_defining(zeta1, zeta2) < 0.0
}

/// `1 + Re(zeta1 conj(zeta2)) / (|zeta1| |zeta2|)`.
pub fn levi_p(zeta1: Complex64, zeta2: Complex64) -> Result<f64> {
    let (m1, m2) = (zeta1.norm(), zeta2.norm());
    if m1 == 0.0 || m2 == 0.0 {
        return Err(GeometryError::ZeroComponent);
    }
    Ok(1.0 + (zeta1 * zeta2.conj()).re / (m1 * m2))
}

/// Two candidate identities for configurations on an R-circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RCircleCandidates {
    /// `|(X1 - X2)^2 - (2 X1 + X2 - 1)|`.
    pub single_x2: f64,
    /// `|(X1 - X2)^2 - (2 X1 + 2 X2 - 1)|`.
    pub double_x2: f64,
}

pub fn r_circle_candidates(x: &CrossRatios) -> RCircleCandidates {
    let d = (x.x1 - x.x2) * (x.x1 - x.x2);
    RCircleCandidates {
        single_x2: (d - (x.x1 * 2.0 + x.x2 - ONE)).norm(),
        double_x2: (d - (x.x1 * 2.0 + x.x2 * 2.0 - ONE)).norm(),
    }
}
