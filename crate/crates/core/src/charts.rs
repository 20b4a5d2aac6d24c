//! The two chart systems on the open set `Im zeta3 != 0`, their transition map
//! and numerical checks of the pseudoconformal (psc) and strictly psc (spsc)
//! conditions.
//!
//! * J-charts: `z = (zeta1 + zeta2/zeta3)/(zeta1 + zeta2 - 1)` on `CP^1` and `w = zeta3`.
//! * I-charts: `(zeta1, zeta2)` in the domain `P` plus the sheet `sign(Im zeta3)`,
//!   with `zeta3 = (|zeta2|/|zeta1|) e^{+-i theta}`.

use num_complex::Complex64;

use crate::error::{GeometryError, Result};
use crate::tolerances;
use crate::variety::{self, CrGenerator, VarietyPoint};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A point of `CP^1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProjectiveZ {
    Finite(Complex64),
    Infinity,
}

impl ProjectiveZ {
    pub fn recip(self) -> ProjectiveZ {
        match self {
            ProjectiveZ::Infinity => ProjectiveZ::Finite(Complex64::new(0.0, 0.0)),
            ProjectiveZ::Finite(z) if z.norm() == 0.0 => ProjectiveZ::Infinity,
            ProjectiveZ::Finite(z) => ProjectiveZ::Finite(ONE / z),
        }
    }

    pub fn conj(self) -> ProjectiveZ {
        match self {
            ProjectiveZ::Finite(z) => ProjectiveZ::Finite(z.conj()),
            ProjectiveZ::Infinity => ProjectiveZ::Infinity,
        }
    }

    /// Chart containing the point: `N0` for `|z| <= 1`, `Ninf` otherwise.
    pub fn chart(self) -> JChart {
        match self {
            ProjectiveZ::Finite(z) if z.norm() <= 1.0 => JChart::Zero,
            _ => JChart::Infinity,
        }
    }

    /// Coordinate in the given chart (`z` or `1/z`).
    pub fn local(self, chart: JChart) -> ProjectiveZ {
        match chart {
            JChart::Zero => self,
            JChart::Infinity => self.recip(),
        }
    }
}

/// Which affine chart of `CP^1` carries the `z` coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JChart {
    /// Coordinate `z`.
    Zero,
    /// Coordinate `1/z`.
    Infinity,
}

/// J-chart coordinates `(z, w)`, `Im w != 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPointJ {
    pub z: ProjectiveZ,
    pub w: Complex64,
}

/// Component of `Im zeta3 != 0` carrying an I-chart point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    Upper,
    Lower,
}

impl Sheet {
    pub fn sign(self) -> f64 {
        match self {
            Sheet::Upper => 1.0,
            Sheet::Lower => -1.0,
        }
    }

    pub fn flipped(self) -> Sheet {
        match self {
            Sheet::Upper => Sheet::Lower,
            Sheet::Lower => Sheet::Upper,
        }
    }
}

/// I-chart coordinates: `(zeta1, zeta2)` in `P` and a sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPointI {
    pub zeta1: Complex64,
    pub zeta2: Complex64,
    pub sheet: Sheet,
}

fn require_xstar(v: &VarietyPoint) -> Result<()> {
    let im = v.z3().im;
    if im.abs() <= tolerances::DEFAULT_TOL {
        return Err(GeometryError::NotInXStar(im));
    }
    Ok(())
}

/// `S = zeta1 + zeta2 - 1` and `N = zeta1 + zeta2/zeta3`.
fn j_parts(z1: Complex64, z2: Complex64, z3: Complex64) -> (Complex64, Complex64) {
    (z1 + z2 / z3, z1 + z2 - ONE)
}

/// J-chart image of `v`.
///
/// `S = 0` on the variety only on the CR singular set or its involution image.
/// On the former `N` vanishes too and the coordinate extends continuously by
/// `z = 0`; on the latter `z = infinity`.
pub fn to_chart_j(v: &VarietyPoint) -> Result<ChartPointJ> {
    require_xstar(v)?;
    let (n, s) = j_parts(v.z1(), v.z2(), v.z3());
    let tol = tolerances::DEFAULT_TOL;
    let z = if s.norm() > tol {
        ProjectiveZ::Finite(n / s)
    } else if n.norm() <= tol {
        ProjectiveZ::Finite(Complex64::new(0.0, 0.0))
    } else {
        ProjectiveZ::Infinity
    };
    Ok(ChartPointJ { z, w: v.z3() })
}

/// The involution in J-coordinates: `(z, w) -> (1/(conj w conj z), conj w)`.
pub fn involution_j(c: &ChartPointJ) -> ChartPointJ {
    let z = match c.z {
        ProjectiveZ::Infinity => ProjectiveZ::Finite(Complex64::new(0.0, 0.0)),
        ProjectiveZ::Finite(z) if z.norm() == 0.0 => ProjectiveZ::Infinity,
        ProjectiveZ::Finite(z) => ProjectiveZ::Finite(ONE / (c.w.conj() * z.conj())),
    };
    ChartPointJ { z, w: c.w.conj() }
}

/// The involution in I-coordinates flips the sheet.
pub fn involution_i(c: &ChartPointI) -> ChartPointI {
    ChartPointI {
        sheet: c.sheet.flipped(),
        ..*c
    }
}

/// `theta = arccos(( |z1|^2 + |z2|^2 - 2 Re(z1 + z2) + 1 ) / (2 |z1| |z2|))`, in `(0, pi)`.
pub fn theta(zeta1: Complex64, zeta2: Complex64) -> Result<f64> {
    let (m1, m2) = (zeta1.norm(), zeta2.norm());
    if m1 == 0.0 || m2 == 0.0 {
        return Err(GeometryError::ZeroComponent);
    }
    let c = (m1 * m1 + m2 * m2 - 2.0 * (zeta1.re + zeta2.re) + 1.0) / (2.0 * m1 * m2);
    if !(c > -1.0 && c < 1.0) {
        return Err(GeometryError::DomainNotInP(c));
    }
    Ok(c.acos())
}

pub fn to_chart_i(v: &VarietyPoint) -> Result<ChartPointI> {
    require_xstar(v)?;
    Ok(ChartPointI {
        zeta1: v.z1(),
        zeta2: v.z2(),
        sheet: if v.z3().im > 0.0 { Sheet::Upper } else { Sheet::Lower },
    })
}

pub fn from_chart_i(c: &ChartPointI) -> Result<VarietyPoint> {
    let th = theta(c.zeta1, c.zeta2)?;
    let z3 = Complex64::from_polar(c.zeta2.norm() / c.zeta1.norm(), c.sheet.sign() * th);
    VarietyPoint::new(c.zeta1, c.zeta2, z3)
}

/// First derivatives of `zeta3` and `conj zeta3` along an I-chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zeta3Partials {
    /// `d conj(zeta3) / d zeta1`.
    pub dbar3_d1: Complex64,
    /// `d conj(zeta3) / d zeta2`.
    pub dbar3_d2: Complex64,
    /// `d zeta3 / d zeta1`.
    pub d3_d1: Complex64,
    /// `d zeta3 / d zeta2`.
    pub d3_d2: Complex64,
}

impl Zeta3Partials {
    pub fn as_array(&self) -> [Complex64; 4] {
        [self.dbar3_d1, self.dbar3_d2, self.d3_d1, self.d3_d2]
    }
}

/// Closed forms with denominator `2i Im(zeta3) |zeta1|^4`:
/// `d conj(zeta3)/d zeta1 = D31 / den`, `d conj(zeta3)/d zeta2 = -D23 / den`,
/// and the holomorphic pair from the conjugate-slot minors with the signs swapped.
pub fn zeta3_partials(v: &VarietyPoint) -> Result<Zeta3Partials> {
    require_xstar(v)?;
    let den = I * (2.0 * v.z3().im * v.z1().norm_sqr().powi(2));
    let g = variety::minors(v);
    let b = variety::w_generator(v);
    Ok(Zeta3Partials {
        dbar3_d1: g.d31 / den,
        dbar3_d2: -g.d23 / den,
        d3_d1: -b.d31 / den,
        d3_d2: b.d23 / den,
    })
}

fn perturbed_zeta3(c: &ChartPointI, which: usize, d: Complex64) -> Result<Complex64> {
    let mut p = *c;
    if which == 0 {
        p.zeta1 += d;
    } else {
        p.zeta2 += d;
    }
    Ok(from_chart_i(&p)?.z3())
}

/// Central-difference oracle for [`zeta3_partials`] with absolute step `h`.
pub fn zeta3_partials_fd(v: &VarietyPoint, h: f64) -> Result<Zeta3Partials> {
    let c = to_chart_i(v)?;
    let mut holo = [Complex64::new(0.0, 0.0); 2];
    let mut anti = [Complex64::new(0.0, 0.0); 2];
    for i in 0..2 {
        let fx = (perturbed_zeta3(&c, i, Complex64::new(h, 0.0))? - perturbed_zeta3(&c, i, Complex64::new(-h, 0.0))?)
            / (2.0 * h);
        let fy = (perturbed_zeta3(&c, i, Complex64::new(0.0, h))? - perturbed_zeta3(&c, i, Complex64::new(0.0, -h))?)
            / (2.0 * h);
        holo[i] = (fx - I * fy) * 0.5;
        anti[i] = (fx.conj() - I * fy.conj()) * 0.5;
    }
    Ok(Zeta3Partials {
        dbar3_d1: anti[0],
        dbar3_d2: anti[1],
        d3_d1: holo[0],
        d3_d2: holo[1],
    })
}

/// Absolute residuals of the four chain-rule identities
///
/// ```text
/// (D1) d3_d1 D23  + d3_d2 D31  = D12
/// (D2) db3_d1 D23 + db3_d2 D31 = 0
/// (D3) d3_d1 D23' + d3_d2 D31' = 0
/// (D4) db3_d1 D23' + db3_d2 D31' = D12
/// ```
///
/// where the primed minors carry `conj zeta3` in the third slot.
pub fn identity_residuals(v: &VarietyPoint) -> Result<[f64; 4]> {
    let p = zeta3_partials(v)?;
    let g = variety::minors(v);
    let b = variety::w_generator(v);
    Ok([
        (p.d3_d1 * g.d23 + p.d3_d2 * g.d31 - g.d12).norm(),
        (p.dbar3_d1 * g.d23 + p.dbar3_d2 * g.d31).norm(),
        (p.d3_d1 * b.d23 + p.d3_d2 * b.d31).norm(),
        (p.dbar3_d1 * b.d23 + p.dbar3_d2 * b.d31 - b.d12).norm(),
    ])
}

/// Wirtinger Jacobians of the transition `(zeta1, zeta2) -> (z or 1/z, w)`:
/// `holo[j][i] = d f_j / d zeta_i` and `anti[j][i] = d conj(f_j) / d zeta_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionJacobian {
    pub chart: JChart,
    pub holo: [[Complex64; 2]; 2],
    pub anti: [[Complex64; 2]; 2],
}

impl TransitionJacobian {
    fn combine(a: &Self, b: &Self, wa: f64, wb: f64) -> Self {
        let mix = |x: &[[Complex64; 2]; 2], y: &[[Complex64; 2]; 2]| {
            let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
            for j in 0..2 {
                for i in 0..2 {
                    out[j][i] = x[j][i] * wa + y[j][i] * wb;
                }
            }
            out
        };
        TransitionJacobian {
            chart: a.chart,
            holo: mix(&a.holo, &b.holo),
            anti: mix(&a.anti, &b.anti),
        }
    }
}

/// The transition map in local coordinates. No special-casing of `S = 0`.
pub fn transition(c: &ChartPointI, chart: JChart) -> Result<[Complex64; 2]> {
    let v = from_chart_i(c)?;
    let (n, s) = j_parts(v.z1(), v.z2(), v.z3());
    let z = match chart {
        JChart::Zero => n / s,
        JChart::Infinity => s / n,
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(GeometryError::NonFinite("transition map"));
    }
    Ok([z, v.z3()])
}

/// Central differences with the scale-relative step `h |zeta_i|`.
pub fn transition_jacobian_fd(c: &ChartPointI, chart: JChart, h: f64) -> Result<TransitionJacobian> {
    let zero = Complex64::new(0.0, 0.0);
    let mut out = TransitionJacobian {
        chart,
        holo: [[zero; 2]; 2],
        anti: [[zero; 2]; 2],
    };
    for i in 0..2 {
        let base = if i == 0 { c.zeta1 } else { c.zeta2 };
        let hi = h * base.norm().max(f64::MIN_POSITIVE);
        let eval = |d: Complex64| -> Result<[Complex64; 2]> {
            let mut p = *c;
            if i == 0 {
                p.zeta1 += d;
            } else {
                p.zeta2 += d;
            }
            transition(&p, chart)
        };
        let (xp, xm) = (eval(Complex64::new(hi, 0.0))?, eval(Complex64::new(-hi, 0.0))?);
        let (yp, ym) = (eval(Complex64::new(0.0, hi))?, eval(Complex64::new(0.0, -hi))?);
        for j in 0..2 {
            let fx = (xp[j] - xm[j]) / (2.0 * hi);
            let fy = (yp[j] - ym[j]) / (2.0 * hi);
            out.holo[j][i] = (fx - I * fy) * 0.5;
            out.anti[j][i] = (fx.conj() - I * fy.conj()) * 0.5;
        }
    }
    Ok(out)
}

/// Richardson combination of the steps `h` and `h/2`.
pub fn transition_jacobian_richardson(c: &ChartPointI, chart: JChart, h: f64) -> Result<TransitionJacobian> {
    let coarse = transition_jacobian_fd(c, chart, h)?;
    let fine = transition_jacobian_fd(c, chart, h / 2.0)?;
    Ok(TransitionJacobian::combine(&fine, &coarse, 4.0 / 3.0, -1.0 / 3.0))
}

/// Transition Jacobian from [`zeta3_partials`] and the chain rule.
///
/// Fails where the local coordinate is a `0/0` quotient.
pub fn transition_jacobian_analytic(v: &VarietyPoint, chart: JChart) -> Result<TransitionJacobian> {
    let p = zeta3_partials(v)?;
    let (z1, z2, z3) = (v.z1(), v.z2(), v.z3());
    let (n, s) = j_parts(z1, z2, z3);
    let k = -z2 / (z3 * z3);
    // dN/dzeta_i and dN/dconj(zeta_i); S is holomorphic with unit derivatives.
    let dn = [ONE + k * p.d3_d1, ONE / z3 + k * p.d3_d2];
    let dn_bar = [k * p.dbar3_d1.conj(), k * p.dbar3_d2.conj()];
    let (num, den) = match chart {
        JChart::Zero => (n, s),
        JChart::Infinity => (s, n),
    };
    if den.norm() <= tolerances::DEFAULT_TOL * (1.0 + num.norm()) {
        return Err(GeometryError::HypothesisFailed("transition quotient is singular"));
    }
    let f = num / den;
    let mut holo = [[Complex64::new(0.0, 0.0); 2]; 2];
    let mut anti = holo;
    for i in 0..2 {
        // Quotient rule for f = num/den with d(num), d(den) from dn and dS = 1.
        let (dnum, dden, dnum_bar, dden_bar) = match chart {
            JChart::Zero => (dn[i], ONE, dn_bar[i], Complex64::new(0.0, 0.0)),
            JChart::Infinity => (ONE, dn[i], Complex64::new(0.0, 0.0), dn_bar[i]),
        };
        holo[0][i] = (dnum - f * dden) / den;
        anti[0][i] = ((dnum_bar - f * dden_bar) / den).conj();
    }
    holo[1] = [p.d3_d1, p.d3_d2];
    anti[1] = [p.dbar3_d1, p.dbar3_d2];
    Ok(TransitionJacobian { chart, holo, anti })
}

fn det2(m: &[[Complex64; 2]; 2]) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Singular values `(sigma_max, sigma_min)` of a complex 2x2 matrix.
pub fn singular_values_2x2(m: &[[Complex64; 2]; 2]) -> (f64, f64) {
    let fro: f64 = m.iter().flatten().map(|z| z.norm_sqr()).sum();
    let d = det2(m).norm();
    let disc = (fro * fro - 4.0 * d * d).max(0.0).sqrt();
    let smax = ((fro + disc) / 2.0).sqrt();
    let smin = if smax > 0.0 { d / smax } else { 0.0 };
    (smax, smin)
}

fn apply2(m: &[[Complex64; 2]; 2], v: &[Complex64; 2]) -> f64 {
    m.iter()
        .map(|row| (row[0] * v[0] + row[1] * v[1]).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// I-chart generators `Z^I = (D23, D31)` and `W^I` (conjugate-slot minors).
pub fn chart_generators(v: &VarietyPoint) -> ([Complex64; 2], [Complex64; 2]) {
    let g = variety::minors(v);
    let b = variety::w_generator(v);
    ([g.d23, g.d31], [b.d23, b.d31])
}

fn chart_for(v: &VarietyPoint) -> Result<JChart> {
    Ok(to_chart_j(v)?.z.chart())
}

/// Ratio `det(h) / det(h/2)` of the unextrapolated determinants expected near 4.
pub const DECAY_RATIO_RANGE: (f64, f64) = (3.0, 5.0);

/// Relative floor below which an unextrapolated determinant is roundoff.
pub const DECAY_NOISE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PscReport {
    pub chart: JChart,
    /// `|det D^(0,1)|` from the extrapolated Jacobian.
    pub det_d01: f64,
    pub rank_d01: usize,
    pub singular_values: (f64, f64),
    /// Unextrapolated determinants at `h` and `h/2`.
    pub det_plain: (f64, f64),
    pub decay_ratio: f64,
    pub decay_ok: bool,
    /// `|det|` of the chain-rule Jacobian, when the quotient is regular.
    pub analytic_det: Option<f64>,
    /// Largest entry gap between the difference and chain-rule Jacobians.
    pub route_gap: Option<f64>,
    /// `|(d conj(w)/d zeta1, d conj(w)/d zeta2)|`; vanishes with the generator.
    pub conj_w_row_norm: f64,
    pub generator_norm: f64,
    pub ill_conditioned: bool,
    pub passed: bool,
}

/// Differentiates the transition numerically and checks `det D^(0,1) = 0` with
/// rank one off the CR singular set.
pub fn verify_psc(v: &VarietyPoint, h: f64, tol: f64) -> Result<PscReport> {
    let c = to_chart_i(v)?;
    let chart = chart_for(v)?;
    let coarse = transition_jacobian_fd(&c, chart, h)?;
    let fine = transition_jacobian_fd(&c, chart, h / 2.0)?;
    let rich = TransitionJacobian::combine(&fine, &coarse, 4.0 / 3.0, -1.0 / 3.0);
    let det = det2(&rich.anti).norm();
    let sv = singular_values_2x2(&rich.anti);
    let rank = [sv.0, sv.1].iter().filter(|s| **s > tol * sv.0.max(1.0)).count();
    let det_plain = (det2(&coarse.anti).norm(), det2(&fine.anti).norm());
    let decay_ratio = det_plain.0 / det_plain.1;
    let floor = DECAY_NOISE_FLOOR * sv.0.max(1.0).powi(2);
    let decay_ok = det_plain.1 <= floor || (DECAY_RATIO_RANGE.0..=DECAY_RATIO_RANGE.1).contains(&decay_ratio);
    let analytic = transition_jacobian_analytic(v, chart).ok();
    let route_gap = analytic.map(|a| {
        a.anti
            .iter()
            .flatten()
            .zip(rich.anti.iter().flatten())
            .chain(a.holo.iter().flatten().zip(rich.holo.iter().flatten()))
            .map(|(x, y)| (x - y).norm() / (1.0 + x.norm()))
            .fold(0.0, f64::max)
    });
    let (zi, _) = chart_generators(v);
    let generator_norm = (zi[0].norm_sqr() + zi[1].norm_sqr()).sqrt();
    let ill_conditioned = generator_norm < tolerances::ILL_CONDITIONED_GENERATOR;
    let passed = det < tol && decay_ok && (ill_conditioned || rank == 1);
    Ok(PscReport {
        chart,
        det_d01: det,
        rank_d01: rank,
        singular_values: sv,
        det_plain,
        decay_ratio,
        decay_ok,
        analytic_det: analytic.map(|a| det2(&a.anti).norm()),
        route_gap,
        conj_w_row_norm: (rich.anti[1][0].norm_sqr() + rich.anti[1][1].norm_sqr()).sqrt(),
        generator_norm,
        ill_conditioned,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpscReport {
    /// `|D^(0,1) Z^I|`: the horizontal generator lands holomorphically.
    pub h_antiholo_residual: f64,
    /// `|D^(1,0) W^I|`: the vertical generator lands antiholomorphically.
    pub v_holo_residual: f64,
    pub analytic_residuals: Option<(f64, f64)>,
    pub ill_conditioned: bool,
    pub passed: bool,
}

pub fn verify_spsc_split(v: &VarietyPoint, h: f64, tol: f64) -> Result<SpscReport> {
    let c = to_chart_i(v)?;
    let chart = chart_for(v)?;
    let jac = transition_jacobian_richardson(&c, chart, h)?;
    let (zi, wi) = chart_generators(v);
    let hr = apply2(&jac.anti, &zi);
    let vr = apply2(&jac.holo, &wi);
    let analytic = transition_jacobian_analytic(v, chart)
        .ok()
        .map(|a| (apply2(&a.anti, &zi), apply2(&a.holo, &wi)));
    let norm = |x: &[Complex64; 2]| (x[0].norm_sqr() + x[1].norm_sqr()).sqrt();
    let ill_conditioned = norm(&zi).min(norm(&wi)) < tolerances::ILL_CONDITIONED_GENERATOR;
    Ok(SpscReport {
        h_antiholo_residual: hr,
        v_holo_residual: vr,
        analytic_residuals: analytic,
        ill_conditioned,
        passed: hr < tol && vr < tol,
    })
}

/// Residuals of the pushforwards of `Z^I`, `W^I` under the inclusion against
/// the three-minor vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingReport {
    /// Largest gap between `i_* Z^I` and `(D23, D31, D12)` (with zero `d/d conj xi3` part).
    pub z_residual: f64,
    /// Largest gap between `i_* W^I` and `(D23', D31', 0)` with `D12` on `d/d conj xi3`.
    pub w_residual: f64,
}

/// Components of `a d/dzeta1 + b d/dzeta2` pushed into `C^3`:
/// `[d/dxi1, d/dxi2, d/dxi3, d/d conj(xi3)]`.
fn push_forward(p: &Zeta3Partials, a: Complex64, b: Complex64) -> [Complex64; 4] {
    [a, b, a * p.d3_d1 + b * p.d3_d2, a * p.dbar3_d1 + b * p.dbar3_d2]
}

pub fn verify_embedding_pushforward(v: &VarietyPoint) -> Result<EmbeddingReport> {
    let p = zeta3_partials(v)?;
    let g: CrGenerator = variety::minors(v);
    let b: CrGenerator = variety::w_generator(v);
    let zero = Complex64::new(0.0, 0.0);
    let gap = |x: [Complex64; 4], y: [Complex64; 4]| x.iter().zip(&y).map(|(u, w)| (u - w).norm()).fold(0.0, f64::max);
    Ok(EmbeddingReport {
        z_residual: gap(push_forward(&p, g.d23, g.d31), [g.d23, g.d31, g.d12, zero]),
        w_residual: gap(push_forward(&p, b.d23, b.d31), [b.d23, b.d31, zero, b.d12]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerances::{FD_STEP, FD_TOL};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn q2() -> VarietyPoint {
        VarietyPoint::new(c(1.0 / 41.0, 9.0 / 41.0), c(24.0 / 41.0, 11.0 / 41.0), c(2.5, 1.5)).unwrap()
    }

    fn xcr() -> VarietyPoint {
        VarietyPoint::new(c(1.0, 1.0), c(0.0, -1.0), c(0.5, 0.5)).unwrap()
    }

    #[test]
    fn chart_j_examples() {
        let j = to_chart_j(&q2()).unwrap();
        match j.z {
            ProjectiveZ::Finite(z) => assert!((z - c(0.0, -0.5)).norm() < 1e-15),
            ProjectiveZ::Infinity => panic!("finite expected"),
        }
        assert_eq!(j.w, c(2.5, 1.5));
        // On the CR singular set both N and S vanish; the coordinate is 0.
        assert_eq!(to_chart_j(&xcr()).unwrap().z, ProjectiveZ::Finite(c(0.0, 0.0)));
        let star = variety::involution_t(&xcr());
        assert_eq!(to_chart_j(&star).unwrap().z, ProjectiveZ::Infinity);
        let real = VarietyPoint::new(c(2.0, 0.0), c(-1.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!(matches!(to_chart_j(&real), Err(GeometryError::NotInXStar(_))));
    }

    #[test]
    fn involution_in_j_coordinates() {
        let lhs = to_chart_j(&variety::involution_t(&q2())).unwrap();
        let rhs = involution_j(&to_chart_j(&q2()).unwrap());
        assert_eq!(lhs.w, rhs.w);
        match (lhs.z, rhs.z) {
            (ProjectiveZ::Finite(a), ProjectiveZ::Finite(b)) => assert!((a - b).norm() < 1e-14),
            _ => panic!("finite expected"),
        }
        assert_eq!(involution_j(&to_chart_j(&xcr()).unwrap()).z, ProjectiveZ::Infinity);
    }

    #[test]
    fn chart_i_examples() {
        let v = q2();
        let ci = to_chart_i(&v).unwrap();
        assert_eq!(ci.sheet, Sheet::Upper);
        let back = from_chart_i(&ci).unwrap();
        assert!((back.z3() - c(2.5, 1.5)).norm() < 1e-14);
        assert!((theta(v.z1(), v.z2()).unwrap().cos() - 2.5 / 8.5f64.sqrt()).abs() < 1e-15);
        let ti = to_chart_i(&variety::involution_t(&v)).unwrap();
        assert_eq!(ti, involution_i(&ci));
        assert!(matches!(
            theta(c(2.0, 0.0), c(-1.0, 0.0)),
            Err(GeometryError::DomainNotInP(_))
        ));
    }

    #[test]
    fn partials_at_q2_match_exact_values() {
        let p = zeta3_partials(&q2()).unwrap();
        let exact = [
            c(-27.0 / 2.0, -25.0 / 3.0),
            c(-3.0 / 2.0, -83.0 / 6.0),
            c(-9.0, 79.0 / 3.0),
            c(-7.0, 25.0 / 3.0),
        ];
        for (a, b) in p.as_array().iter().zip(exact) {
            assert!((a - b).norm() < 1e-12 * b.norm());
        }
        let fd = zeta3_partials_fd(&q2(), 1e-6).unwrap();
        for (a, b) in fd.as_array().iter().zip(exact) {
            assert!((a - b).norm() < 1e-6 * b.norm());
        }
    }

    #[test]
    fn chain_rule_identities_at_q2() {
        for r in identity_residuals(&q2()).unwrap() {
            assert!(r < 1e-10);
        }
        let e = verify_embedding_pushforward(&q2()).unwrap();
        assert!(e.z_residual < 1e-10 && e.w_residual < 1e-10);
        let e = verify_embedding_pushforward(&xcr()).unwrap();
        assert!(e.z_residual < 1e-12);
    }

    #[test]
    fn psc_at_q2() {
        let r = verify_psc(&q2(), FD_STEP, FD_TOL).unwrap();
        assert!(r.det_d01 < 1e-6, "{r:?}");
        assert_eq!(r.rank_d01, 1);
        assert!(r.decay_ok && r.passed);
        assert!(r.analytic_det.unwrap() < 1e-12);
        assert!(r.route_gap.unwrap() < 1e-6);
    }

    #[test]
    fn psc_degenerates_on_cr_singular_set() {
        // The generator and the conj(w) row vanish; the conj(z) row is the finite
        // limit of a 0/0 quotient, so the rank stays one.
        let r = verify_psc(&xcr(), FD_STEP, FD_TOL).unwrap();
        assert!(r.ill_conditioned && r.generator_norm == 0.0, "{r:?}");
        assert!(r.conj_w_row_norm < 1e-9);
        assert_eq!(r.rank_d01, 1);
        assert!(r.det_d01 < 1e-9);
    }

    #[test]
    fn spsc_at_q2() {
        let r = verify_spsc_split(&q2(), FD_STEP, FD_TOL).unwrap();
        assert!(r.passed && !r.ill_conditioned, "{r:?}");
        let (a, b) = r.analytic_residuals.unwrap();
        assert!(a < 1e-10 && b < 1e-10);
        // W^I at v is Z^I at the involution image.
        let (_, w) = chart_generators(&q2());
        let (z, _) = chart_generators(&variety::involution_t(&q2()));
        assert_eq!(w, z);
    }

    #[test]
    fn singular_values_of_rank_one_matrix() {
        let m = [[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(4.0, 0.0)]];
        let (a, b) = singular_values_2x2(&m);
        assert!((a - 5.0).abs() < 1e-12 && b.abs() < 1e-12);
    }
}
