//! Generic CR machinery for a real subvariety of `C^n` cut out by `k` real
//! equations: the `(1,0)` Jacobian, the minor generator for `k = n - 1` and the
//! Levi sandwich. Serves as a finite-difference oracle for the closed forms in
//! [`crate::variety`].

use num_complex::Complex64;

use crate::error::{GeometryError, Result};
use crate::variety::{self, VarietyPoint};

/// Row-major complex matrix.
pub type CMatrix = Vec<Vec<Complex64>>;

/// A real subvariety given by `k` real equations on `C^n`.
pub trait DefiningSystem {
    /// Ambient complex dimension `n`.
    fn dim(&self) -> usize;
    /// Number of real equations `k`.
    fn equations(&self) -> usize;
    /// The `k` defining functions at `p`.
    fn eval(&self, p: &[Complex64]) -> Vec<f64>;
    /// Analytic `dF_i / d zeta_j`, when available.
    fn analytic_d10(&self, _p: &[Complex64]) -> Option<CMatrix> {
        None
    }
}

fn checked_eval<S: DefiningSystem + ?Sized>(sys: &S, p: &[Complex64]) -> Result<Vec<f64>> {
    let v = sys.eval(p);
    if v.len() != sys.equations() || v.iter().any(|x| !x.is_finite()) {
        return Err(GeometryError::NonFinite("defining system evaluation"));
    }
    Ok(v)
}

fn check_point<S: DefiningSystem + ?Sized>(sys: &S, p: &[Complex64]) -> Result<()> {
    if p.len() != sys.dim() {
        return Err(GeometryError::Unsupported("point dimension does not match system"));
    }
    if p.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(GeometryError::NonFinite("defining system point"));
    }
    Ok(())
}

/// Moves real coordinate `a` (`2j` is `Re zeta_j`, `2j+1` is `Im zeta_j`) by `h`.
fn shifted(p: &[Complex64], moves: &[(usize, f64)]) -> Vec<Complex64> {
    let mut q = p.to_vec();
    for &(a, h) in moves {
        if a % 2 == 0 {
            q[a / 2].re += h;
        } else {
            q[a / 2].im += h;
        }
    }
    q
}

/// `(1,0)` Jacobian by central differences on the `2n` real coordinates.
pub fn d10_finite_difference<S: DefiningSystem + ?Sized>(sys: &S, p: &[Complex64], h: f64) -> Result<CMatrix> {
    check_point(sys, p)?;
    let (n, k) = (sys.dim(), sys.equations());
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; k];
    for j in 0..n {
        let dx = {
            let (a, b) = (
                checked_eval(sys, &shifted(p, &[(2 * j, h)]))?,
                checked_eval(sys, &shifted(p, &[(2 * j, -h)]))?,
            );
            a.iter().zip(&b).map(|(u, v)| (u - v) / (2.0 * h)).collect::<Vec<_>>()
        };
        let dy = {
            let (a, b) = (
                checked_eval(sys, &shifted(p, &[(2 * j + 1, h)]))?,
                checked_eval(sys, &shifted(p, &[(2 * j + 1, -h)]))?,
            );
            a.iter().zip(&b).map(|(u, v)| (u - v) / (2.0 * h)).collect::<Vec<_>>()
        };
        for i in 0..k {
            m[i][j] = Complex64::new(dx[i], -dy[i]) * 0.5;
        }
    }
    Ok(m)
}

/// `(1,0)` Jacobian: analytic when the system provides it, otherwise central differences.
pub fn d10_matrix<S: DefiningSystem + ?Sized>(sys: &S, p: &[Complex64], h: f64) -> Result<CMatrix> {
    check_point(sys, p)?;
    match sys.analytic_d10(p) {
        Some(m) => {
            if m.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(GeometryError::NonFinite("analytic Jacobian"));
            }
            Ok(m)
        }
        None => d10_finite_difference(sys, p, h),
    }
}

/// Determinant by cofactor expansion; the matrices here are at most 3x3.
fn det(m: &[Vec<Complex64>]) -> Complex64 {
    match m.len() {
        0 => Complex64::new(1.0, 0.0),
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        n => (0..n)
            .map(|c| {
                let sub: Vec<Vec<Complex64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != c)
                            .map(|(_, z)| *z)
                            .collect()
                    })
                    .collect();
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                m[0][c] * det(&sub) * sign
            })
            .sum(),
    }
}

/// Minor vector of a `(n-1) x n` matrix: component `j` is `(-1)^j` times the
/// determinant with column `j` removed. Every row annihilates it.
pub fn minors_of(m: &CMatrix) -> Vec<Complex64> {
    let n = m.first().map_or(0, |r| r.len());
    (0..n)
        .map(|j| {
            let sub: Vec<Vec<Complex64>> = m
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != j)
                        .map(|(_, z)| *z)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            det(&sub) * sign
        })
        .collect()
}

fn require_hypersurface_type<S: DefiningSystem + ?Sized>(sys: &S) -> Result<()> {
    if sys.equations() + 1 != sys.dim() {
        return Err(GeometryError::Unsupported("minor generator needs k = n - 1"));
    }
    Ok(())
}

/// The CR generator `Z = sum_j (-1)^j D_{hat j} d/d zeta_j`.
pub fn minor_generator<S: DefiningSystem + ?Sized>(sys: &S, p: &[Complex64], h: f64) -> Result<Vec<Complex64>> {
    require_hypersurface_type(sys)?;
    Ok(minors_of(&d10_matrix(sys, p, h)?))
}

/// Second-difference step used for Hessians when first derivatives use `h`.
///
/// Second differences carry roundoff of order `eps / step^2`, so the step is
/// taken as `sqrt(h)`. The defining functions are polynomials of degree at most
/// four, for which the Richardson combination below has no truncation error.
pub fn hessian_step(h: f64) -> f64 {
    h.sqrt()
}

fn real_hessians_at_step<S: DefiningSystem + ?Sized>(sys: &S, p: &[Complex64], s: f64) -> Result<Vec<Vec<Vec<f64>>>> {
    let (n2, k) = (2 * sys.dim(), sys.equations());
    let f0 = checked_eval(sys, p)?;
    let mut h = vec![vec![vec![0.0; n2]; n2]; k];
    for a in 0..n2 {
        let fp = checked_eval(sys, &shifted(p, &[(a, s)]))?;
        let fm = checked_eval(sys, &shifted(p, &[(a, -s)]))?;
        for i in 0..k {
            h[i][a][a] = (fp[i] - 2.0 * f0[i] + fm[i]) / (s * s);
        }
        for b in a + 1..n2 {
            let pp = checked_eval(sys, &shifted(p, &[(a, s), (b, s)]))?;
            let pm = checked_eval(sys, &shifted(p, &[(a, s), (b, -s)]))?;
            let mp = checked_eval(sys, &shifted(p, &[(a, -s), (b, s)]))?;
            let mm = checked_eval(sys, &shifted(p, &[(a, -s), (b, -s)]))?;
            for i in 0..k {
                let v = (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * s * s);
                h[i][a][b] = v;
                h[i][b][a] = v;
            }
        }
    }
    Ok(h)
}

/// Complex Hessians `d^2 F_i / d zeta_j d conj(zeta_l)` from Richardson-extrapolated
/// central second differences with step `s` and `s/2`.
pub fn complex_hessians<S: DefiningSystem + ?Sized>(sys: &S, p: &[Complex64], s: f64) -> Result<Vec<CMatrix>> {
    check_point(sys, p)?;
    let coarse = real_hessians_at_step(sys, p, s)?;
    let fine = real_hessians_at_step(sys, p, s / 2.0)?;
    let n = sys.dim();
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(hc, hf)| {
            let r = |a: usize, b: usize| (4.0 * hf[a][b] - hc[a][b]) / 3.0;
            (0..n)
                .map(|j| {
                    (0..n)
                        .map(|l| {
                            let (xj, yj, xl, yl) = (2 * j, 2 * j + 1, 2 * l, 2 * l + 1);
                            Complex64::new(r(xj, xl) + r(yj, yl), r(xj, yl) - r(yj, xl)) * 0.25
                        })
                        .collect()
                })
                .collect()
        })
        .collect())
}

/// `sum_{j,l} g_j H[j][l] conj(g_l)`.
pub fn sandwich(g: &[Complex64], h: &CMatrix) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, gj) in g.iter().enumerate() {
        for (l, gl) in g.iter().enumerate() {
            acc += gj * h[j][l] * gl.conj();
        }
    }
    acc.re
}

/// Levi values `L_i = Z H_i conj(Z)` with the Hessian at step `hessian_step(h)`.
pub fn levi_general<S: DefiningSystem + ?Sized>(sys: &S, p: &[Complex64], h: f64) -> Result<Vec<f64>> {
    levi_general_with_step(sys, p, h, hessian_step(h))
}

/// As [`levi_general`] with an explicit Hessian step.
pub fn levi_general_with_step<S: DefiningSystem + ?Sized>(
    sys: &S,
    p: &[Complex64],
    h: f64,
    second_step: f64,
) -> Result<Vec<f64>> {
    let g = minor_generator(sys, p, h)?;
    Ok(complex_hessians(sys, p, second_step)?
        .iter()
        .map(|hi| sandwich(&g, hi))
        .collect())
}

/// The cross-ratio variety as a defining system on `C^3`.
#[derive(Debug, Clone, Copy, Default)]
pub struct VarietySystem {
    /// Withhold the analytic Jacobian so that every derivative is differenced.
    pub finite_difference_only: bool,
}

fn as_point(p: &[Complex64]) -> VarietyPoint {
    VarietyPoint {
        zeta: [p[0], p[1], p[2]],
    }
}

impl DefiningSystem for VarietySystem {
    fn dim(&self) -> usize {
        3
    }

    fn equations(&self) -> usize {
        2
    }

    fn eval(&self, p: &[Complex64]) -> Vec<f64> {
        let (f1, f2) = variety::residuals(&as_point(p));
        vec![f1, f2]
    }

    fn analytic_d10(&self, p: &[Complex64]) -> Option<CMatrix> {
        if self.finite_difference_only {
            return None;
        }
        Some(variety::d10(&as_point(p)).iter().map(|r| r.to_vec()).collect())
    }
}

/// The unit sphere `|zeta1|^2 + |zeta2|^2 - 1` in `C^2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SphereSystem;

impl DefiningSystem for SphereSystem {
    fn dim(&self) -> usize {
        2
    }

    fn equations(&self) -> usize {
        1
    }

    fn eval(&self, p: &[Complex64]) -> Vec<f64> {
        vec![p[0].norm_sqr() + p[1].norm_sqr() - 1.0]
    }
}

/// Boundary of the domain `P` in `C^2`, via [`variety::p_defining`].
#[derive(Debug, Clone, Copy, Default)]
pub struct DomainBoundarySystem;

impl DefiningSystem for DomainBoundarySystem {
    fn dim(&self) -> usize {
        2
    }

    fn equations(&self) -> usize {
        1
    }

    fn eval(&self, p: &[Complex64]) -> Vec<f64> {
        vec![variety::p_defining(p[0], p[1])]
    }
}
