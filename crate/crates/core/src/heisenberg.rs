//! Heisenberg group arithmetic, the Korányi gauge and the Korányi–Cygan metric.

use num_complex::Complex64;

use crate::error::{GeometryError, Result};

/// A point of the boundary: a Heisenberg point `(z, t)` or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint {
    Finite { z: Complex64, t: f64 },
    Infinity,
}

/// Value of the Korányi gauge `|z|^2 - i t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gauge(pub Complex64);

impl Gauge {
    /// Heisenberg norm `|A|^{1/2}`.
    pub fn norm(self) -> f64 {
        self.0.norm().sqrt()
    }
}

impl BoundaryPoint {
    pub const ORIGIN: BoundaryPoint = BoundaryPoint::Finite {
        z: Complex64::new(0.0, 0.0),
        t: 0.0,
    };

    /// Finite point with validated components.
    pub fn new(z: Complex64, t: f64) -> Result<Self> {
        if z.re.is_finite() && z.im.is_finite() && t.is_finite() {
            Ok(BoundaryPoint::Finite { z, t })
        } else {
            Err(GeometryError::NonFinite("boundary point"))
        }
    }

    /// Finite point from real components. Callers guarantee finiteness.
    pub const fn from_parts(re: f64, im: f64, t: f64) -> Self {
        BoundaryPoint::Finite {
            z: Complex64::new(re, im),
            t,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, BoundaryPoint::Infinity)
    }

    pub fn coords(&self) -> Option<(Complex64, f64)> {
        match *self {
            BoundaryPoint::Finite { z, t } => Some((z, t)),
            BoundaryPoint::Infinity => None,
        }
    }

    fn finite_coords(&self, op: &'static str) -> Result<(Complex64, f64)> {
        self.coords().ok_or(GeometryError::InfiniteOperand(op))
    }
}

/// Group law `(z,t) * (w,s) = (z + w, t + s + 2 Im(conj(w) z))`.
pub fn star(p: &BoundaryPoint, q: &BoundaryPoint) -> Result<BoundaryPoint> {
    let (z, t) = p.finite_coords("star")?;
    let (w, s) = q.finite_coords("star")?;
    Ok(BoundaryPoint::Finite {
        z: z + w,
        t: t + s + 2.0 * (w.conj() * z).im,
    })
}

/// Group inverse `(-z, -t)`.
pub fn inv(p: &BoundaryPoint) -> Result<BoundaryPoint> {
    let (z, t) = p.finite_coords("inv")?;
    Ok(BoundaryPoint::Finite { z: -z, t: -t })
}

/// Korányi gauge `|z|^2 - i t`.
pub fn gauge(p: &BoundaryPoint) -> Result<Gauge> {
    let (z, t) = p.finite_coords("gauge")?;
    Ok(Gauge(Complex64::new(z.norm_sqr(), -t)))
}

/// Korányi–Cygan distance `|A(q^{-1} * p)|^{1/2}`.
///
/// Returns `f64::INFINITY` when exactly one argument is the point at infinity
/// and `0` when both are.
pub fn kc_distance(p: &BoundaryPoint, q: &BoundaryPoint) -> f64 {
    match (p.coords(), q.coords()) {
        (None, None) => 0.0,
        (None, Some(_)) | (Some(_), None) => f64::INFINITY,
        (Some((z, t)), Some((w, s))) => {
            let dz = z - w;
            let dt = t - s + 2.0 * (z * w.conj()).im;
            Complex64::new(dz.norm_sqr(), -dt).norm().sqrt()
        }
    }
}

/// Left translation by the finite point `by`. Fixes infinity.
pub fn translate(by: &BoundaryPoint, p: &BoundaryPoint) -> Result<BoundaryPoint> {
    by.finite_coords("translate")?;
    match p {
        BoundaryPoint::Infinity => Ok(BoundaryPoint::Infinity),
        _ => star(by, p),
    }
}

/// Rotation `(z, t) -> (z e^{i angle}, t)`. Fixes infinity.
pub fn rotate(angle: f64, p: &BoundaryPoint) -> BoundaryPoint {
    match *p {
        BoundaryPoint::Finite { z, t } => BoundaryPoint::Finite {
            z: z * Complex64::from_polar(1.0, angle),
            t,
        },
        BoundaryPoint::Infinity => BoundaryPoint::Infinity,
    }
}

/// Dilation `(z, t) -> (r z, r^2 t)`. Fixes infinity.
pub fn dilate(scale: f64, p: &BoundaryPoint) -> Result<BoundaryPoint> {
    if !(scale > 0.0) {
        return Err(GeometryError::NonPositiveDilation(scale));
    }
    Ok(match *p {
        BoundaryPoint::Finite { z, t } => BoundaryPoint::Finite {
            z: z * scale,
            t: t * scale * scale,
        },
        BoundaryPoint::Infinity => BoundaryPoint::Infinity,
    })
}

/// Inversion `(z, t) -> (z / (-|z|^2 + i t), -t / |-|z|^2 + i t|^2)`.
///
/// Swaps the origin and infinity.
pub fn inversion(p: &BoundaryPoint) -> BoundaryPoint {
    match *p {
        BoundaryPoint::Infinity => BoundaryPoint::ORIGIN,
        BoundaryPoint::Finite { z, t } => {
            let d = Complex64::new(-z.norm_sqr(), t);
            let m = d.norm_sqr();
            if m == 0.0 {
                BoundaryPoint::Infinity
            } else {
                BoundaryPoint::Finite { z: z / d, t: -t / m }
            }
        }
    }
}
