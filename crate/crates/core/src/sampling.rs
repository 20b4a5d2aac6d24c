//! Seeded sample generators for the verification suites.
//!
//! Every shard draws from its own ChaCha8 stream keyed by `(seed, shard)`, so a
//! sample depends only on the master seed and its index, never on the number of
//! worker threads.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::Result;
use crate::heisenberg::{kc_distance, BoundaryPoint};
use crate::hermitian::{heis_matrix, HeisenbergGenerator, Isometry};
use crate::invariants::{cartan_quad, triple_cross_ratios};
use crate::tolerances;
use crate::variety::{self, VarietyPoint};
use crate::Quadruple;

/// Samples per shard. Fixed so that results do not depend on the worker count.
pub const SHARD_SIZE: usize = 128;

/// Cap on rejection rounds for a single sample.
const MAX_ATTEMPTS: usize = 100_000;

/// Deterministic generator for one shard.
pub struct ShardRng {
    inner: ChaCha8Rng,
}

impl ShardRng {
    pub fn new(seed: u64, shard: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(shard);
        ShardRng { inner }
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[a, b)`.
    pub fn uniform(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.unit()
    }

    pub fn complex_in_box(&mut self, half_width: f64) -> Complex64 {
        let re = self.uniform(-half_width, half_width);
        Complex64::new(re, self.uniform(-half_width, half_width))
    }

    pub fn point_in_box(&mut self, half_width: f64) -> BoundaryPoint {
        let z = self.complex_in_box(half_width);
        BoundaryPoint::from_parts(z.re, z.im, self.uniform(-half_width, half_width))
    }
}

fn separated(q: &Quadruple) -> bool {
    (0..4).all(|i| (i + 1..4).all(|j| kc_distance(&q[i], &q[j]) >= tolerances::SAMPLE_SEPARATION))
}

fn retry<T>(rng: &mut ShardRng, mut draw: impl FnMut(&mut ShardRng) -> Option<T>) -> T {
    for _ in 0..MAX_ATTEMPTS {
        if let Some(x) = draw(rng) {
            return x;
        }
    }
    panic!("sampler rejected {MAX_ATTEMPTS} consecutive draws");
}

/// `(p1, infinity, o, p4)` with `p1, p4` uniform in the sampling box and all
/// pairwise distances at least the separation threshold.
pub fn random_quadruple(rng: &mut ShardRng) -> Quadruple {
    retry(rng, |r| {
        let q = [
            r.point_in_box(tolerances::SAMPLE_BOX),
            BoundaryPoint::Infinity,
            BoundaryPoint::ORIGIN,
            r.point_in_box(tolerances::SAMPLE_BOX),
        ];
        separated(&q).then_some(q)
    })
}

/// Random quadruple whose variety point has `|Im X3| > margin`.
pub fn xstar_quadruple(rng: &mut ShardRng, margin: f64) -> (Quadruple, VarietyPoint) {
    retry(rng, |r| {
        let q = random_quadruple(r);
        let v = VarietyPoint::from_cross_ratios(&triple_cross_ratios(&q).ok()?).ok()?;
        (v.z3().im.abs() > margin).then_some((q, v))
    })
}

/// Sample for finite-difference chart checks: additionally `|Im X3| / |X3|`
/// exceeds [`tolerances::FD_CHART_MARGIN`], keeping the stencil inside `P`.
pub fn fd_chart_quadruple(rng: &mut ShardRng) -> (Quadruple, VarietyPoint) {
    retry(rng, |r| {
        let (q, v) = xstar_quadruple(r, tolerances::XSTAR_MARGIN);
        (v.z3().im.abs() / v.z3().norm() > tolerances::FD_CHART_MARGIN).then_some((q, v))
    })
}

/// Sample satisfying the similarity theorem hypotheses with margins:
/// `|Im X3| > 0.01` and `cos A_i > 0.01` for all four Cartan invariants.
pub fn theorem_quadruple(rng: &mut ShardRng) -> (Quadruple, VarietyPoint) {
    retry(rng, |r| {
        let (q, v) = xstar_quadruple(r, tolerances::XSTAR_MARGIN);
        let a = cartan_quad(&q).ok()?;
        a.as_array()
            .iter()
            .all(|x| x.cos() > tolerances::C_CIRCLE_MARGIN)
            .then_some((q, v))
    })
}

/// Composition of a translation, rotation, dilation, inversion and a second
/// translation with random parameters.
pub fn random_isometry(rng: &mut ShardRng) -> Result<Isometry> {
    let translation = |r: &mut ShardRng| {
        heis_matrix(HeisenbergGenerator::Translation {
            w: r.complex_in_box(2.0),
            s: r.uniform(-2.0, 2.0),
        })
    };
    let t1 = translation(rng)?;
    let rot = heis_matrix(HeisenbergGenerator::Rotation {
        angle: rng.uniform(0.0, 2.0 * PI),
    })?;
    let dil = heis_matrix(HeisenbergGenerator::Dilation {
        scale: rng.uniform(0.5, 2.0),
    })?;
    let inv = heis_matrix(HeisenbergGenerator::Inversion)?;
    let t2 = translation(rng)?;
    Ok(t2 * inv * dil * rot * t1)
}

/// A point `(zeta1, zeta2)` on the boundary of `P`.
///
/// With `zeta2 = r e^{i phi}` the boundary equation is the quadratic
/// `r^2 - 2 r (|zeta1| + cos phi) + |zeta1 - 1|^2 = 0`.
pub fn p_boundary_point(rng: &mut ShardRng) -> (Complex64, Complex64) {
    retry(rng, |r| {
        let z1 = r.complex_in_box(tolerances::SAMPLE_BOX);
        let phi = r.uniform(-PI, PI);
        let b = z1.norm() + phi.cos();
        let c = (z1 - Complex64::new(1.0, 0.0)).norm_sqr();
        let disc = b * b - c;
        if disc < 0.0 || z1.norm() < 1e-3 {
            return None;
        }
        let root = if r.unit() < 0.5 {
            b + disc.sqrt()
        } else {
            b - disc.sqrt()
        };
        (root > 1e-3).then(|| (z1, Complex64::from_polar(root, phi)))
    })
}

/// Points of a C-circle: `((0, t1), infinity, o, (0, t4))` with distinct nonzero heights.
pub fn c_circle_quadruple(rng: &mut ShardRng) -> Quadruple {
    retry(rng, |r| {
        let (t1, t4) = (r.uniform(-3.0, 3.0), r.uniform(-3.0, 3.0));
        let q = [
            BoundaryPoint::from_parts(0.0, 0.0, t1),
            BoundaryPoint::Infinity,
            BoundaryPoint::ORIGIN,
            BoundaryPoint::from_parts(0.0, 0.0, t4),
        ];
        separated(&q).then_some(q)
    })
}

/// Three distinct points of the R-circle `{(x, 0) : x real} ∪ {infinity}`.
pub fn r_circle_triple(rng: &mut ShardRng) -> [BoundaryPoint; 3] {
    retry(rng, |r| {
        let t = [
            BoundaryPoint::from_parts(r.uniform(-3.0, 3.0), 0.0, 0.0),
            BoundaryPoint::Infinity,
            BoundaryPoint::from_parts(r.uniform(-3.0, 3.0), 0.0, 0.0),
        ];
        (kc_distance(&t[0], &t[2]) >= tolerances::SAMPLE_SEPARATION).then_some(t)
    })
}

/// A point of the real singular set: the triple of a C-circle quadruple.
pub fn real_singular_point(rng: &mut ShardRng) -> Result<VarietyPoint> {
    VarietyPoint::from_cross_ratios(&triple_cross_ratios(&c_circle_quadruple(rng))?)
}

/// A variety point from a random quadruple.
pub fn random_variety_point(rng: &mut ShardRng) -> Result<VarietyPoint> {
    let v = VarietyPoint::from_cross_ratios(&triple_cross_ratios(&random_quadruple(rng))?)?;
    variety::ensure_on_variety(&v, tolerances::DEFAULT_TOL)?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = ShardRng::new(7, 0);
        let mut b = ShardRng::new(7, 0);
        let mut c = ShardRng::new(7, 1);
        let xa: Vec<f64> = (0..8).map(|_| a.unit()).collect();
        let xb: Vec<f64> = (0..8).map(|_| b.unit()).collect();
        let xc: Vec<f64> = (0..8).map(|_| c.unit()).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
        assert!(xa.iter().all(|x| (0.0..1.0).contains(x)));
    }

    #[test]
    fn samplers_respect_their_margins() {
        let mut rng = ShardRng::new(1, 0);
        for _ in 0..50 {
            let (_, v) = fd_chart_quadruple(&mut rng);
            assert!(v.z3().im.abs() / v.z3().norm() > tolerances::FD_CHART_MARGIN);
            let (z1, z2) = p_boundary_point(&mut rng);
            assert!(variety::p_defining(z1, z2).abs() < 1e-9 * (1.0 + z1.norm_sqr() + z2.norm_sqr()));
            let (q, _) = theorem_quadruple(&mut rng);
            assert!(cartan_quad(&q).unwrap().as_array().iter().all(|a| a.cos() > 0.01));
        }
    }

    #[test]
    fn random_isometries_preserve_the_form() {
        let mut rng = ShardRng::new(3, 0);
        for _ in 0..20 {
            assert!(random_isometry(&mut rng).unwrap().form_defect() < 1e-10);
        }
    }
}
