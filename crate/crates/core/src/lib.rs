//! Boundary geometry of the complex hyperbolic plane and the complex
//! cross-ratio variety.
//!
//! The crate is organised bottom-up:
//!
//! - [`heisenberg`]: Heisenberg group law, Korányi gauge and Korányi–Cygan metric.
//! - [`hermitian`]: the signature (2,1) form, standard lifts, isometry matrices.
//! - [`invariants`]: Cartan angular invariants and complex cross-ratios.
//! - [`variety`]: the cross-ratio variety, its singular sets, CR generator and Levi form.
//! - [`cr_generic`]: finite-difference machinery for real subvarieties of `C^n`.
//! - [`charts`]: the J and I atlases and the psc / spsc checks.
//! - [`reconstruction`]: from variety points back to quadruples.
//! - [`involution`]: the similarities realising the involution on quadruples.
//! - [`sampling`] and [`harness`]: seeded sampling and the verification suites.

// Negated float comparisons are deliberate: a NaN residual must fail its check.
// Index loops mirror the matrix notation in the numerical kernels.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod charts;
pub mod cr_generic;
pub mod error;
pub mod harness;
pub mod heisenberg;
pub mod hermitian;
pub mod invariants;
pub mod involution;
pub mod json;
pub mod reconstruction;
pub mod sampling;
pub mod tolerances;
pub mod variety;

pub use error::{GeometryError, Result};
pub use heisenberg::BoundaryPoint;
pub use num_complex::Complex64;

/// Four boundary points `(p1, p2, p3, p4)`.
pub type Quadruple = [BoundaryPoint; 4];

/// Wrapped angular distance `|((a - b + pi) mod 2pi) - pi|`, in `[0, pi]`.
pub fn angle_gap(a: f64, b: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    ((a - b + PI).rem_euclid(TAU) - PI).abs()
}

/// Principal representative of an angle in `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let w = (a + PI).rem_euclid(TAU) - PI;
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}
