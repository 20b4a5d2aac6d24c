//! Numerical thresholds shared by the library, the harness and the tests.

/// Default comparison tolerance for exact identities.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Band for singular-set membership, applied to residuals normalised by `1 + |zeta|^2`.
pub const SET_MEMBERSHIP: f64 = 1e-8;

/// Relative singular-value threshold for rank decisions.
pub const RANK: f64 = 1e-7;

/// Relative threshold below which a lift is treated as non-null.
pub const NULL_LIFT: f64 = 1e-9;

/// Relative size of the third lift coordinate below which a lift projects to infinity.
pub const PROJECT_INFINITY: f64 = 4.0 * f64::EPSILON;

/// Relative size of a Hermitian pairing below which two lifts are proportional.
pub const COINCIDENT: f64 = 1e-14;

/// Default finite-difference step.
pub const FD_STEP: f64 = 1e-5;

/// Finite-difference acceptance threshold for the default step.
pub const FD_TOL: f64 = 1e-5;

/// Below this generator norm a psc/spsc report is flagged ill-conditioned.
pub const ILL_CONDITIONED_GENERATOR: f64 = 1e-8;

/// Pairwise Korányi–Cygan separation required of random samples.
pub const SAMPLE_SEPARATION: f64 = 1e-3;

/// `|Im X3|` margin for samples restricted to the open set `Im X3 != 0`.
pub const XSTAR_MARGIN: f64 = 1e-2;

/// Relative margin `|Im X3| / |X3|` for finite-difference chart checks.
pub const FD_CHART_MARGIN: f64 = 0.1;

/// Margin on `cos A` keeping theorem hypotheses away from C-circle configurations.
pub const C_CIRCLE_MARGIN: f64 = 1e-2;

/// Half-width of the sampling box for random boundary points.
pub const SAMPLE_BOX: f64 = 3.0;

/// Drift of cross-ratios and Cartan invariants under isometries.
pub const INVARIANCE: f64 = 1e-10;

/// Residual of the argument and modulus identities between cross-ratios and Cartan invariants.
pub const IDENTITY: f64 = 1e-8;

/// Cross-ratio gap after a reconstruction roundtrip.
pub const ROUNDTRIP: f64 = 1e-8;

/// Relative gap between two closed forms of the Levi form.
pub const LEVI_CLOSED_FORM: f64 = 1e-10;

/// Relative gap between the closed-form and finite-difference Levi form.
pub const LEVI_FD: f64 = 1e-5;

/// Gap between pushed-forward chart generators and the minor vectors.
pub const PUSHFORWARD: f64 = 1e-10;
