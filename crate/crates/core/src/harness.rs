//! Seeded property suites and their reports.
//!
//! Samples are split into shards of [`SHARD_SIZE`]. Shard `k` of suite `s` draws
//! from the stream `(seed, s << 32 | k)`, so a report depends only on
//! `(suite, seed, samples, tol, hstep)` and never on the worker count. Shard
//! results are merged in shard order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::thread;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::charts::{identity_residuals, verify_embedding_pushforward, verify_psc, verify_spsc_split};
use crate::cr_generic::{levi_general, VarietySystem};
use crate::error::Result;
use crate::hermitian::apply;
use crate::invariants::{
    alternative_description_residual, cartan, cartan_quad, lemma_xa_residuals, modulus_law_residual, prop_xa_residuals,
    triple_cross_ratios, CrossRatios,
};
use crate::involution::{lemma_git_equivalences, verify_theorem_git};
use crate::json;
use crate::reconstruction::{
    cartan_direct, cartan_from_variety, normal_form, roundtrip_residual, route_agreement, variety_to_quadruple,
};
use crate::sampling::{self, ShardRng, SHARD_SIZE};
use crate::tolerances;
use crate::variety::{self, involution_t, VarietyPoint};
use crate::{angle_gap, Quadruple};

/// Failures kept verbatim in a report; the rest are only counted.
pub const MAX_LISTED_FAILURES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Variety,
    Invariance,
    LemmaXa,
    Levi,
    Psc,
    Spsc,
    Reconstruction,
    Git,
    Degenerate,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Variety,
        Suite::Invariance,
        Suite::LemmaXa,
        Suite::Levi,
        Suite::Psc,
        Suite::Spsc,
        Suite::Reconstruction,
        Suite::Git,
        Suite::Degenerate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Variety => "variety",
            Suite::Invariance => "invariance",
            Suite::LemmaXa => "lemma-xa",
            Suite::Levi => "levi",
            Suite::Psc => "psc",
            Suite::Spsc => "spsc",
            Suite::Reconstruction => "reconstruction",
            Suite::Git => "giT",
            Suite::Degenerate => "degenerate",
        }
    }

    fn stream_id(self) -> u64 {
        Suite::ALL.iter().position(|s| *s == self).expect("listed") as u64
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownSuite(pub String);

impl fmt::Display for UnknownSuite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        write!(f, "unknown suite \"{}\" (expected all, {})", self.0, names.join(", "))
    }
}

impl std::error::Error for UnknownSuite {}

impl FromStr for Suite {
    type Err = UnknownSuite;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownSuite(s.to_string()))
    }
}

/// Parameters shared by every suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub seed: u64,
    pub samples: usize,
    /// Threshold for the exact identities; fixed-precision checks keep their own limits.
    pub tol: f64,
    /// Finite-difference step.
    pub hstep: f64,
    /// Worker threads; `None` uses the available parallelism. Does not affect results.
    pub workers: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            samples: 1000,
            tol: tolerances::DEFAULT_TOL,
            hstep: tolerances::FD_STEP,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub index: usize,
    pub sample: Value,
    pub residual: String,
    pub value: f64,
    pub message: Option<String>,
}

impl Failure {
    fn to_json(&self) -> Value {
        let mut v = json!({
            "index": self.index,
            "sample": self.sample,
            "residual": self.residual,
            "value": json::real(self.value),
        });
        if let Some(m) = &self.message {
            v["message"] = json!(m);
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub suite: Suite,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub hstep: f64,
    /// Pass threshold per residual: a residual fails unless strictly below it.
    pub limits: BTreeMap<String, f64>,
    pub max_residuals: BTreeMap<String, f64>,
    /// The first [`MAX_LISTED_FAILURES`] failures in sample order.
    pub failures: Vec<Failure>,
    pub failure_count: usize,
}

impl VerificationReport {
    fn empty(suite: Suite, cfg: &Config) -> Self {
        VerificationReport {
            suite,
            samples: cfg.samples,
            seed: cfg.seed,
            tol: cfg.tol,
            hstep: cfg.hstep,
            limits: limits(suite, cfg)
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            max_residuals: BTreeMap::new(),
            failures: Vec::new(),
            failure_count: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    /// Largest recorded value of `name`, if any sample produced it.
    pub fn max(&self, name: &str) -> Option<f64> {
        self.max_residuals.get(name).copied()
    }

    /// Number of failures attributed to `name` among the listed ones.
    pub fn listed_failures(&self, name: &str) -> usize {
        self.failures.iter().filter(|f| f.residual == name).count()
    }

    fn merge(&mut self, shard: ShardResult) {
        for (k, v) in shard.max_residuals {
            let e = self.max_residuals.entry(k.to_string()).or_insert(v);
            *e = max_nan(*e, v);
        }
        self.failure_count += shard.failure_count;
        for f in shard.failures {
            if self.failures.len() < MAX_LISTED_FAILURES {
                self.failures.push(f);
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let map = |m: &BTreeMap<String, f64>| -> Value {
            Value::Object(m.iter().map(|(k, v)| (k.clone(), json::real(*v))).collect())
        };
        json!({
            "suite": self.suite.name(),
            "samples": self.samples,
            "seed": self.seed,
            "tol": json::real(self.tol),
            "hstep": json::real(self.hstep),
            "limits": map(&self.limits),
            "max_residuals": map(&self.max_residuals),
            "failure_count": self.failure_count,
            "failures": self.failures.iter().map(Failure::to_json).collect::<Vec<_>>(),
            "passed": self.passed(),
        })
    }
}

/// Reports of several suites run with one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedReport {
    pub seed: u64,
    pub samples: usize,
    pub reports: Vec<VerificationReport>,
}

impl CombinedReport {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(VerificationReport::passed)
    }

    pub fn get(&self, suite: Suite) -> Option<&VerificationReport> {
        self.reports.iter().find(|r| r.suite == suite)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": "all",
            "seed": self.seed,
            "samples": self.samples,
            "suites": self.reports.iter().map(VerificationReport::to_json).collect::<Vec<_>>(),
            "passed": self.passed(),
        })
    }
}

/// NaN-propagating maximum, so an undefined residual is never hidden.
fn max_nan(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Residual names of a suite with their pass thresholds.
///
/// Booleans are recorded as `0` (holds) or `1` (violated) against the limit `0.5`.
pub fn limits(suite: Suite, cfg: &Config) -> Vec<(&'static str, f64)> {
    use tolerances::*;
    const FLAG: f64 = 0.5;
    let tol = cfg.tol;
    match suite {
        Suite::Variety => vec![("cross1", tol), ("cross2", tol)],
        Suite::Invariance => vec![("cross_ratio_drift", INVARIANCE), ("cartan_drift", INVARIANCE)],
        Suite::LemmaXa => vec![
            ("prop_xa_arg_x1", IDENTITY),
            ("prop_xa_arg_x2", IDENTITY),
            ("prop_xa_arg_x3", IDENTITY),
            ("prop_xa_a3_relation", IDENTITY),
            ("lemma_xa_modulus", IDENTITY),
            ("alternative_description", IDENTITY),
            ("symmetric_condition", IDENTITY),
            ("modulus_law", IDENTITY),
        ],
        Suite::Levi => vec![
            ("l1_relative", tol),
            ("l2_vs_difference_form", LEVI_CLOSED_FORM),
            ("l2_vs_sum_form", LEVI_CLOSED_FORM),
            ("l2_vs_fd_sandwich", LEVI_FD),
            ("l2_nonpositive", FLAG),
            ("p_boundary_levi_nonpositive", FLAG),
        ],
        Suite::Psc => vec![
            ("det_d01", FD_TOL),
            ("decay_violation", FLAG),
            ("rank_not_one", FLAG),
            ("fd_vs_chain_rule", FD_TOL),
            ("identity_d1", tol),
            ("identity_d2", tol),
            ("identity_d3", tol),
            ("identity_d4", tol),
            ("pushforward_z", PUSHFORWARD),
            ("pushforward_w", PUSHFORWARD),
        ],
        Suite::Spsc => vec![
            ("horizontal_antiholomorphic_part", FD_TOL),
            ("vertical_holomorphic_part", FD_TOL),
            ("horizontal_analytic", tol),
            ("vertical_analytic", tol),
        ],
        Suite::Reconstruction => vec![
            ("roundtrip", ROUNDTRIP),
            ("normal_form_roundtrip", ROUNDTRIP),
            ("route_point_gap", ROUNDTRIP),
            ("route_cross_ratio_gap", ROUNDTRIP),
            ("cartan_route_gap", ROUNDTRIP),
        ],
        Suite::Git => vec![
            ("point_kc_distance", tol),
            ("point_coordinate_gap", tol),
            ("origin_drift", tol),
            ("rotation_scale", tol),
            ("rotation_angle", tol),
            ("dilation_scale", tol),
            ("dilation_angle", tol),
            ("dilation_angle_forms", tol),
            ("angle_consistency", tol),
            ("lemma_disagreement", FLAG),
            ("lemma_pair_not_all_true", FLAG),
            ("lemma_identity_not_all_false", FLAG),
        ],
        Suite::Degenerate => vec![
            ("c_circle_imaginary_part", tol),
            ("c_circle_sum", tol),
            ("c_circle_x3", tol),
            ("c_circle_cartan", tol),
            ("r_circle_cartan", tol),
            ("real_point_rank_not_deficient", FLAG),
            ("generic_rank_not_full", FLAG),
        ],
    }
}

#[derive(Default)]
struct ShardResult {
    max_residuals: BTreeMap<&'static str, f64>,
    failures: Vec<Failure>,
    failure_count: usize,
}

/// Collects residuals of one shard.
struct Recorder<'a> {
    limits: &'a [(&'static str, f64)],
    out: ShardResult,
    index: usize,
    sample: Value,
}

impl Recorder<'_> {
    fn begin(&mut self, index: usize, sample: Value) {
        self.index = index;
        self.sample = sample;
    }

    fn fail(&mut self, residual: &str, value: f64, message: Option<String>) {
        self.out.failure_count += 1;
        if self.out.failures.len() < MAX_LISTED_FAILURES {
            self.out.failures.push(Failure {
                index: self.index,
                sample: self.sample.clone(),
                residual: residual.to_string(),
                value,
                message,
            });
        }
    }

    fn check(&mut self, name: &'static str, value: f64) {
        let limit = self
            .limits
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, l)| *l)
            .unwrap_or_else(|| panic!("residual {name} has no limit"));
        let e = self.out.max_residuals.entry(name).or_insert(value);
        *e = max_nan(*e, value);
        if !(value < limit) {
            self.fail(name, value, None);
        }
    }

    fn flag(&mut self, name: &'static str, violated: bool) {
        self.check(name, if violated { 1.0 } else { 0.0 });
    }

    /// Records a library error as a failure of the sample.
    fn guard(&mut self, r: Result<()>) {
        if let Err(e) = r {
            self.fail("error", f64::INFINITY, Some(e.to_string()));
        }
    }
}

fn quadruple_sample(q: &Quadruple) -> Value {
    json!({"quadruple": json::quadruple(q)})
}

fn max_gap(a: &CrossRatios, b: &CrossRatios) -> f64 {
    [a.x1 - b.x1, a.x2 - b.x2, a.x3 - b.x3]
        .iter()
        .map(|d| d.norm())
        .fold(0.0, f64::max)
}

/// Cross-ratio gap relative to the size of the values.
fn relative_gap(a: &CrossRatios, b: &CrossRatios) -> f64 {
    let size = [a.x1, a.x2, a.x3].iter().map(|z| z.norm()).fold(1.0, f64::max);
    max_gap(a, b) / size
}

fn run_variety(rng: &mut ShardRng, rec: &mut Recorder, i: usize) {
    let q = sampling::random_quadruple(rng);
    let g = sampling::random_isometry(rng);
    rec.begin(i, quadruple_sample(&q));
    let r = (|| -> Result<()> {
        let g = g?;
        let moved = [
            apply(&g, &q[0])?,
            apply(&g, &q[1])?,
            apply(&g, &q[2])?,
            apply(&g, &q[3])?,
        ];
        rec.sample = json!({"quadruple": json::quadruple(&q), "scrambled": json::quadruple(&moved)});
        let v = VarietyPoint::from_cross_ratios(&triple_cross_ratios(&moved)?)?;
        let (r1, r2) = variety::normalized_residuals(&v);
        rec.check("cross1", r1.abs());
        rec.check("cross2", r2.abs());
        Ok(())
    })();
    rec.guard(r);
}

fn run_invariance(rng: &mut ShardRng, rec: &mut Recorder, i: usize) {
    let q = sampling::random_quadruple(rng);
    let g = sampling::random_isometry(rng);
    rec.begin(i, quadruple_sample(&q));
    let r = (|| -> Result<()> {
        let g = g?;
        let moved = [
            apply(&g, &q[0])?,
            apply(&g, &q[1])?,
            apply(&g, &q[2])?,
            apply(&g, &q[3])?,
        ];
        let x = triple_cross_ratios(&q)?;
        let y = triple_cross_ratios(&moved)?;
        rec.check("cross_ratio_drift", relative_gap(&x, &y));
        let a = cartan_quad(&q)?.as_array();
        let b = cartan_quad(&moved)?.as_array();
        let drift = a.iter().zip(&b).map(|(u, w)| angle_gap(*u, *w)).fold(0.0, f64::max);
        rec.check("cartan_drift", drift);
        Ok(())
    })();
    rec.guard(r);
}

fn run_lemma_xa(rng: &mut ShardRng, rec: &mut Recorder, i: usize) {
    let q = sampling::random_quadruple(rng);
    rec.begin(i, quadruple_sample(&q));
    let r = (|| -> Result<()> {
        let x = triple_cross_ratios(&q)?;
        let a = cartan_quad(&q)?;
        let p = prop_xa_residuals(&x, &a);
        rec.check("prop_xa_arg_x1", p[0]);
        rec.check("prop_xa_arg_x2", p[1]);
        rec.check("prop_xa_arg_x3", p[2]);
        rec.check("prop_xa_a3_relation", p[3]);
        rec.check(
            "lemma_xa_modulus",
            lemma_xa_residuals(&x, &a).iter().fold(0.0, |m, r| max_nan(m, *r)),
        );
        rec.check("alternative_description", alternative_description_residual(&x, &a));
        let v = VarietyPoint::from_cross_ratios(&x)?;
        rec.check("symmetric_condition", variety::symmetric_residual(&v) / v.scale());
        rec.check("modulus_law", modulus_law_residual(&q)?);
        Ok(())
    })();
    rec.guard(r);
}

fn run_levi(rng: &mut ShardRng, rec: &mut Recorder, i: usize, cfg: &Config) {
    let q = sampling::random_quadruple(rng);
    let (b1, b2) = sampling::p_boundary_point(rng);
    rec.begin(
        i,
        json!({"quadruple": json::quadruple(&q), "p_boundary": [json::complex(b1), json::complex(b2)]}),
    );
    let r = (|| -> Result<()> {
        let v = VarietyPoint::from_cross_ratios(&triple_cross_ratios(&q)?)?;
        let l = variety::levi(&v)?;
        let g = variety::minors(&v);
        let [z1, _, z3] = v.zeta;
        let l1_scale = g.d31.norm_sqr() + (z1 * g.d12 + z3 * g.d23).norm_sqr();
        rec.check("l1_relative", l.l1.abs() / l1_scale);
        let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs());
        rec.check("l2_vs_difference_form", rel(l.l2, variety::levi_l2_difference_form(&v)));
        rec.check("l2_vs_sum_form", rel(l.l2, variety::levi_l2_sum_form(&v)));
        let sys = VarietySystem {
            finite_difference_only: true,
        };
        let fd = levi_general(&sys, &v.zeta, cfg.hstep)?;
        rec.check("l2_vs_fd_sandwich", rel(l.l2, fd[1]));
        rec.flag("l2_nonpositive", !(l.l2 > 0.0));
        rec.flag("p_boundary_levi_nonpositive", !(variety::levi_p(b1, b2)? > 0.0));
        Ok(())
    })();
    rec.guard(r);
}

fn run_psc(rng: &mut ShardRng, rec: &mut Recorder, i: usize, cfg: &Config) {
    let (q, v) = sampling::fd_chart_quadruple(rng);
    rec.begin(i, quadruple_sample(&q));
    let r = (|| -> Result<()> {
        let r = verify_psc(&v, cfg.hstep, tolerances::FD_TOL)?;
        rec.check("det_d01", r.det_d01);
        rec.flag("decay_violation", !r.decay_ok);
        rec.flag("rank_not_one", !r.ill_conditioned && r.rank_d01 != 1);
        rec.check("fd_vs_chain_rule", r.route_gap.unwrap_or(f64::INFINITY));
        let d = identity_residuals(&v)?;
        rec.check("identity_d1", d[0]);
        rec.check("identity_d2", d[1]);
        rec.check("identity_d3", d[2]);
        rec.check("identity_d4", d[3]);
        let e = verify_embedding_pushforward(&v)?;
        let size = variety::minors(&v).norm().max(1.0);
        rec.check("pushforward_z", e.z_residual / size);
        rec.check("pushforward_w", e.w_residual / size);
        Ok(())
    })();
    rec.guard(r);
}

fn run_spsc(rng: &mut ShardRng, rec: &mut Recorder, i: usize, cfg: &Config) {
    let (q, v) = sampling::fd_chart_quadruple(rng);
    rec.begin(i, quadruple_sample(&q));
    let r = (|| -> Result<()> {
        let r = verify_spsc_split(&v, cfg.hstep, tolerances::FD_TOL)?;
        rec.check("horizontal_antiholomorphic_part", r.h_antiholo_residual);
        rec.check("vertical_holomorphic_part", r.v_holo_residual);
        let (h, w) = r.analytic_residuals.unwrap_or((f64::INFINITY, f64::INFINITY));
        rec.check("horizontal_analytic", h);
        rec.check("vertical_analytic", w);
        Ok(())
    })();
    rec.guard(r);
}

fn run_reconstruction(rng: &mut ShardRng, rec: &mut Recorder, i: usize) {
    let (q, v) = sampling::theorem_quadruple(rng);
    rec.begin(i, quadruple_sample(&q));
    let r = (|| -> Result<()> {
        rec.check(
            "roundtrip",
            roundtrip_residual(&v, &variety_to_quadruple(&v)?)? / v.scale().sqrt(),
        );
        let nf = normal_form(&v)?;
        rec.check(
            "normal_form_roundtrip",
            roundtrip_residual(&v, &nf.points)? / v.scale().sqrt(),
        );
        let r = route_agreement(&v)?;
        rec.check("route_point_gap", r.point_gap);
        rec.check("route_cross_ratio_gap", r.cross_ratio_gap / v.scale().sqrt());
        let a = cartan_from_variety(&v)?.as_array();
        let b = cartan_direct(&v)?.as_array();
        let c = cartan_quad(&q)?.as_array();
        let gap = (0..4)
            .map(|k| angle_gap(a[k], b[k]).max(angle_gap(a[k], c[k])))
            .fold(0.0, f64::max);
        rec.check("cartan_route_gap", gap);
        Ok(())
    })();
    rec.guard(r);
}

fn run_git(rng: &mut ShardRng, rec: &mut Recorder, i: usize, cfg: &Config) {
    let (q, v) = sampling::theorem_quadruple(rng);
    rec.begin(i, quadruple_sample(&q));
    let r = (|| -> Result<()> {
        let r = verify_theorem_git(&v, cfg.tol)?;
        rec.check("point_kc_distance", r.point_distances[0].max(r.point_distances[1]));
        rec.check(
            "point_coordinate_gap",
            r.point_coordinate_gaps[0].max(r.point_coordinate_gaps[1]),
        );
        rec.check("origin_drift", r.origin_drift);
        rec.check("rotation_scale", r.rotation[0]);
        rec.check("rotation_angle", r.rotation[1]);
        rec.check("dilation_scale", r.dilation[0]);
        rec.check("dilation_angle", r.dilation[1]);
        rec.check("dilation_angle_forms", r.dilation_angle_forms);
        rec.check("angle_consistency", r.angle_consistency[0].max(r.angle_consistency[1]));
        let p = normal_form(&v)?.points;
        let p_t = normal_form(&involution_t(&v))?.points;
        let pair = lemma_git_equivalences(&p, &p_t, cfg.tol)?;
        rec.flag("lemma_disagreement", !pair.agree());
        rec.flag(
            "lemma_pair_not_all_true",
            !(pair.cond_i && pair.cond_ii && pair.cond_iii),
        );
        let same = lemma_git_equivalences(&p, &p, cfg.tol)?;
        rec.flag(
            "lemma_identity_not_all_false",
            same.cond_i || same.cond_ii || same.cond_iii,
        );
        Ok(())
    })();
    rec.guard(r);
}

fn run_degenerate(rng: &mut ShardRng, rec: &mut Recorder, i: usize) {
    let q = sampling::c_circle_quadruple(rng);
    let t = sampling::r_circle_triple(rng);
    let generic = sampling::random_quadruple(rng);
    rec.begin(
        i,
        json!({
            "c_circle": json::quadruple(&q),
            "r_circle": t.iter().map(json::point).collect::<Vec<_>>(),
            "generic": json::quadruple(&generic),
        }),
    );
    let r = (|| -> Result<()> {
        let x = triple_cross_ratios(&q)?;
        let size = [x.x1, x.x2, x.x3].iter().map(|z| z.norm()).fold(1.0, f64::max);
        let im = [x.x1.im, x.x2.im, x.x3.im].iter().fold(0.0, |m: f64, y| m.max(y.abs()));
        rec.check("c_circle_imaginary_part", im / size);
        rec.check("c_circle_sum", (x.x1 + x.x2 - Complex64::new(1.0, 0.0)).norm() / size);
        rec.check(
            "c_circle_x3",
            (x.x3 * x.x1 + x.x2).norm() / (size * x.x1.norm().max(1.0)),
        );
        let a = cartan_quad(&q)?.as_array();
        let c_gap = a
            .iter()
            .map(|v| (v.abs() - std::f64::consts::FRAC_PI_2).abs())
            .fold(0.0, f64::max);
        rec.check("c_circle_cartan", c_gap);
        rec.check("r_circle_cartan", cartan(&t[0], &t[1], &t[2])?.abs());
        let real = VarietyPoint::from_cross_ratios(&x)?;
        rec.flag(
            "real_point_rank_not_deficient",
            variety::jacobian_real_rank(&real, tolerances::RANK) >= 2,
        );
        let g = VarietyPoint::from_cross_ratios(&triple_cross_ratios(&generic)?)?;
        rec.flag(
            "generic_rank_not_full",
            variety::jacobian_real_rank(&g, tolerances::RANK) != 2,
        );
        Ok(())
    })();
    rec.guard(r);
}

fn run_shard(suite: Suite, cfg: &Config, limits: &[(&'static str, f64)], shard: usize) -> ShardResult {
    let mut rng = ShardRng::new(cfg.seed, (suite.stream_id() << 32) | shard as u64);
    let mut rec = Recorder {
        limits,
        out: ShardResult::default(),
        index: 0,
        sample: Value::Null,
    };
    let start = shard * SHARD_SIZE;
    let end = (start + SHARD_SIZE).min(cfg.samples);
    for i in start..end {
        match suite {
            Suite::Variety => run_variety(&mut rng, &mut rec, i),
            Suite::Invariance => run_invariance(&mut rng, &mut rec, i),
            Suite::LemmaXa => run_lemma_xa(&mut rng, &mut rec, i),
            Suite::Levi => run_levi(&mut rng, &mut rec, i, cfg),
            Suite::Psc => run_psc(&mut rng, &mut rec, i, cfg),
            Suite::Spsc => run_spsc(&mut rng, &mut rec, i, cfg),
            Suite::Reconstruction => run_reconstruction(&mut rng, &mut rec, i),
            Suite::Git => run_git(&mut rng, &mut rec, i, cfg),
            Suite::Degenerate => run_degenerate(&mut rng, &mut rec, i),
        }
    }
    rec.out
}

/// Runs one suite over `cfg.samples` seeded samples.
pub fn run_suite(suite: Suite, cfg: &Config) -> VerificationReport {
    let lim = limits(suite, cfg);
    let shards = cfg.samples.div_ceil(SHARD_SIZE);
    let workers = cfg
        .workers
        .unwrap_or_else(|| thread::available_parallelism().map_or(1, |n| n.get()))
        .clamp(1, shards.max(1));
    let mut results: Vec<(usize, ShardResult)> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let lim = &lim;
                s.spawn(move || {
                    (w..shards)
                        .step_by(workers)
                        .map(|k| (k, run_shard(suite, cfg, lim, k)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("suite worker panicked"))
            .collect()
    });
    results.sort_by_key(|(k, _)| *k);
    let mut report = VerificationReport::empty(suite, cfg);
    for (_, r) in results {
        report.merge(r);
    }
    report
}

/// Runs every suite in a fixed order.
pub fn run_all(cfg: &Config) -> CombinedReport {
    CombinedReport {
        seed: cfg.seed,
        samples: cfg.samples,
        reports: Suite::ALL.iter().map(|s| run_suite(*s, cfg)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(samples: usize, workers: usize) -> Config {
        Config {
            seed: 11,
            samples,
            workers: Some(workers),
            ..Config::default()
        }
    }

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
        assert_eq!("git".parse::<Suite>().unwrap(), Suite::Git);
    }

    #[test]
    fn reports_do_not_depend_on_worker_count() {
        let a = run_suite(Suite::Variety, &cfg(300, 1));
        let b = run_suite(Suite::Variety, &cfg(300, 4));
        assert_eq!(json::to_string(&a.to_json()), json::to_string(&b.to_json()));
    }

    #[test]
    fn variety_suite_passes_on_a_small_run() {
        let r = run_suite(Suite::Variety, &cfg(200, 2));
        assert!(r.passed(), "{:?}", r.failures.first());
        assert!(r.max("cross1").unwrap() < 1e-9);
    }

    #[test]
    fn empty_run_has_no_failures() {
        let r = run_suite(Suite::Psc, &cfg(0, 3));
        assert!(r.passed());
        assert!(r.max_residuals.is_empty());
    }

    #[test]
    fn recorder_treats_nan_as_failure() {
        let lim = [("x", 1.0)];
        let mut rec = Recorder {
            limits: &lim,
            out: ShardResult::default(),
            index: 0,
            sample: Value::Null,
        };
        rec.check("x", f64::NAN);
        rec.check("x", 0.5);
        assert_eq!(rec.out.failure_count, 1);
        assert!(rec.out.max_residuals["x"].is_nan());
    }
}
