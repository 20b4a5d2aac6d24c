//! Subcommand handlers. Each returns the JSON document to print and whether the
//! run counts as a success.

use std::fs;
use std::io::{self, Read};

use serde_json::{json, Value};
use xvariety::charts::{identity_residuals, verify_embedding_pushforward, verify_psc, verify_spsc_split};
use xvariety::harness::{self, Config, Suite};
use xvariety::invariants::{
    alternative_description_residual, cartan_quad, lemma_xa_residuals, modulus_law_residual, prop_xa_residuals,
    triple_cross_ratios,
};
use xvariety::involution::{build_g1_g4, verify_theorem_git, Similarity};
use xvariety::json::{self as js, SchemaError};
use xvariety::reconstruction::{normal_form, roundtrip_residual, variety_to_quadruple};
use xvariety::variety::{self, Classification, VarietyPoint};
use xvariety::{tolerances, GeometryError};

use crate::{Cli, Command, GlobalOpts, Input};

pub struct Outcome {
    pub output: Value,
    pub ok: bool,
}

impl Outcome {
    fn ok(output: Value) -> Self {
        Outcome { output, ok: true }
    }
}

/// Errors that end the run with status 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
}

impl From<SchemaError> for CliError {
    fn from(e: SchemaError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Usage(format!("input outside the operation's domain: {e}"))
    }
}

type CliResult = Result<Outcome, CliError>;

fn read_input(input: &Input) -> Result<Value, CliError> {
    let text = match (&input.json, input.file.as_deref()) {
        (Some(text), _) => text.clone(),
        (None, Some(path)) if path != "-" => {
            fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?
        }
        _ => {
            let mut buf = String::new();
            io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError::Usage(format!("cannot read stdin: {e}")))?;
            buf
        }
    };
    Ok(js::parse(&text)?)
}

fn validate(opts: &GlobalOpts) -> Result<(), CliError> {
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", opts.tol)));
    }
    if !(opts.hstep > 0.0 && opts.hstep.is_finite()) {
        return Err(CliError::Usage(format!("--hstep must be positive, got {}", opts.hstep)));
    }
    Ok(())
}

pub fn run(cli: &Cli) -> CliResult {
    let opts = &cli.opts;
    validate(opts)?;
    match &cli.command {
        Command::Invariants(i) => invariants(&read_input(i)?, opts),
        Command::Check(i) => check(&read_input(i)?, opts),
        Command::Classify(i) => classify(&read_input(i)?, opts),
        Command::Reconstruct(i) => reconstruct(&read_input(i)?),
        Command::NormalForm(i) => normal_form_cmd(&read_input(i)?),
        Command::Involute(i) => involute(&read_input(i)?, opts),
        Command::VerifyPsc(i) => verify_psc_cmd(&read_input(i)?, opts),
        Command::Verify { suite } => verify(suite, opts),
    }
}

fn flags_json(c: &Classification) -> Value {
    let f = c.flags;
    json!({
        "in_XR": f.in_xr,
        "in_XCR": f.in_xcr,
        "in_XCR_star": f.in_xcr_star,
        "in_XC": f.in_xc,
        "in_XC1": f.in_xc1,
        "in_XC2": f.in_xc2,
    })
}

fn singular_residuals_json(v: &VarietyPoint) -> Value {
    let r = variety::singular_residuals(v);
    json!({
        "XCR": js::reals(&r.xcr),
        "XCR_star": js::reals(&r.xcr_star),
        "imaginary": js::reals(&r.imaginary),
        "XC1": js::real(r.xc1),
        "XC2": js::real(r.xc2),
    })
}

fn similarity_json(g: &Similarity) -> Value {
    json!({"scale": js::real(g.scale), "angle": js::real(g.angle)})
}

fn on_variety(v: &VarietyPoint, tol: f64) -> bool {
    variety::ensure_on_variety(v, tol).is_ok()
}

fn invariants(input: &Value, opts: &GlobalOpts) -> CliResult {
    let q = js::parse_quadruple(input)?;
    let x = triple_cross_ratios(&q)?;
    let a = cartan_quad(&q)?;
    let v = VarietyPoint::from_cross_ratios(&x)?;
    let (f1, f2) = variety::normalized_residuals(&v);
    let classification = variety::classify(&v, opts.tol).ok();
    Ok(Outcome::ok(json!({
        "X1": js::complex(x.x1),
        "X2": js::complex(x.x2),
        "X3": js::complex(x.x3),
        "A1": js::real(a.a1),
        "A2": js::real(a.a2),
        "A3": js::real(a.a3),
        "A4": js::real(a.a4),
        "residuals": {
            "variety": js::reals(&[f1, f2]),
            "prop_xa": js::reals(&prop_xa_residuals(&x, &a)),
            "lemma_xa": js::reals(&lemma_xa_residuals(&x, &a)),
            "alternative_description": js::real(alternative_description_residual(&x, &a)),
            "modulus_law": js::real(modulus_law_residual(&q)?),
        },
        "classification": classification.as_ref().map(flags_json),
    })))
}

fn check(input: &Value, opts: &GlobalOpts) -> CliResult {
    let v = js::parse_variety_point(input)?;
    let (f1, f2) = variety::residuals(&v);
    let (n1, n2) = variety::normalized_residuals(&v);
    let on = on_variety(&v, opts.tol);
    let classification = variety::classify(&v, opts.tol).ok();
    let (s_max, s_min) = variety::singular_values_2xn(&variety::real_jacobian(&v));
    let g = variety::minors(&v);
    let levi = match variety::levi(&v) {
        Ok(l) => json!({"L1": js::real(l.l1), "L2": js::real(l.l2)}),
        Err(e) => json!({"undefined": e.to_string()}),
    };
    let output = json!({
        "point": js::variety_point(&v),
        "residuals": js::reals(&[f1, f2]),
        "normalized_residuals": js::reals(&[n1, n2]),
        "on_variety": on,
        "flags": classification.as_ref().map(flags_json),
        "singular_residuals": singular_residuals_json(&v),
        "rank": variety::jacobian_real_rank(&v, tolerances::RANK),
        "singular_values": js::reals(&[s_max, s_min]),
        "minors": {"D23": js::complex(g.d23), "D31": js::complex(g.d31), "D12": js::complex(g.d12)},
        "levi": levi,
    });
    Ok(Outcome {
        output,
        ok: on || !opts.strict,
    })
}

fn classify(input: &Value, opts: &GlobalOpts) -> CliResult {
    let v = js::parse_variety_point(input)?;
    let classification = variety::classify(&v, opts.tol).ok();
    let on = classification.is_some();
    Ok(Outcome {
        output: json!({
            "point": js::variety_point(&v),
            "on_variety": on,
            "flags": classification.as_ref().map(flags_json),
            "singular_residuals": singular_residuals_json(&v),
        }),
        ok: on || !opts.strict,
    })
}

fn reconstruct(input: &Value) -> CliResult {
    let v = js::parse_variety_point(input)?;
    let q = variety_to_quadruple(&v)?;
    Ok(Outcome::ok(json!({
        "point": js::variety_point(&v),
        "quadruple": js::quadruple(&q),
        "roundtrip_residual": js::real(roundtrip_residual(&v, &q)?),
    })))
}

fn normal_form_cmd(input: &Value) -> CliResult {
    let v = js::parse_variety_point(input)?;
    let nf = normal_form(&v)?;
    Ok(Outcome::ok(json!({
        "point": js::variety_point(&v),
        "quadruple": js::quadruple(&nf.points),
        "eta": js::real(nf.eta),
        "cartan": js::cartan(&nf.cartan),
        "roundtrip_residual": js::real(roundtrip_residual(&v, &nf.points)?),
    })))
}

fn involute(input: &Value, opts: &GlobalOpts) -> CliResult {
    let v = js::parse_variety_point(input)?;
    let image = variety::involution_t(&v);
    let r = verify_theorem_git(&v, opts.tol)?;
    let (g1, g4) = build_g1_g4(&v)?;
    Ok(Outcome {
        output: json!({
            "point": js::variety_point(&v),
            "image": js::variety_point(&image),
            "g1": similarity_json(&g1),
            "g4": similarity_json(&g4),
            "report": {
                "point_kc_distances": js::reals(&r.point_distances),
                "point_coordinate_gaps": js::reals(&r.point_coordinate_gaps),
                "origin_drift": js::real(r.origin_drift),
                "rotation": js::reals(&r.rotation),
                "dilation": js::reals(&r.dilation),
                "dilation_angle_forms": js::real(r.dilation_angle_forms),
                "angle_consistency": js::reals(&r.angle_consistency),
                "max_residual": js::real(r.max_residual()),
                "passed": r.passed,
            },
        }),
        ok: r.passed || !opts.strict,
    })
}

fn verify_psc_cmd(input: &Value, opts: &GlobalOpts) -> CliResult {
    let v = js::parse_variety_point(input)?;
    let p = verify_psc(&v, opts.hstep, tolerances::FD_TOL)?;
    let s = verify_spsc_split(&v, opts.hstep, tolerances::FD_TOL)?;
    let d = identity_residuals(&v)?;
    let e = verify_embedding_pushforward(&v)?;
    let identities_ok = d.iter().all(|r| *r < opts.tol);
    let passed = p.passed && s.passed && identities_ok;
    let opt = |x: Option<f64>| x.map(js::real).unwrap_or(Value::Null);
    Ok(Outcome {
        output: json!({
            "point": js::variety_point(&v),
            "hstep": js::real(opts.hstep),
            "psc": {
                "chart": format!("{:?}", p.chart).to_lowercase(),
                "det_d01": js::real(p.det_d01),
                "rank_d01": p.rank_d01,
                "singular_values": js::reals(&[p.singular_values.0, p.singular_values.1]),
                "det_plain": js::reals(&[p.det_plain.0, p.det_plain.1]),
                "decay_ratio": js::real(p.decay_ratio),
                "decay_ok": p.decay_ok,
                "analytic_det": opt(p.analytic_det),
                "route_gap": opt(p.route_gap),
                "conj_w_row_norm": js::real(p.conj_w_row_norm),
                "generator_norm": js::real(p.generator_norm),
                "ill_conditioned": p.ill_conditioned,
                "passed": p.passed,
            },
            "spsc": {
                "horizontal_antiholomorphic_part": js::real(s.h_antiholo_residual),
                "vertical_holomorphic_part": js::real(s.v_holo_residual),
                "analytic": s.analytic_residuals.map(|(a, b)| js::reals(&[a, b])),
                "ill_conditioned": s.ill_conditioned,
                "passed": s.passed,
            },
            "identities": js::reals(&d),
            "pushforward": {"z": js::real(e.z_residual), "w": js::real(e.w_residual)},
            "passed": passed,
        }),
        ok: passed || !opts.strict,
    })
}

fn verify(suite: &str, opts: &GlobalOpts) -> CliResult {
    let cfg = Config {
        seed: opts.seed,
        samples: opts.samples,
        tol: opts.tol,
        hstep: opts.hstep,
        workers: None,
    };
    if suite.eq_ignore_ascii_case("all") {
        let r = harness::run_all(&cfg);
        return Ok(Outcome {
            output: r.to_json(),
            ok: r.passed(),
        });
    }
    let s: Suite = suite
        .parse()
        .map_err(|e: harness::UnknownSuite| CliError::Usage(e.to_string()))?;
    let r = harness::run_suite(s, &cfg);
    Ok(Outcome {
        output: r.to_json(),
        ok: r.passed(),
    })
}
