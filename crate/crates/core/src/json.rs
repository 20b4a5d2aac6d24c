//! JSON encoding shared by the CLI and the harness.
//!
//! Complex numbers are `[re, im]`, the point at infinity is the string `"inf"`,
//! finite boundary points are `{"z": [re, im], "t": t}`. Floats are written
//! with 17 significant digits so reports are byte-stable.

use std::io;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::heisenberg::BoundaryPoint;
use crate::invariants::{CartanQuad, CrossRatios};
use crate::variety::VarietyPoint;
use crate::Quadruple;

#[derive(Debug, Error, PartialEq)]
pub enum SchemaError {
    #[error("malformed JSON: {0}")]
    Syntax(String),
    #[error("{path}: expected {expected}")]
    Shape { path: String, expected: &'static str },
    #[error("{path}: missing field \"{field}\"")]
    MissingField { path: String, field: &'static str },
    #[error("{path}: {reason}")]
    Invalid { path: String, reason: String },
}

fn shape(path: &str, expected: &'static str) -> SchemaError {
    SchemaError::Shape {
        path: path.to_string(),
        expected,
    }
}

/// Compact formatter writing every float as `d.dddddddddddddddde±x`.
struct FixedFloat;

impl Formatter for FixedFloat {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes with the fixed float policy and a trailing newline.
pub fn to_string(v: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, FixedFloat);
    v.serialize(&mut ser).expect("writing to a Vec cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// A real number; non-finite values become the strings `"inf"`, `"-inf"`, `"nan"`.
/// Negative zero is written as zero.
pub fn real(x: f64) -> Value {
    if x == 0.0 {
        json!(0.0)
    } else if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn complex(z: Complex64) -> Value {
    json!([real(z.re), real(z.im)])
}

pub fn point(p: &BoundaryPoint) -> Value {
    match p {
        BoundaryPoint::Infinity => json!("inf"),
        BoundaryPoint::Finite { z, t } => json!({"z": complex(*z), "t": real(*t)}),
    }
}

pub fn quadruple(q: &Quadruple) -> Value {
    Value::Array(q.iter().map(point).collect())
}

pub fn cross_ratios(x: &CrossRatios) -> Value {
    json!({"X1": complex(x.x1), "X2": complex(x.x2), "X3": complex(x.x3)})
}

pub fn variety_point(v: &VarietyPoint) -> Value {
    json!({"X1": complex(v.z1()), "X2": complex(v.z2()), "X3": complex(v.z3())})
}

pub fn cartan(a: &CartanQuad) -> Value {
    json!({"A1": real(a.a1), "A2": real(a.a2), "A3": real(a.a3), "A4": real(a.a4)})
}

pub fn reals(xs: &[f64]) -> Value {
    Value::Array(xs.iter().copied().map(real).collect())
}

pub fn parse(text: &str) -> Result<Value, SchemaError> {
    serde_json::from_str(text).map_err(|e| SchemaError::Syntax(e.to_string()))
}

fn parse_real(v: &Value, path: &str) -> Result<f64, SchemaError> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| shape(path, "a number")),
        Value::String(s) if s == "inf" => Ok(f64::INFINITY),
        Value::String(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
        _ => Err(shape(path, "a number")),
    }
}

/// `[re, im]` or a bare real number.
pub fn parse_complex(v: &Value, path: &str) -> Result<Complex64, SchemaError> {
    match v {
        Value::Array(a) if a.len() == 2 => Ok(Complex64::new(
            parse_real(&a[0], &format!("{path}[0]"))?,
            parse_real(&a[1], &format!("{path}[1]"))?,
        )),
        Value::Number(_) => Ok(Complex64::new(parse_real(v, path)?, 0.0)),
        _ => Err(shape(path, "a complex number [re, im]")),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &'static str, path: &str) -> Result<&'a Value, SchemaError> {
    obj.get(key).ok_or_else(|| SchemaError::MissingField {
        path: path.to_string(),
        field: key,
    })
}

/// `"inf"` or `{"z": [re, im], "t": t}`.
pub fn parse_point(v: &Value, path: &str) -> Result<BoundaryPoint, SchemaError> {
    match v {
        Value::String(s) if s == "inf" => Ok(BoundaryPoint::Infinity),
        Value::Object(obj) => {
            let z = parse_complex(field(obj, "z", path)?, &format!("{path}.z"))?;
            let t = parse_real(field(obj, "t", path)?, &format!("{path}.t"))?;
            BoundaryPoint::new(z, t).map_err(|e| SchemaError::Invalid {
                path: path.to_string(),
                reason: e.to_string(),
            })
        }
        _ => Err(shape(path, "\"inf\" or {\"z\": [re, im], \"t\": t}")),
    }
}

/// An array of four points, or an object holding it under `"points"`.
pub fn parse_quadruple(v: &Value) -> Result<Quadruple, SchemaError> {
    let (arr, base) = match v {
        Value::Array(a) => (a, String::from("$")),
        Value::Object(obj) => match field(obj, "points", "$")? {
            Value::Array(a) => (a, String::from("$.points")),
            _ => return Err(shape("$.points", "an array of four points")),
        },
        _ => return Err(shape("$", "an array of four points")),
    };
    if arr.len() != 4 {
        return Err(shape(&base, "an array of four points"));
    }
    let mut q = [BoundaryPoint::Infinity; 4];
    for (i, p) in arr.iter().enumerate() {
        q[i] = parse_point(p, &format!("{base}[{i}]"))?;
    }
    Ok(q)
}

/// `{"X1": .., "X2": .., "X3": ..}` or an array of three complex numbers.
pub fn parse_variety_point(v: &Value) -> Result<VarietyPoint, SchemaError> {
    let zs = match v {
        Value::Array(a) if a.len() == 3 => [
            parse_complex(&a[0], "$[0]")?,
            parse_complex(&a[1], "$[1]")?,
            parse_complex(&a[2], "$[2]")?,
        ],
        Value::Object(obj) => [
            parse_complex(field(obj, "X1", "$")?, "$.X1")?,
            parse_complex(field(obj, "X2", "$")?, "$.X2")?,
            parse_complex(field(obj, "X3", "$")?, "$.X3")?,
        ],
        _ => {
            return Err(shape(
                "$",
                "{\"X1\", \"X2\", \"X3\"} or an array of three complex numbers",
            ))
        }
    };
    VarietyPoint::new(zs[0], zs[1], zs[2]).map_err(|e| SchemaError::Invalid {
        path: "$".to_string(),
        reason: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_use_seventeen_significant_digits() {
        let s = to_string(&json!({"b": 0.1, "a": [1.0, -2.5e-12], "n": 3}));
        assert_eq!(
            s,
            "{\"a\":[1.0000000000000000e0,-2.4999999999999998e-12],\"b\":1.0000000000000001e-1,\"n\":3}\n"
        );
        assert_eq!(parse(&s).unwrap()["b"].as_f64(), Some(0.1));
    }

    #[test]
    fn infinity_is_a_string() {
        assert_eq!(point(&BoundaryPoint::Infinity), json!("inf"));
        assert_eq!(real(f64::INFINITY), json!("inf"));
    }

    #[test]
    fn quadruple_roundtrip() {
        let q = [
            BoundaryPoint::from_parts(1.0, 0.0, 1.0),
            BoundaryPoint::Infinity,
            BoundaryPoint::ORIGIN,
            BoundaryPoint::from_parts(0.0, 2.0, 1.0),
        ];
        assert_eq!(parse_quadruple(&quadruple(&q)).unwrap(), q);
        assert_eq!(parse_quadruple(&json!({"points": quadruple(&q)})).unwrap(), q);
    }

    #[test]
    fn schema_errors_name_the_location() {
        let bad = json!([{"z": [1, 1]}, "inf", {"z": [0, 0], "t": 0}, {"z": [0, 2], "t": 1}]);
        assert_eq!(
            parse_quadruple(&bad),
            Err(SchemaError::MissingField {
                path: "$[0]".into(),
                field: "t"
            })
        );
        assert!(parse_quadruple(&json!([1, 2])).is_err());
        assert!(matches!(parse("{"), Err(SchemaError::Syntax(_))));
    }

    #[test]
    fn variety_point_accepts_both_layouts() {
        let a = parse_variety_point(&json!([[2, 0], -1, 0.5])).unwrap();
        let b = parse_variety_point(&json!({"X1": 2, "X2": [-1, 0], "X3": [0.5, 0]})).unwrap();
        assert_eq!(a, b);
        assert!(parse_variety_point(&json!([0, 1, 1])).is_err());
    }
}
