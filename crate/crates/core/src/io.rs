//! JSON instance files: `{"points": [...], "circles": [...], "q": q}`.

use crate::geometry::{Circle3, GeometryError, IncidenceInstance, Point3, Vec3};
use crate::rational::{fmt_q, parse_q, Q};
use num_bigint::BigInt;
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{field}: {message}")]
pub struct InputError {
    pub field: String,
    pub message: String,
}

impl InputError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        InputError { field: field.into(), message: message.into() }
    }
}

/// Rationals are JSON integers or strings `"p/q"`.
pub fn parse_rational(v: &Value, field: &str) -> Result<Q, InputError> {
    match v {
        Value::String(s) => parse_q(s).map_err(|e| InputError::new(field, e.to_string())),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Q::from_integer(BigInt::from(i)))
            } else if let Some(u) = n.as_u64() {
                Ok(Q::from_integer(BigInt::from(u)))
            } else {
                Err(InputError::new(field, "non-integer number; write rationals as \"p/q\" strings"))
            }
        }
        _ => Err(InputError::new(field, "expected an integer or a \"p/q\" string")),
    }
}

pub fn parse_vec3(v: &Value, field: &str) -> Result<Vec3, InputError> {
    let arr = v
        .as_array()
        .ok_or_else(|| InputError::new(field, "expected an array of 3 rationals"))?;
    if arr.len() != 3 {
        return Err(InputError::new(field, format!("expected 3 coordinates, found {}", arr.len())));
    }
    let mut out = Vec::with_capacity(3);
    for (i, c) in arr.iter().enumerate() {
        out.push(parse_rational(c, &format!("{field}[{i}]"))?);
    }
    let z = out.pop().unwrap();
    let y = out.pop().unwrap();
    let x = out.pop().unwrap();
    Ok(Vec3::new(x, y, z))
}

fn get<'a>(obj: &'a Value, key: &str, field: &str) -> Result<&'a Value, InputError> {
    obj.get(key).ok_or_else(|| InputError::new(format!("{field}.{key}"), "missing"))
}

fn parse_circle(v: &Value, field: &str) -> Result<Circle3, InputError> {
    if !v.is_object() {
        return Err(InputError::new(field, "expected an object with keys n, d, c, r2"));
    }
    let n = parse_vec3(get(v, "n", field)?, &format!("{field}.n"))?;
    let d = parse_rational(get(v, "d", field)?, &format!("{field}.d"))?;
    let c = parse_vec3(get(v, "c", field)?, &format!("{field}.c"))?;
    let r2 = parse_rational(get(v, "r2", field)?, &format!("{field}.r2"))?;
    Circle3::new(n, d, c, r2).map_err(|e| {
        let key = match e {
            GeometryError::ZeroNormal => "n",
            GeometryError::CenterOffPlane => "d",
            _ => "r2",
        };
        InputError::new(format!("{field}.{key}"), e.to_string())
    })
}

/// Parses without checking the cap.
pub fn parse_instance_unchecked(text: &str) -> Result<IncidenceInstance, InputError> {
    let root: Value = serde_json::from_str(text).map_err(|e| InputError::new("$", e.to_string()))?;
    if !root.is_object() {
        return Err(InputError::new("$", "expected a JSON object"));
    }
    let pts = get(&root, "points", "$").map_err(|_| InputError::new("points", "missing"))?;
    let pts = pts.as_array().ok_or_else(|| InputError::new("points", "expected an array"))?;
    let mut points = Vec::with_capacity(pts.len());
    for (i, p) in pts.iter().enumerate() {
        points.push(parse_vec3(p, &format!("points[{i}]"))?);
    }
    let cs = root.get("circles").ok_or_else(|| InputError::new("circles", "missing"))?;
    let cs = cs.as_array().ok_or_else(|| InputError::new("circles", "expected an array"))?;
    let mut circles = Vec::with_capacity(cs.len());
    for (i, c) in cs.iter().enumerate() {
        circles.push(parse_circle(c, &format!("circles[{i}]"))?);
    }
    let q = match root.get("q") {
        None => circles.len().max(1),
        Some(v) => v
            .as_u64()
            .filter(|&q| q >= 1)
            .ok_or_else(|| InputError::new("q", "expected a positive integer"))? as usize,
    };
    Ok(IncidenceInstance::new(points, circles, q))
}

/// Parses and validates: rejects a declared `q` below the true cap.
pub fn parse_instance(text: &str) -> Result<IncidenceInstance, InputError> {
    let inst = parse_instance_unchecked(text)?;
    inst.validate_cap().map_err(|m| InputError::new("q", m))?;
    Ok(inst)
}

pub fn point_json(p: &Point3) -> Value {
    json!([fmt_q(&p.x), fmt_q(&p.y), fmt_q(&p.z)])
}

pub fn circle_json(c: &Circle3) -> Value {
    json!({
        "n": point_json(c.normal()),
        "d": fmt_q(c.offset()),
        "c": point_json(c.center()),
        "r2": fmt_q(c.radius_sq()),
    })
}

pub fn instance_json(inst: &IncidenceInstance) -> Value {
    json!({
        "points": inst.points.iter().map(point_json).collect::<Vec<_>>(),
        "circles": inst.circles.iter().map(circle_json).collect::<Vec<_>>(),
        "q": inst.q,
    })
}

/// Pretty JSON with a trailing newline. Key order is fixed, so output is byte-stable.
pub fn write_instance(inst: &IncidenceInstance) -> String {
    let mut s = serde_json::to_string_pretty(&instance_json(inst)).expect("instance serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate, GenKind, GenSpec};

    #[test]
    fn round_trip() {
        let spec = GenSpec { kind: GenKind::Random, m: 30, n: 12, q: 3, seed: 5 };
        let inst = generate(&spec).unwrap();
        let text = write_instance(&inst);
        let back = parse_instance(&text).unwrap();
        assert_eq!(back.points, inst.points);
        assert_eq!(back.circles, inst.circles);
        assert_eq!(back.q, inst.q);
        assert_eq!(write_instance(&back), text);
    }

    #[test]
    fn field_names_in_errors() {
        let bad = r#"{"points":[[0,0,0],[1,"x",0]],"circles":[],"q":1}"#;
        assert_eq!(parse_instance(bad).unwrap_err().field, "points[1][1]");
        let off = r#"{"points":[],"circles":[{"n":[0,0,1],"d":"1/2","c":[0,0,0],"r2":1}],"q":1}"#;
        assert_eq!(parse_instance(off).unwrap_err().field, "circles[0].d");
        let neg = r#"{"points":[],"circles":[{"n":[0,0,1],"d":0,"c":[0,0,0],"r2":"-1"}],"q":1}"#;
        assert_eq!(parse_instance(neg).unwrap_err().field, "circles[0].r2");
        let miss = r#"{"points":[],"circles":[{"n":[0,0,1],"d":0,"c":[0,0,0]}],"q":1}"#;
        assert_eq!(parse_instance(miss).unwrap_err().field, "circles[0].r2");
        let two = r#"{"points":[],"circles":[
            {"n":[0,0,1],"d":0,"c":[0,0,0],"r2":1},
            {"n":[0,0,1],"d":0,"c":[0,0,0],"r2":4}],"q":1}"#;
        assert_eq!(parse_instance(two).unwrap_err().field, "q");
        assert_eq!(parse_instance("[1,").unwrap_err().field, "$");
    }

    #[test]
    fn empty_instance() {
        let inst = parse_instance(r#"{"points":[],"circles":[],"q":1}"#).unwrap();
        assert_eq!((inst.m(), inst.n()), (0, 0));
    }
}
