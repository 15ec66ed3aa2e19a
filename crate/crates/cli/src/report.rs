use incidence_core::io::{parse_instance, InputError};
use incidence_core::poly::text::parse_canonical;
use incidence_core::rational::parse_q;
use incidence_core::{IncidenceInstance, MultiPoly, Point3, Vec3};
use serde::Serialize;
use std::fmt;
use std::path::Path;

use crate::PolyArg;

#[derive(Debug)]
pub enum CliError {
    Input(InputError),
    Verify(String),
    Io(String),
}

impl CliError {
    pub fn input(field: impl Into<String>, message: impl fmt::Display) -> Self {
        CliError::Input(InputError::new(field, message.to_string()))
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Verify(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(e) => write!(f, "{e}"),
            CliError::Verify(m) => write!(f, "verification failed: {m}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        CliError::Input(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_instance(path: &Path) -> CliResult<IncidenceInstance> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input("--in", format!("{}: {e}", path.display())))?;
    Ok(parse_instance(&text)?)
}

pub fn read_poly(arg: &PolyArg) -> CliResult<MultiPoly> {
    let (field, text) = match (&arg.poly, &arg.terms) {
        (Some(p), _) => (
            "--poly",
            std::fs::read_to_string(p).map_err(|e| CliError::input("--poly", format!("{}: {e}", p.display())))?,
        ),
        (None, Some(t)) => ("--terms", t.replace(';', "\n")),
        (None, None) => return Err(CliError::input("--poly", "give --poly FILE or --terms TEXT")),
    };
    let f = parse_canonical(&text, Some(3)).map_err(|e| CliError::input(field, e))?;
    if f.nvars() != 3 {
        return Err(CliError::input(field, format!("expected 3 exponents per term, found {}", f.nvars())));
    }
    Ok(f)
}

/// `x,y,z` with rational coordinates.
pub fn parse_point(s: &str, field: &str) -> CliResult<Point3> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(CliError::input(field, format!("expected x,y,z, found {s:?}")));
    }
    let mut c = Vec::with_capacity(3);
    for (i, p) in parts.iter().enumerate() {
        c.push(parse_q(p).map_err(|e| CliError::input(format!("{field}[{i}]"), e))?);
    }
    let z = c.pop().unwrap();
    let y = c.pop().unwrap();
    let x = c.pop().unwrap();
    Ok(Vec3::new(x, y, z))
}

pub fn parse_list<T: std::str::FromStr>(s: &str, field: &str) -> CliResult<Vec<T>> {
    let out = s
        .split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| CliError::input(field, format!("bad entry {p:?}"))))
        .collect::<CliResult<Vec<T>>>()?;
    if out.is_empty() {
        return Err(CliError::input(field, "empty list"));
    }
    Ok(out)
}

pub fn poly_lines(f: &MultiPoly) -> Vec<String> {
    f.to_canonical().lines().map(str::to_owned).collect()
}

pub fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// Header plus rows, written with the csv crate.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn float(v: f64) -> String {
    format!("{v}")
}
