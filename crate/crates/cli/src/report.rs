use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

/// Machine-readable record of one run.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub outputs: Vec<String>,
    pub results: Value,
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(serialize_with = "finite_or_tag")]
    pub residual: f64,
    #[serde(serialize_with = "finite_or_tag")]
    pub tol: f64,
    pub pass: bool,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_owned(),
            params: BTreeMap::new(),
            checks: Vec::new(),
            outputs: Vec::new(),
            results: Value::Null,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).unwrap_or(Value::Null);
        self.params.insert(key.to_owned(), value);
    }

    /// Records `residual < tol`. A NaN residual fails.
    pub fn check(&mut self, name: &str, residual: f64, tol: f64) {
        self.checks.push(Check {
            name: name.to_owned(),
            residual,
            tol,
            pass: residual < tol,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                let tag = if c.pass { "PASS" } else { "FAIL" };
                format!("{tag} {}: {:.3e} (tol {:e})", c.name, c.residual, c.tol)
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// 17 significant digits, or `inf` / `-inf` / `nan`.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// A float as JSON: a number when finite, otherwise its tag as a string.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(fmt_float(x)), Value::Number)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn finite_or_tag<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    num(*x).serialize(s)
}

/// Writes rows under `header` to `out`, or to stdout when `out` is `None`.
pub fn write_csv(out: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()
}
