//! Verification reports and deterministic JSON output.

use serde_json::{json, Map, Value};

/// Version of the JSON layout written by every command.
pub const SCHEMA_VERSION: u64 = 1;
const SIGNIFICANT_DIGITS: usize = 15;

/// One named check: `pass` iff `residual <= tolerance`.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    /// Plain-language name of the property being verified.
    pub anchor: String,
    /// `NaN` when the computation itself failed.
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: &str, anchor: &str, residual: f64, tolerance: f64) -> Self {
        Check { name: name.into(), anchor: anchor.into(), residual, tolerance, pass: residual <= tolerance, note: None }
    }

    pub fn errored(name: &str, anchor: &str, tolerance: f64, err: &dyn std::fmt::Display) -> Self {
        Check { note: Some(err.to_string()), ..Check::new(name, anchor, f64::NAN, tolerance) }
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), json!(self.name));
        m.insert("anchor".into(), json!(self.anchor));
        m.insert("residual".into(), number(self.residual));
        m.insert("tolerance".into(), number(self.tolerance));
        m.insert("pass".into(), json!(self.pass));
        if let Some(n) = &self.note {
            m.insert("note".into(), json!(n));
        }
        Value::Object(m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub scenario_id: String,
    pub checks: Vec<Check>,
    /// Seconds; only filled in with `--timing`.
    pub wall_time: Option<f64>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA_VERSION,
            "scenario_id": self.scenario_id,
            "pass": self.pass(),
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            "wall_time": self.wall_time.map_or(Value::Null, number),
        })
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "anchor", "residual", "tolerance", "pass"])?;
        for c in &self.checks {
            w.write_record([c.name.clone(), c.anchor.clone(), format_float(c.residual), format_float(c.tolerance), c.pass.to_string()])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8"))
    }

    /// One line per check for the terminal.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status}  {:<44} residual {:>10.3e}  tol {:.1e}", c.name, c.residual, c.tolerance));
            if let Some(n) = &c.note {
                out.push_str(&format!("  ({n})"));
            }
            out.push('\n');
        }
        out
    }
}

/// `x` rounded to 15 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses")
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        round_sig(x).to_string()
    }
}

/// JSON number rounded to 15 significant digits; non-finite values become `null`.
pub fn number(x: f64) -> Value {
    serde_json::Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number)
}

/// Round every float in `v`.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => number(n.as_f64().expect("f64 number")),
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with rounded floats and a trailing newline.
pub fn render_json(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&normalize(v)).expect("JSON values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_fifteen_digits() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(1.234_567_890_123_456_7e-7), 1.23456789012346e-7);
        assert_eq!(round_sig(-2.0), -2.0);
        assert!(round_sig(f64::NAN).is_nan());
    }

    #[test]
    fn pass_follows_residual_and_tolerance() {
        assert!(Check::new("a", "x", 1e-7, 1e-6).pass);
        assert!(Check::new("a", "x", 0.0, 0.0).pass);
        assert!(!Check::new("a", "x", 2e-6, 1e-6).pass);
        let e = Check::errored("a", "x", 1.0, &"boom");
        assert!(!e.pass && e.residual.is_nan());
        let r = VerificationReport { scenario_id: "s".into(), checks: vec![e], wall_time: None };
        let j = r.to_json();
        assert_eq!(j["schema"], 1);
        assert!(j["checks"][0]["residual"].is_null());
        assert!(j["wall_time"].is_null());
        assert_eq!(j["checks"][0]["note"], "boom");
    }

    #[test]
    fn normalize_rounds_nested_floats() {
        let v = normalize(json!({"a": [0.1 + 0.2, 3], "b": {"c": 1.0000000000000002}}));
        assert_eq!(v, json!({"a": [0.3, 3], "b": {"c": 1.0}}));
    }
}
