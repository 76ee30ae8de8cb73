//! Canonical JSON for diagnostic reports: sorted keys, floats rounded to 12
//! significant digits, non-finite floats as the strings `NaN`, `Infinity`,
//! `-Infinity`. Files carry a `timestamp` field that [`canonical`] drops.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use ctrwkit_core::stats::{DiagnosticReport, Estimate, ParamValue};
use serde_json::{Map, Number, Value};

use crate::error::{CliError, Result};

pub const TIMESTAMP_KEY: &str = "timestamp";

/// `v` rounded to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap()
}

fn num(v: f64) -> Value {
    match Number::from_f64(round12(v)) {
        Some(n) => Value::Number(n),
        None if v.is_nan() => Value::String("NaN".into()),
        None if v > 0.0 => Value::String("Infinity".into()),
        None => Value::String("-Infinity".into()),
    }
}

fn param_value(p: &ParamValue) -> Value {
    match p {
        ParamValue::Int(i) => Value::from(*i),
        ParamValue::Num(v) => num(*v),
        ParamValue::Text(s) => Value::String(s.clone()),
        ParamValue::List(xs) => Value::Array(xs.iter().map(|v| num(*v)).collect()),
        ParamValue::Flag(b) => Value::Bool(*b),
    }
}

pub fn to_value(report: &DiagnosticReport) -> Value {
    let params: Map<String, Value> = report.params.iter().map(|(k, v)| (k.clone(), param_value(v))).collect();
    let estimates: Vec<Value> = report
        .estimates
        .iter()
        .map(|e| {
            let mut m = Map::new();
            m.insert("name".into(), Value::String(e.name.clone()));
            m.insert("value".into(), num(e.value));
            m.insert("ci_low".into(), num(e.ci_low));
            m.insert("ci_high".into(), num(e.ci_high));
            m.insert("n_samples".into(), Value::from(e.n_samples));
            Value::Object(m)
        })
        .collect();
    let mut m = Map::new();
    m.insert("scenario".into(), Value::String(report.scenario.clone()));
    m.insert("params".into(), Value::Object(params));
    m.insert("seed".into(), Value::from(report.seed));
    m.insert("estimates".into(), Value::Array(estimates));
    Value::Object(m)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap();
    s.push('\n');
    s
}

/// The comparison canon: the report without its timestamp.
pub fn canonical(report: &DiagnosticReport) -> String {
    pretty(&to_value(report))
}

/// Canonical form of a report file's text (timestamp removed).
pub fn canonical_text(text: &str) -> std::result::Result<String, String> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if let Value::Object(m) = &mut v {
        m.remove(TIMESTAMP_KEY);
    }
    Ok(pretty(&v))
}

/// Write the report with a timestamp (seconds since the epoch).
pub fn emit_report(report: &DiagnosticReport, path: &Path) -> Result<()> {
    let mut v = to_value(report);
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    v.as_object_mut().unwrap().insert(TIMESTAMP_KEY.into(), Value::from(now));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::write(path, e))?;
    }
    std::fs::write(path, pretty(&v)).map_err(|e| CliError::write(path, e))
}

fn float(v: &Value) -> std::result::Result<f64, String> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| format!("bad number {n}")),
        Value::String(s) if s == "NaN" => Ok(f64::NAN),
        Value::String(s) if s == "Infinity" => Ok(f64::INFINITY),
        Value::String(s) if s == "-Infinity" => Ok(f64::NEG_INFINITY),
        other => Err(format!("expected a number, got {other}")),
    }
}

fn parse_param(v: &Value) -> std::result::Result<ParamValue, String> {
    Ok(match v {
        Value::Number(n) if n.is_i64() => ParamValue::Int(n.as_i64().unwrap()),
        Value::Number(n) if n.is_u64() => return Err(format!("integer {n} out of range")),
        Value::Number(_) => ParamValue::Num(float(v)?),
        Value::String(s) if matches!(s.as_str(), "NaN" | "Infinity" | "-Infinity") => ParamValue::Num(float(v)?),
        Value::String(s) => ParamValue::Text(s.clone()),
        Value::Bool(b) => ParamValue::Flag(*b),
        Value::Array(xs) => ParamValue::List(xs.iter().map(float).collect::<std::result::Result<_, _>>()?),
        other => return Err(format!("unsupported parameter value {other}")),
    })
}

fn field<'a>(m: &'a Map<String, Value>, key: &str) -> std::result::Result<&'a Value, String> {
    m.get(key).ok_or_else(|| format!("missing field `{key}`"))
}

/// Inverse of [`to_value`]; a `timestamp` field is ignored.
pub fn parse_report(text: &str) -> std::result::Result<DiagnosticReport, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let m = v.as_object().ok_or("report must be an object")?;
    let scenario = field(m, "scenario")?.as_str().ok_or("scenario must be a string")?.to_string();
    let seed = field(m, "seed")?.as_u64().ok_or("seed must be an unsigned integer")?;
    let mut params = BTreeMap::new();
    for (k, p) in field(m, "params")?.as_object().ok_or("params must be an object")? {
        params.insert(k.clone(), parse_param(p)?);
    }
    let mut estimates = Vec::new();
    for e in field(m, "estimates")?.as_array().ok_or("estimates must be an array")? {
        let e = e.as_object().ok_or("estimate must be an object")?;
        estimates.push(Estimate {
            name: field(e, "name")?.as_str().ok_or("name must be a string")?.to_string(),
            value: float(field(e, "value")?)?,
            ci_low: float(field(e, "ci_low")?)?,
            ci_high: float(field(e, "ci_high")?)?,
            n_samples: field(e, "n_samples")?.as_u64().ok_or("n_samples must be an unsigned integer")?,
        });
    }
    Ok(DiagnosticReport { scenario, params, seed, estimates })
}

pub fn read_report(path: &Path) -> Result<DiagnosticReport> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
    parse_report(&text).map_err(|e| CliError::format(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round12(-2.0 / 3.0 * 1e-200), -6.66666666667e-201);
        assert_eq!(round12(123456789012345.0), 123456789012000.0);
        assert!(round12(f64::NAN).is_nan());
    }

    #[test]
    fn empty_report() {
        let r = DiagnosticReport::new("empty", 3);
        let s = canonical(&r);
        assert!(s.contains("\"estimates\": []"));
        assert_eq!(parse_report(&s).unwrap(), r);
    }

    #[test]
    fn keys_sorted_and_non_finite() {
        let mut r = DiagnosticReport::new("x", u64::MAX).param("zeta", 1.0).param("alpha", f64::INFINITY);
        r.push(Estimate { name: "e".into(), value: f64::NAN, ci_low: f64::NEG_INFINITY, ci_high: 1.0, n_samples: 1 });
        let s = canonical(&r);
        assert!(s.find("\"alpha\"").unwrap() < s.find("\"zeta\"").unwrap());
        assert!(s.find("\"ci_high\"").unwrap() < s.find("\"ci_low\"").unwrap());
        assert!(s.contains("\"NaN\"") && s.contains("\"-Infinity\"") && s.contains("\"Infinity\""));
        let back = parse_report(&s).unwrap();
        assert!(back.estimates[0].value.is_nan());
        assert_eq!(back.seed, u64::MAX);
        assert_eq!(back.params["alpha"], ParamValue::Num(f64::INFINITY));
    }

    #[test]
    fn timestamp_is_outside_the_canon() {
        let r = DiagnosticReport::new("t", 1).param("n", 10u64);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        emit_report(&r, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.contains(TIMESTAMP_KEY));
        assert_eq!(canonical_text(&text).unwrap(), canonical(&r));
        assert_eq!(read_report(&p).unwrap(), r);
    }

    #[test]
    fn write_failure_is_tagged() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "").unwrap();
        let err = emit_report(&DiagnosticReport::new("t", 1), &blocker.join("r.json")).unwrap_err();
        assert_eq!(err.tag(), "IO_WRITE");
        assert_eq!(err.exit_code(), 3);
    }
}
