//! Report rendering: JSON with 12 significant digits, or a flat CSV table.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Rounds a finite number to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_sig(x)))
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// Serializes `report` and rounds every float.
pub fn to_value<T: Serialize>(report: &T) -> Result<Value> {
    serde_json::to_value(report)
        .map(round_value)
        .map_err(|e| Error::Input(format!("report serialization: {e}")))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(o) => o.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(a) => a
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

fn claims_table(claims: &[Value]) -> Option<(Vec<String>, Vec<Vec<String>>)> {
    let first: &Map<String, Value> = claims.first()?.as_object()?;
    const LEAD: [&str; 6] = ["name", "passed", "value", "target", "tolerance", "detail"];
    let mut header: Vec<String> = LEAD
        .iter()
        .filter(|k| first.contains_key(**k))
        .map(|k| k.to_string())
        .collect();
    header.extend(first.keys().filter(|k| !LEAD.contains(&k.as_str())).cloned());
    let rows = claims
        .iter()
        .map(|c| {
            header
                .iter()
                .map(|h| c.get(h).map(scalar).unwrap_or_default())
                .collect()
        })
        .collect();
    Some((header, rows))
}

/// CSV projection: reports with a `claims` list become one row per claim,
/// everything else a `field,value` listing of the flattened JSON.
pub fn to_csv(v: &Value) -> Result<String> {
    let (header, rows) = match v.get("claims").and_then(Value::as_array).and_then(|c| claims_table(c)) {
        Some(t) => t,
        None => {
            let mut flat = Vec::new();
            flatten("", v, &mut flat);
            (
                vec!["field".into(), "value".into()],
                flat.into_iter().map(|(k, v)| vec![k, v]).collect(),
            )
        }
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Input(format!("csv: {e}"));
    w.write_record(&header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Input(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Input(format!("csv: {e}")))
}

pub fn render(v: &Value, format: Format) -> Result<String> {
    match format {
        Format::Json => serde_json::to_string_pretty(v)
            .map(|s| s + "\n")
            .map_err(|e| Error::Input(format!("json: {e}"))),
        Format::Csv => to_csv(v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    #[allow(clippy::approx_constant)]
    fn twelve_significant_digits() {
        assert_eq!(round_sig(std::f64::consts::FRAC_1_SQRT_2), 0.707106781187);
        assert_eq!(round_sig(1.0 / 3.0 * 1e-7), 3.33333333333e-8);
        assert_eq!(round_sig(0.5), 0.5);
    }

    #[test]
    fn claims_become_rows() {
        let v = json!({"claims": [{"name": "a", "passed": true, "value": 1.5}], "other": 1});
        let s = to_csv(&v).unwrap();
        assert_eq!(s, "name,passed,value\na,true,1.5\n");
    }

    #[test]
    fn nested_fields_flatten() {
        let v = json!({"a": {"b": [1, 2]}, "c": "x"});
        assert_eq!(to_csv(&v).unwrap(), "field,value\na.b.0,1\na.b.1,2\nc,x\n");
    }
}
