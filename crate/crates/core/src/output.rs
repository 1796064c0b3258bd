//! Deterministic text output: CSV tables and JSON reports with numbers at 12
//! significant digits.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

/// `x` in scientific notation with 12 significant digits.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        // Avoid "-0.00000000000e0".
        return "0.00000000000e0".to_string();
    }
    format!("{x:.11e}")
}

/// Round `x` to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    fmt12(x).parse().expect("formatted float parses")
}

pub fn csv<I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt12).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let (Some(f), false, false) = (n.as_f64(), n.is_i64(), n.is_u64()) {
                if let Some(r) = serde_json::Number::from_f64(round12(f)) {
                    *n = r;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), text)?;
    Ok(())
}
