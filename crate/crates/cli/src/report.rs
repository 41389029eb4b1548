//! JSON reports and CSV figure data.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::CliError;

pub const SIG_DIGITS: usize = 12;

/// `v` rounded to [`SIG_DIGITS`] significant digits.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{:.*e}", SIG_DIGITS - 1, v).parse().unwrap_or(v)
}

/// Rounds every floating-point number in `v`; non-finite numbers become `null`.
pub fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            *v = Number::from_f64(round_sig(x)).map(Value::Number).unwrap_or(Value::Null);
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

/// A JSON object whose keys serialize in sorted order.
#[derive(Debug, Default)]
pub struct Report(Map<String, Value>);

impl Report {
    pub fn new() -> Self {
        Report(Map::new())
    }

    pub fn set<T: serde::Serialize>(&mut self, key: &str, value: T) {
        let v = serde_json::to_value(value).expect("report values are plain data");
        self.0.insert(key.to_string(), v);
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }

    pub fn to_json(&self) -> String {
        let mut v = Value::Object(self.0.clone());
        round_numbers(&mut v);
        let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Number formatting for CSV cells.
pub fn csv_number(v: f64) -> String {
    format!("{}", round_sig(v))
}

/// Writes `contents` to `path` via a temporary file in the same directory and a rename,
/// or to standard output when `path` is `None`.
pub fn write_output(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        out.write_all(contents.as_bytes())?;
        return Ok(out.flush()?);
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}
