//! `key = value` override files for [`SnoConfig`].
//!
//! ```text
//! # comments and blank lines are ignored
//! n_s_init = 100
//! region_schedule = growing
//! t_max = none
//! snapshots = 400, 800, 4000
//! ```

use serde_json::{Map, Value};
use sno::SnoConfig;

use crate::error::{CliError, Result};

/// Applies every override in `text` on top of `base`.
pub fn apply_overrides(base: &SnoConfig, text: &str) -> Result<SnoConfig> {
    let mut fields: Map<String, Value> = match serde_json::to_value(base) {
        Ok(Value::Object(map)) => map,
        _ => unreachable!("SnoConfig serializes to an object"),
    };
    // fields that are unset by default are the optional ones
    let optional: Vec<String> = match serde_json::to_value(SnoConfig::default()) {
        Ok(Value::Object(map)) => map.into_iter().filter(|(_, v)| v.is_null()).map(|(k, _)| k).collect(),
        _ => Vec::new(),
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| CliError::Usage(format!("config line {}: {msg}", lineno + 1));
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let current = fields
            .get(key)
            .ok_or_else(|| bad(format!("unknown key `{key}`")))?;
        let parsed = if optional.iter().any(|k| k == key) {
            parse_like(&Value::Null, key, value)
        } else {
            parse_like(current, key, value)
        }
        .map_err(bad)?;
        fields.insert(key.to_string(), parsed);
    }
    serde_json::from_value(Value::Object(fields)).map_err(|e| CliError::Usage(format!("config: {e}")))
}

fn parse_like(current: &Value, key: &str, value: &str) -> std::result::Result<Value, String> {
    let number = |v: &str| -> std::result::Result<Value, String> {
        if let Ok(n) = v.parse::<u64>() {
            return Ok(Value::from(n));
        }
        v.parse::<f64>()
            .ok()
            .and_then(serde_json::Number::from_f64)
            .map(Value::Number)
            .ok_or_else(|| format!("`{key}` expects a number, got `{v}`"))
    };
    match current {
        Value::Bool(_) => value
            .parse::<bool>()
            .map(Value::Bool)
            .map_err(|_| format!("`{key}` expects true or false, got `{value}`")),
        Value::Number(_) => number(value),
        Value::String(_) => Ok(Value::String(value.to_ascii_lowercase())),
        Value::Array(_) => value
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(number)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Value::Array),
        // optional fields
        Value::Null => match value.to_ascii_lowercase().as_str() {
            "none" | "null" | "" => Ok(Value::Null),
            _ => number(value),
        },
        Value::Object(_) => Err(format!("`{key}` cannot be set from a config file")),
    }
}
