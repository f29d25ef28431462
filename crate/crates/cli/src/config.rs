//! Merging of a JSON config file under command-line flags.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{de::DeserializeOwned, Serialize};
use serde_json::{Map, Value};

/// Load a config object. A manifest written by an earlier run is accepted
/// too; its `config` member is used.
pub fn load(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let obj = match v {
        Value::Object(mut m) => match m.remove("config") {
            Some(Value::Object(inner)) if m.contains_key("tool") => inner,
            Some(other) => {
                m.insert("config".into(), other);
                m
            }
            None => m,
        },
        _ => bail!("config file must hold a JSON object"),
    };
    Ok(obj)
}

/// Fill every field of `flags` that is unset (null) from `config`. Keys the
/// command does not know are rejected.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Map<String, Value>>) -> Result<T> {
    let Value::Object(f) = serde_json::to_value(flags)? else {
        bail!("options must serialize to an object");
    };
    let Some(cfg) = config else {
        return Ok(serde_json::from_value(Value::Object(f))?);
    };
    if let Some(k) = cfg.keys().find(|k| !f.contains_key(*k)) {
        bail!("unknown config key `{k}`");
    }
    let mut merged = cfg.clone();
    for (k, v) in f {
        if !v.is_null() || !merged.contains_key(&k) {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(merged)).context("config does not match the command's options")
}
