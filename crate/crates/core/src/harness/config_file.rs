use std::path::Path;

use serde_json::Value;

use crate::config::SolverConfig;
use crate::error::{CcboError, Result};

/// Applies a flat JSON object of parameter overrides, e.g.
/// `{"alpha": 30, "eps_indep": "inf", "init_box": [-1, 1]}`.
pub fn apply_config_text(config: &mut SolverConfig, text: &str) -> Result<()> {
    let value: Value = serde_json::from_str(text).map_err(|e| CcboError::Config(format!("config file: {e}")))?;
    let Value::Object(map) = value else {
        return Err(CcboError::Config("config file: expected a JSON object".into()));
    };
    for (key, v) in &map {
        let text = match v {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.clone(),
            Value::Array(items) => items
                .iter()
                .map(|x| match x {
                    Value::Number(n) => Ok(n.to_string()),
                    _ => Err(CcboError::Config(format!("{key}: array entries must be numbers"))),
                })
                .collect::<Result<Vec<_>>>()?
                .join(","),
            other => return Err(CcboError::Config(format!("{key}: unsupported value {other}"))),
        };
        config.set(key, &text)?;
    }
    Ok(())
}

pub fn load_config_file(config: &mut SolverConfig, path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path).map_err(|e| CcboError::Io(format!("{}: {e}", path.display())))?;
    apply_config_text(config, &text)
}
