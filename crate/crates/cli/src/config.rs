//! `--config FILE` support: the file's keys are turned into `--key=value`
//! tokens placed right after the subcommand, so clap validates them like any
//! other flag and later command-line flags override them.

use std::path::Path;

use serde_json::Value;

use crate::error::CliError;

/// Removes `--config` from `args` and splices the file's flags in after the
/// subcommand.
pub fn expand(mut args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = take_config(&mut args)? else {
        return Ok(args);
    };
    let Some(sub) = args.iter().skip(1).position(|a| !a.starts_with('-')).map(|i| i + 1) else {
        return Err(CliError::Config("--config needs a subcommand".into()));
    };
    let tokens = file_tokens(Path::new(&path), &args[sub])?;
    args.splice(sub + 1..sub + 1, tokens);
    Ok(args)
}

fn take_config(args: &mut Vec<String>) -> Result<Option<String>, CliError> {
    let Some(i) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(None);
    };
    let arg = args.remove(i);
    if let Some(path) = arg.strip_prefix("--config=") {
        return Ok(Some(path.to_owned()));
    }
    if i < args.len() {
        Ok(Some(args.remove(i)))
    } else {
        Err(CliError::Config("--config needs a file path".into()))
    }
}

fn file_tokens(path: &Path, subcommand: &str) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
    tokens(&value, subcommand).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
}

pub fn tokens(value: &Value, subcommand: &str) -> Result<Vec<String>, String> {
    let Value::Object(map) = value else {
        return Err("top level must be an object".into());
    };
    let mut out = Vec::new();
    for (key, v) in map {
        let key = key.replace('_', "-");
        if key == "command" {
            match v.as_str() {
                Some(c) if c == subcommand => continue,
                _ => return Err(format!("file is for command {v}, not {subcommand}")),
            }
        }
        if key == "config" {
            return Err("config files cannot nest".into());
        }
        match v {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => out.push(format!("--{key}")),
            Value::Array(items) => {
                let parts = items
                    .iter()
                    .map(scalar)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| format!("{key}: {e}"))?;
                out.push(format!("--{key}={}", parts.join(",")));
            }
            other => out.push(format!("--{key}={}", scalar(other).map_err(|e| format!("{key}: {e}"))?)),
        }
    }
    Ok(out)
}

fn scalar(v: &Value) -> Result<String, String> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        _ => Err(format!("expected a number or string, got {v}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_become_flags() {
        let v = json!({"target_rmse": 0.002, "pis": [0, -0.5], "connectivity": "2d", "command": "sweep"});
        let t = tokens(&v, "sweep").unwrap();
        assert_eq!(t, ["--connectivity=2d", "--pis=0,-0.5", "--target-rmse=0.002"]);
    }

    #[test]
    fn wrong_command_rejected() {
        assert!(tokens(&json!({"command": "fit"}), "sweep").is_err());
        assert!(tokens(&json!([1, 2]), "sweep").is_err());
        assert!(tokens(&json!({"x": {"y": 1}}), "sweep").is_err());
    }

    #[test]
    fn config_flag_is_removed() {
        let args: Vec<String> = ["raest", "--config=/nonexistent.json", "sweep"]
            .map(String::from)
            .into();
        assert!(matches!(expand(args), Err(CliError::Config(_))));
        let args: Vec<String> = ["raest", "fit", "--input", "x"].map(String::from).into();
        assert_eq!(expand(args.clone()).unwrap(), args);
    }
}
