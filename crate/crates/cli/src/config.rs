//! `--config file.json`: keys mirror the long flags of the chosen subcommand.
//! Values from the file are spliced into argv before the user's own flags,
//! skipping every key the user already gave.

use std::collections::HashSet;
use std::ffi::OsString;

use serde_json::Value;

fn flag_name(arg: &str) -> Option<&str> {
    let rest = arg.strip_prefix("--")?;
    Some(rest.split('=').next().unwrap_or(rest))
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn render(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

/// Returns argv with config values merged in, or an error message.
pub fn merge(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let args: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let Some(path) = config_path(&args) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let json: Value = serde_json::from_str(&text).map_err(|e| format!("config {path}: {e}"))?;
    let Value::Object(map) = json else {
        return Err(format!("config {path}: expected a JSON object"));
    };
    let given: HashSet<&str> = args.iter().filter_map(|a| flag_name(a)).collect();
    let mut extra = Vec::new();
    for (key, value) in &map {
        if given.contains(key.as_str()) || key == "config" {
            continue;
        }
        let flag = format!("--{key}");
        match value {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => extra.push(flag),
            Value::Array(items) if items.iter().all(Value::is_string) => {
                for item in items {
                    extra.push(flag.clone());
                    extra.push(render(item).unwrap_or_default());
                }
            }
            Value::Array(items) => {
                let parts: Option<Vec<String>> = items.iter().map(render).collect();
                let parts = parts.ok_or_else(|| format!("config key `{key}`: unsupported list"))?;
                extra.push(flag);
                extra.push(parts.join(","));
            }
            other => {
                let v = render(other).ok_or_else(|| format!("config key `{key}`: unsupported value"))?;
                extra.push(flag);
                extra.push(v);
            }
        }
    }
    // argv[0] and the subcommand stay in front
    let split = args.len().min(2);
    let mut out: Vec<OsString> = argv[..split].to_vec();
    out.extend(extra.into_iter().map(OsString::from));
    out.extend(argv[split..].iter().cloned());
    Ok(out)
}
