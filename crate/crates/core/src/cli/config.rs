use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Turns the `[command]` table of a TOML config file into command-line
/// flags. Keys are flag names (`_` and `-` are interchangeable); `true`
/// booleans become bare switches, arrays become comma-separated lists.
pub fn config_flags(path: &Path, command: &str) -> Result<Vec<OsString>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config file {}", path.display()))?;
    let table: toml::Table = text.parse().with_context(|| format!("parsing config file {}", path.display()))?;
    for (k, v) in &table {
        if !v.is_table() {
            bail!("{}: top-level key {k:?} must live under a [command] table", path.display());
        }
    }
    let Some(section) = table.get(command) else {
        return Ok(Vec::new());
    };
    let section = section.as_table().expect("checked above");
    let mut flags = Vec::new();
    for (key, value) in section {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            toml::Value::Boolean(true) => flags.push(flag.into()),
            toml::Value::Boolean(false) => {}
            toml::Value::Array(items) => {
                let parts: Result<Vec<String>> = items.iter().map(|v| scalar(path, key, v)).collect();
                flags.push(flag.into());
                flags.push(parts?.join(",").into());
            }
            other => {
                flags.push(flag.into());
                flags.push(scalar(path, key, other)?.into());
            }
        }
    }
    Ok(flags)
}

fn scalar(path: &Path, key: &str, v: &toml::Value) -> Result<String> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        _ => bail!("{}: unsupported value for {key:?}", path.display()),
    })
}

/// Inserts `extra` right after the subcommand name so that flags given on
/// the command line, which come later, take precedence.
pub fn splice_after_subcommand(args: &[OsString], command: &str, extra: Vec<OsString>) -> Vec<OsString> {
    let takes_value = ["--config", "--jobs", "-j"];
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if a == command {
            let mut out = args[..=i].to_vec();
            out.extend(extra);
            out.extend_from_slice(&args[i + 1..]);
            return out;
        }
        i += if takes_value.contains(&a.as_ref()) { 2 } else { 1 };
    }
    args.to_vec()
}
