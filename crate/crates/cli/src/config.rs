//! Flat `key = value` config files. Keys are long flag names without the
//! leading dashes; `#` starts a comment. Config values are spliced into the
//! argument list right after the subcommand, so flags given on the command
//! line (which come later) take precedence.

use std::ffi::OsString;
use std::path::Path;

use clap::Command;

use crate::error::{CliError, Result};

pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!("line {}: expected key = value", i + 1)));
        };
        let key = k.trim().trim_start_matches("--").to_string();
        if key.is_empty() {
            return Err(CliError::Config(format!("line {}: empty key", i + 1)));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// `--config` value, if present, scanning the raw arguments.
pub fn find_config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
    }
    None
}

/// Index of the subcommand token in `args`.
fn subcommand_index(cmd: &Command, args: &[OsString]) -> Option<usize> {
    let takes_value = |long: &str| {
        cmd.get_arguments()
            .any(|a| a.get_long() == Some(long) && a.get_action().takes_values())
    };
    let mut i = 1;
    while i < args.len() {
        let s = args[i].to_string_lossy();
        if let Some(long) = s.strip_prefix("--") {
            if !long.contains('=') && takes_value(long) {
                i += 1;
            }
        } else if !s.starts_with('-') {
            return cmd.find_subcommand(s.as_ref()).map(|_| i);
        }
        i += 1;
    }
    None
}

/// Splices config entries into `args` after the subcommand.
pub fn apply(cmd: &Command, args: Vec<OsString>, path: &Path) -> Result<Vec<OsString>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let entries = parse(&text)?;
    let Some(at) = subcommand_index(cmd, &args) else {
        return Ok(args);
    };
    let name = args[at].to_string_lossy().into_owned();
    let sub = cmd.find_subcommand(&name).expect("index points at a subcommand");
    let mut spliced = Vec::new();
    for (key, value) in entries {
        if key == "config" {
            return Err(CliError::Config(
                "config files cannot include other config files".into(),
            ));
        }
        let arg = sub
            .get_arguments()
            .chain(cmd.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| CliError::Config(format!("unknown config key `{key}` for `{name}`")))?;
        if arg.get_action().takes_values() {
            spliced.push(OsString::from(format!("--{key}")));
            spliced.push(OsString::from(value));
        } else {
            match value.as_str() {
                "true" => spliced.push(OsString::from(format!("--{key}"))),
                "false" => {}
                other => {
                    return Err(CliError::Config(format!(
                        "`{key}` expects true or false, got `{other}`"
                    )))
                }
            }
        }
    }
    let mut out = args;
    out.splice(at + 1..at + 1, spliced);
    Ok(out)
}
