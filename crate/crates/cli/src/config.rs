//! `--config FILE`: flat `key=value` lines naming long flags of the chosen
//! subcommand. Flags given on the command line win over the file.

use std::ffi::OsString;
use std::path::Path;

use clap::Command;

use crate::error::{CliError, CliResult};

pub fn parse_config(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", i + 1)));
        }
        pairs.push((key, v.trim().to_string()));
    }
    Ok(pairs)
}

fn take_config(args: &mut Vec<OsString>) -> CliResult<Option<OsString>> {
    let mut found = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy().into_owned();
        if a == "--config" {
            if i + 1 >= args.len() {
                return Err(CliError::Usage("--config needs a file".into()));
            }
            found = Some(args.remove(i + 1));
            args.remove(i);
        } else if let Some(v) = a.strip_prefix("--config=") {
            found = Some(OsString::from(v));
            args.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(found)
}

fn given_on_command_line(args: &[OsString], long: &str) -> bool {
    let flag = format!("--{long}");
    let prefix = format!("--{long}=");
    args.iter().any(|a| {
        let a = a.to_string_lossy();
        a == flag.as_str() || a.starts_with(&prefix)
    })
}

/// Removes `--config FILE` from `args` and appends the file's settings as
/// flags the command line does not already set.
pub fn merge_config(cmd: &Command, mut args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some(file) = take_config(&mut args)? else {
        return Ok(args);
    };
    let path = Path::new(&file);
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let pairs = parse_config(&text)?;

    let sub = args
        .iter()
        .skip(1)
        .find_map(|a| cmd.find_subcommand(a.to_string_lossy().as_ref()))
        .ok_or_else(|| CliError::Usage("--config needs a subcommand".into()))?;
    for (key, value) in pairs {
        let arg = sub
            .get_arguments()
            .chain(cmd.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()) && !a.is_hide_set())
            .ok_or_else(|| {
                CliError::Usage(format!("config key {key:?} is not a flag of {}", sub.get_name()))
            })?;
        if given_on_command_line(&args, &key) {
            continue;
        }
        if arg.get_action().takes_values() {
            args.push(format!("--{key}={value}").into());
        } else {
            match value.as_str() {
                "true" => args.push(format!("--{key}").into()),
                "false" => {}
                _ => return Err(CliError::Usage(format!("config key {key}: expected true or false"))),
            }
        }
    }
    Ok(args)
}
