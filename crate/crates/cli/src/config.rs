use crate::args::Cli;
use crate::error::{CliError, CliResult};
use clap::parser::ValueSource;
use clap::{CommandFactory, Error as ClapError};
use serde_json::Value;

/// Parses with clap, turning help/version into a clean exit and usage
/// errors into exit-code 3 failures.
pub fn try_matches(argv: &[String]) -> CliResult<clap::ArgMatches> {
    Cli::command().try_get_matches_from(argv).map_err(usage)
}

pub fn usage(e: ClapError) -> CliError {
    use clap::error::ErrorKind;
    if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
        let _ = e.print();
        std::process::exit(0);
    }
    CliError::Usage(e.render().to_string())
}

/// Appends flags from the `--config` JSON file for every key not already
/// given on the command line.
pub fn merge(mut argv: Vec<String>) -> CliResult<Vec<String>> {
    let matches = try_matches(&argv)?;
    let Some((name, sub)) = matches.subcommand() else {
        return Ok(argv);
    };
    let Some(path) = matches.get_one::<std::path::PathBuf>("config") else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)?;
    let Value::Object(entries) = value else {
        return Err(CliError::Validation("config file must hold a JSON object".into()));
    };
    let cmd = Cli::command();
    let subcmd = cmd.find_subcommand(name).expect("parsed subcommand exists");
    for (key, v) in entries {
        let arg = subcmd
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| CliError::Validation(format!("config: unknown option {key:?} for {name}")))?;
        if sub.value_source(arg.get_id().as_str()) == Some(ValueSource::CommandLine) {
            continue;
        }
        let flag = format!("--{key}");
        match v {
            Value::Bool(true) => argv.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                for item in items {
                    argv.push(flag.clone());
                    argv.push(scalar(&key, &item)?);
                }
            }
            other => {
                argv.push(flag);
                argv.push(scalar(&key, &other)?);
            }
        }
    }
    Ok(argv)
}

fn scalar(key: &str, v: &Value) -> CliResult<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        _ => Err(CliError::Validation(format!("config: {key} must be a string, number or list of them"))),
    }
}

/// The argument list to record in a manifest: program name, `--config`
/// (already merged) and `--out-dir` (supplied again on replay) removed.
pub fn recorded_args(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut iter = argv.iter().skip(1);
    while let Some(a) = iter.next() {
        if a == "--config" || a == "--out-dir" {
            iter.next();
        } else if !(a.starts_with("--config=") || a.starts_with("--out-dir=")) {
            out.push(a.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn recorded_args_drop_config_and_out_dir() {
        let argv = strings(&["fcd", "--config", "c.json", "sweep", "--out-dir=o", "--step", "0.2", "--out-dir", "x"]);
        assert_eq!(recorded_args(&argv), strings(&["sweep", "--step", "0.2"]));
    }
}
