mod ambiguity;
mod batch;
mod metrics;
mod optimize;
mod schedule;
mod sweep;

use crate::args::{Command, ReplayArgs};
use crate::config::recorded_args;
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use std::io::Write;
use std::path::Path;

pub fn dispatch(command: Command, argv: &[String]) -> CliResult<()> {
    match command {
        Command::Metrics(a) => metrics::run(&a, argv),
        Command::Schedule(a) => schedule::run(&a, argv),
        Command::Sweep(a) => sweep::run(&a, argv),
        Command::Optimize(a) => optimize::run(&a, argv),
        Command::Batch(a) => batch::run(&a, argv),
        Command::Ambiguity(a) => ambiguity::run(&a, argv),
        Command::Replay(a) => replay(&a),
    }
}

fn replay(args: &ReplayArgs) -> CliResult<()> {
    let manifest = RunManifest::read(&args.manifest)?;
    if manifest.command == "replay" || manifest.args.first() != Some(&manifest.command) {
        return Err(CliError::Validation(format!("{}: not a replayable manifest", args.manifest.display())));
    }
    manifest.verify_inputs()?;
    let mut argv = vec!["fcd".to_string()];
    argv.extend(manifest.args.iter().cloned());
    argv.push("--out-dir".into());
    argv.push(args.out_dir.display().to_string());
    crate::execute(&argv)
}

fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn print(contents: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(contents.as_bytes())?;
    out.flush()?;
    Ok(())
}

/// Records how the outputs in `dir` were produced.
fn write_manifest(dir: &Path, argv: &[String], seed: Option<u64>, inputs: &[&Path]) -> CliResult<()> {
    let args = recorded_args(argv);
    let command = args.iter().find(|a| !a.starts_with('-')).cloned().unwrap_or_default();
    RunManifest::new(&command, &args, seed, inputs)?.write(dir)
}

/// Writes `name` into `out_dir` (with a manifest) or prints it.
fn emit(out_dir: Option<&Path>, name: &str, contents: &str, argv: &[String], seed: Option<u64>, inputs: &[&Path]) -> CliResult<()> {
    match out_dir {
        Some(dir) => {
            create_dir(dir)?;
            write_file(dir, name, contents)?;
            write_manifest(dir, argv, seed, inputs)
        }
        None => print(contents),
    }
}
