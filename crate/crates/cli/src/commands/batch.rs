use super::emit;
use super::metrics::evaluate;
use crate::args::BatchArgs;
use crate::error::{reading, CliError, CliResult};
use fcd_core::cloud::io;
use fcd_core::MetricReport;
use rayon::prelude::*;
use std::path::PathBuf;

struct Pair {
    name: String,
    pred: PathBuf,
    gt: PathBuf,
}

/// Pairs `<dir>/pred/<name>` with `<dir>/gt/<name>` for names matching the
/// pattern, sorted by name.
fn pairs(args: &BatchArgs) -> CliResult<Vec<Pair>> {
    if !args.dir.is_dir() {
        return Err(CliError::Io(format!("{}: not a directory", args.dir.display())));
    }
    let pattern = glob::Pattern::new(&args.glob).map_err(|e| CliError::Validation(format!("--glob: {e}")))?;
    let pred_dir = args.dir.join("pred");
    if !pred_dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut names = Vec::new();
    for entry in std::fs::read_dir(&pred_dir)? {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if entry.file_type()?.is_file() && pattern.matches(&name) {
            names.push(name);
        }
    }
    names.sort();
    Ok(names
        .into_iter()
        .map(|name| Pair { pred: pred_dir.join(&name), gt: args.dir.join("gt").join(&name), name })
        .collect())
}

fn row(pair: &Pair, args: &BatchArgs) -> CliResult<String> {
    let pred = reading(&pair.pred, io::read_cloud(&pair.pred))?;
    let gt = reading(&pair.gt, io::read_cloud(&pair.gt))?;
    let (report, notes) = evaluate(&pred, &gt, None, None, &args.options).map_err(|e| e.context(&pair.name))?;
    for n in notes {
        eprintln!("fcd: {}: {n}", pair.name);
    }
    if pair.name.contains([',', '\n', '"']) {
        return Err(CliError::Validation(format!("file name {:?} cannot be written to CSV", pair.name)));
    }
    Ok(format!("{},{}\n", pair.name, report.csv_row()))
}

pub fn run(args: &BatchArgs, argv: &[String]) -> CliResult<()> {
    if args.parallelism == 0 {
        return Err(CliError::Validation("--parallelism must be at least 1".into()));
    }
    let pairs = pairs(args)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.parallelism)
        .build()
        .map_err(|e| CliError::Validation(format!("worker pool: {e}")))?;
    let rows: Vec<String> = pool.install(|| pairs.par_iter().map(|p| row(p, args)).collect::<CliResult<_>>())?;
    let mut csv = format!("name,{}\n", MetricReport::csv_header());
    csv.extend(rows);
    let inputs: Vec<&std::path::Path> = pairs.iter().flat_map(|p| [p.pred.as_path(), p.gt.as_path()]).collect();
    emit(args.out_dir.as_deref(), "batch.csv", &csv, argv, Some(args.options.seed), &inputs)
}
