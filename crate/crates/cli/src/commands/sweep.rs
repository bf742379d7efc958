use super::emit;
use crate::args::SweepArgs;
use crate::error::CliResult;
use fcd_core::stalemate::{sweep, sweep_csv, StalemateSetup, SweepConfig};
use fcd_core::FcdWeights;

pub fn run(args: &SweepArgs, argv: &[String]) -> CliResult<()> {
    let setup = StalemateSetup { weights: FcdWeights::new(args.alpha, args.beta)?, ..StalemateSetup::default() };
    let config = SweepConfig::with_range(setup, args.start, args.end, args.step)?;
    let rows = sweep(&config)?;
    emit(args.out_dir.as_deref(), "sweep.csv", &sweep_csv(&config, &rows), argv, None, &[])
}
