use super::{create_dir, print, write_file, write_manifest};
use crate::args::AmbiguityArgs;
use crate::error::CliResult;
use fcd_core::cloud::io::format_xyz;
use fcd_core::stalemate::{build_ambiguity_pair, AmbiguityConfig};

pub fn run(args: &AmbiguityArgs, argv: &[String]) -> CliResult<()> {
    let mut config = AmbiguityConfig::new(args.n, args.seed);
    config.temperature = args.temperature;
    config.spacing = args.spacing.unwrap_or(2.0 / args.temperature);
    let pair = build_ambiguity_pair(&config)?;
    let report = serde_json::to_string(&pair.report)? + "\n";
    if let Some(dir) = &args.out_dir {
        create_dir(dir)?;
        write_file(dir, "target.xyz", &format_xyz(&pair.target))?;
        write_file(dir, "clustered.xyz", &format_xyz(&pair.clustered))?;
        write_file(dir, "uniform.xyz", &format_xyz(&pair.uniform))?;
        write_file(dir, "report.json", &report)?;
        write_manifest(dir, argv, Some(args.seed), &[])?;
    }
    print(&report)
}
