use super::{create_dir, print, write_file, write_manifest};
use crate::args::{Benchmark, ObjectiveArg, OptimizeArgs, UpdateArg};
use crate::error::{reading, CliError, CliResult};
use fcd_core::cloud::io;
use fcd_core::descent::{
    clustered_grid_benchmark, optimize, optimize_hierarchical, HierarchySpec, ObjectiveSpec, OptimizationTrace,
    OptimizerConfig, UpdateRule,
};
use fcd_core::PointCloud;
use std::path::Path;

struct Problem {
    init: PointCloud,
    target: PointCloud,
    steps: usize,
    step_size: f64,
}

fn problem(args: &OptimizeArgs) -> CliResult<Problem> {
    let (init, target, steps, step_size) = match args.benchmark {
        Some(Benchmark::ClusteredGrid) => {
            let b = clustered_grid_benchmark(args.seed)?;
            (b.init, b.target, 2000, 0.05)
        }
        None => {
            let (i, t) = (args.init.as_deref().expect("clap"), args.target.as_deref().expect("clap"));
            (reading(i, io::read_cloud(i))?, reading(t, io::read_cloud(t))?, 1000, 0.01)
        }
    };
    Ok(Problem { init, target, steps: args.steps.unwrap_or(steps), step_size: args.step_size.unwrap_or(step_size) })
}

fn summary(trace: &OptimizationTrace) -> CliResult<String> {
    let last = trace.last().ok_or_else(|| CliError::Numerical("empty trace".into()))?;
    Ok(serde_json::to_string(last)? + "\n")
}

pub fn run(args: &OptimizeArgs, argv: &[String]) -> CliResult<()> {
    let p = problem(args)?;
    let config = OptimizerConfig {
        steps: p.steps,
        step_size: p.step_size,
        update_rule: match args.update {
            UpdateArg::Plain => UpdateRule::Plain,
            UpdateArg::Momentum => UpdateRule::Momentum,
        },
        momentum: args.momentum,
        seed: args.seed,
        record_every: args.record_every,
        pinned: args.pin.clone(),
        skip_snapshots: args.no_snapshots,
        ..OptimizerConfig::default()
    };
    let schedule = args.schedule.spec()?;
    let dir = args.out_dir.as_path();
    create_dir(dir)?;

    let trace = if let (Some(coarse_count), Some(children)) = (args.coarse_count, args.children) {
        if args.objective != ObjectiveArg::Fcd {
            return Err(CliError::Validation("the coarse-to-fine hierarchy needs --objective fcd".into()));
        }
        if coarse_count > p.init.len() && args.benchmark.is_some() {
            return Err(CliError::Validation(format!("benchmark has only {} initial points", p.init.len())));
        }
        let init_coarse = match args.benchmark {
            Some(_) => p.init.select(&(0..coarse_count).collect::<Vec<_>>()),
            None => p.init,
        };
        let hierarchy = HierarchySpec {
            coarse_count,
            children_per_coarse: children,
            offset_init_scale: args.offset_init_scale,
            freeze_offsets: args.freeze_offsets,
            r: args.order,
        };
        let outcome = optimize_hierarchical(&init_coarse, &hierarchy, &p.target, &schedule, &config)?;
        write_file(dir, "final.xyz", &io::format_xyz(&outcome.fine))?;
        write_file(dir, "coarse.xyz", &io::format_xyz(&outcome.coarse))?;
        outcome.trace
    } else {
        let (objective, schedule) = match args.objective {
            ObjectiveArg::CdL1 => (ObjectiveSpec::cd_l1(), None),
            ObjectiveArg::CdL2 => (ObjectiveSpec::cd_l2(), None),
            ObjectiveArg::DcdLoss => (ObjectiveSpec::dcd_loss(args.temperature), None),
            ObjectiveArg::Fcd => (ObjectiveSpec::fcd(schedule.static_weights(), args.order), Some(&schedule)),
        };
        let (fin, trace) = optimize(&p.init, &p.target, &objective, schedule, &config)?;
        write_file(dir, "final.xyz", &io::format_xyz(&fin))?;
        trace
    };
    write_file(dir, "trace.csv", &trace.to_csv())?;
    let inputs: Vec<&Path> = args.init.iter().chain(&args.target).map(|p| p.as_path()).collect();
    write_manifest(dir, argv, Some(args.seed), &inputs)?;
    print(&summary(&trace)?)
}
