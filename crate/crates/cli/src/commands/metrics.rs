use super::{create_dir, print, write_file, write_manifest};
use crate::args::{MetricName, MetricOptions, MetricsArgs, OutputFormat};
use crate::error::{reading, CliError, CliResult};
use fcd_core::cloud::{io, subsample, SampleMethod};
use fcd_core::metrics::{self, EXACT_EMD_CAP};
use fcd_core::{MetricReport, PointCloud, TriangleMesh};
use std::path::Path;

const ALWAYS: [MetricName; 6] =
    [MetricName::CdL1, MetricName::CdL2, MetricName::Dcd, MetricName::Emd, MetricName::Fscore, MetricName::Hausdorff];

fn name(m: MetricName) -> &'static str {
    match m {
        MetricName::CdL1 => "cd_l1",
        MetricName::CdL2 => "cd_l2",
        MetricName::Dcd => "dcd",
        MetricName::Emd => "emd",
        MetricName::Fscore => "fscore",
        MetricName::Hausdorff => "hausdorff",
        MetricName::P2f => "p2f",
        MetricName::Fidelity => "fidelity",
    }
}

/// Computes the selected metrics. Returns the report and notes about
/// metrics that were skipped.
pub fn evaluate(
    pred: &PointCloud,
    gt: &PointCloud,
    mesh: Option<&TriangleMesh>,
    input: Option<&PointCloud>,
    opts: &MetricOptions,
) -> CliResult<(MetricReport, Vec<String>)> {
    let selected: Vec<MetricName> = match &opts.metrics {
        Some(list) => list.clone(),
        None => {
            let mut all = ALWAYS.to_vec();
            if mesh.is_some() {
                all.push(MetricName::P2f);
            }
            if input.is_some() {
                all.push(MetricName::Fidelity);
            }
            all
        }
    };
    let mut report = MetricReport::default();
    let mut notes = Vec::new();
    for m in selected {
        let ctx = |e: fcd_core::Error| CliError::from(e).context(name(m));
        let value = match m {
            MetricName::CdL1 => metrics::chamfer_l1(pred, gt).map_err(ctx)?,
            MetricName::CdL2 => metrics::chamfer_l2(pred, gt).map_err(ctx)?,
            MetricName::Dcd => metrics::dcd(pred, gt, opts.temperature).map_err(ctx)?,
            MetricName::Fscore => metrics::fscore(pred, gt, opts.fscore_threshold).map_err(ctx)?,
            MetricName::Hausdorff => metrics::hausdorff(pred, gt).map_err(ctx)?,
            MetricName::Emd => match emd(pred, gt, opts).map_err(ctx)? {
                Ok(v) => v,
                Err(note) => {
                    notes.push(note);
                    continue;
                }
            },
            MetricName::P2f => {
                let mesh = mesh.ok_or_else(|| CliError::Validation("p2f: requires --mesh".into()))?;
                metrics::point_to_mesh(pred, mesh).map_err(ctx)?
            }
            MetricName::Fidelity => {
                let input = input.ok_or_else(|| CliError::Validation("fidelity: requires --input".into()))?;
                metrics::fidelity(input, pred).map_err(ctx)?
            }
        };
        let slot = match m {
            MetricName::CdL1 => &mut report.cd_l1,
            MetricName::CdL2 => &mut report.cd_l2,
            MetricName::Dcd => &mut report.dcd,
            MetricName::Emd => &mut report.emd,
            MetricName::Fscore => &mut report.fscore,
            MetricName::Hausdorff => &mut report.hausdorff,
            MetricName::P2f => &mut report.p2f,
            MetricName::Fidelity => &mut report.fidelity,
        };
        *slot = Some(value);
    }
    Ok((report, notes))
}

/// Exact EMD when possible; the Sinkhorn approximation on request. The inner
/// `Err` explains a skip.
fn emd(pred: &PointCloud, gt: &PointCloud, opts: &MetricOptions) -> fcd_core::Result<Result<f64, String>> {
    if opts.emd_approx {
        let n = pred.len().min(gt.len());
        let shrink = |c: &PointCloud| {
            if c.len() > n {
                subsample(c, n, SampleMethod::Random, opts.seed)
            } else {
                Ok(c.clone())
            }
        };
        let (p, g) = (shrink(pred)?, shrink(gt)?);
        let mean = metrics::emd_approx(&p, &g, opts.emd_iterations, opts.emd_epsilon)?;
        return Ok(Ok(if opts.emd_sum { mean * n as f64 } else { mean }));
    }
    if pred.len() != gt.len() {
        return Ok(Err(format!("emd skipped: sizes differ ({} vs {}); pass --emd-approx", pred.len(), gt.len())));
    }
    if pred.len() > EXACT_EMD_CAP {
        return Ok(Err(format!("emd skipped: {} points exceed the exact cap {EXACT_EMD_CAP}; pass --emd-approx", pred.len())));
    }
    if opts.emd_sum {
        metrics::emd_exact_sum(pred, gt).map(Ok)
    } else {
        metrics::emd_exact(pred, gt).map(Ok)
    }
}

pub fn csv(report: &MetricReport) -> String {
    format!("{}\n{}\n", MetricReport::csv_header(), report.csv_row())
}

pub fn json(report: &MetricReport) -> CliResult<String> {
    Ok(serde_json::to_string(report)? + "\n")
}

pub fn run(args: &MetricsArgs, argv: &[String]) -> CliResult<()> {
    let pred = reading(&args.pred, io::read_cloud(&args.pred))?;
    let gt = reading(&args.gt, io::read_cloud(&args.gt))?;
    let mesh = args.mesh.as_deref().map(|p| reading(p, io::read_mesh(p))).transpose()?;
    let input = args.input.as_deref().map(|p| reading(p, io::read_cloud(p))).transpose()?;
    let (report, notes) = evaluate(&pred, &gt, mesh.as_ref(), input.as_ref(), &args.options)?;
    for n in notes {
        eprintln!("fcd: {n}");
    }
    let (json, csv) = (json(&report)?, csv(&report));
    if let Some(dir) = &args.out_dir {
        create_dir(dir)?;
        write_file(dir, "metrics.json", &json)?;
        write_file(dir, "metrics.csv", &csv)?;
        let mut inputs: Vec<&Path> = vec![&args.pred, &args.gt];
        inputs.extend(args.mesh.as_deref());
        inputs.extend(args.input.as_deref());
        write_manifest(dir, argv, Some(args.options.seed), &inputs)?;
    }
    print(match args.format {
        OutputFormat::Json => &json,
        OutputFormat::Csv => &csv,
    })
}
