use super::{closed_form_gradients, numeric_gradients, StalemateSetup};
use crate::error::{Error, Result};
use crate::metrics::DistanceOrder;
use crate::objective::{fcd, FcdWeights};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Largest tolerated gap between the closed-form and general gradients.
pub const CROSS_CHECK_TOL: f64 = 1e-12;

/// Positions `p2 = (x, 0)` at which to evaluate the two-point objectives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub setup: StalemateSetup,
    pub xs: Vec<f64>,
}

impl Default for SweepConfig {
    /// `x = 0.6, 0.7, ..., 3.4`, skipping the midpoint 2.0.
    fn default() -> Self {
        let xs = (6..=34).filter(|&i| i != 20).map(|i| i as f64 / 10.0).collect();
        Self { setup: StalemateSetup::default(), xs }
    }
}

impl SweepConfig {
    /// Evenly spaced abscissae from `start` to `end` inclusive (rounded to
    /// 1e-12), dropping the midpoint.
    pub fn with_range(setup: StalemateSetup, start: f64, end: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && end >= start) || !start.is_finite() || !end.is_finite() {
            return Err(Error::invalid(format!("invalid sweep range {start}..{end} step {step}")));
        }
        let count = ((end - start) / step + 1e-9).floor() as usize;
        let mid = 0.5 * (setup.g1[0] + setup.g2[0]);
        let xs = (0..=count)
            // Snap to 1e-12 so e.g. 0.6 + 6 * 0.1 prints as 1.2.
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .filter(|x| (x - mid).abs() > 1e-9 * step.max(1.0))
            .collect();
        Ok(Self { setup, xs })
    }
}

/// Values and x-gradients at one sweep position. "cd" is the equal-weight objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: f64,
    pub cd_l1: f64,
    pub fcd_l1: f64,
    pub cd_l2: f64,
    pub fcd_l2: f64,
    pub grad_cd_l1_x: f64,
    pub grad_fcd_l1_x: f64,
    pub grad_cd_l2_x: f64,
    pub grad_fcd_l2_x: f64,
}

pub const SWEEP_CSV_HEADER: &str =
    "x,cd_l1,fcd_l1,cd_l2,fcd_l2,grad_cd_l1_x,grad_fcd_l1_x,grad_cd_l2_x,grad_fcd_l2_x";

/// Evaluates every row, cross-checking the general subgradient against the
/// closed forms (fails if they disagree by more than [`CROSS_CHECK_TOL`]).
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    if config.xs.is_empty() {
        return Err(Error::invalid("sweep has no abscissae"));
    }
    if config.xs.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::invalid("sweep abscissae must be strictly increasing"));
    }
    let setup = &config.setup;
    let target = setup.targets();
    let w = setup.weights;
    config
        .xs
        .iter()
        .map(|&x| {
            let p2 = [x, setup.g1[1]];
            let closed = closed_form_gradients(p2, setup)?;
            let numeric = numeric_gradients(p2, setup)?;
            for (name, a, b) in [
                ("cd_l1", closed.cd_l1, numeric.cd_l1),
                ("fcd_l1", closed.fcd_l1, numeric.fcd_l1),
                ("cd_l2", closed.cd_l2, numeric.cd_l2),
                ("fcd_l2", closed.fcd_l2, numeric.fcd_l2),
            ] {
                if (a[0] - b[0]).abs() > CROSS_CHECK_TOL || (a[1] - b[1]).abs() > CROSS_CHECK_TOL {
                    return Err(Error::Construction(format!(
                        "{name} gradient at x={x}: closed form {a:?} vs subgradient {b:?}"
                    )));
                }
            }
            let pred = setup.predicted(p2);
            let value = |wt: FcdWeights, r| fcd(&pred, &target, wt, r);
            Ok(SweepRow {
                x,
                cd_l1: value(FcdWeights::CHAMFER, DistanceOrder::L1)?,
                fcd_l1: value(w, DistanceOrder::L1)?,
                cd_l2: value(FcdWeights::CHAMFER, DistanceOrder::L2)?,
                fcd_l2: value(w, DistanceOrder::L2)?,
                grad_cd_l1_x: numeric.cd_l1[0],
                grad_fcd_l1_x: numeric.fcd_l1[0],
                grad_cd_l2_x: numeric.cd_l2[0],
                grad_fcd_l2_x: numeric.fcd_l2[0],
            })
        })
        .collect()
}

/// CSV with a leading `#` comment recording the setup, then the header and one line per row.
pub fn sweep_csv(config: &SweepConfig, rows: &[SweepRow]) -> String {
    let s = &config.setup;
    let mut out = format!(
        "# g1=({},{}) g2=({},{}) p1=({},{}) weights=({},{}); p1 and the x range are toolkit defaults unless overridden\n",
        s.g1[0], s.g1[1], s.g2[0], s.g2[1], s.p1[0], s.p1[1], s.weights.alpha, s.weights.beta
    );
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.x, r.cd_l1, r.fcd_l1, r.cd_l2, r.fcd_l2, r.grad_cd_l1_x, r.grad_fcd_l1_x, r.grad_cd_l2_x, r.grad_fcd_l2_x
        )
        .unwrap();
    }
    out
}
