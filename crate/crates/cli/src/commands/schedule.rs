use super::emit;
use crate::args::{ScheduleArgs, ScheduleCmdArgs};
use crate::error::CliResult;
use fcd_core::objective::schedule_weights;
use fcd_core::{ScheduleKind, ScheduleSpec, UncertaintyState};
use std::fmt::Write as _;

impl ScheduleArgs {
    pub fn spec(&self) -> CliResult<ScheduleSpec> {
        let spec = ScheduleSpec {
            kind: self.schedule,
            theta: self.theta,
            tau: self.tau,
            transition: self.transition,
            total: self.total,
            sigma: self.sigma,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// `epoch,alpha,beta` for epochs 0..=T. Uncertainty weights are learned
/// during descent, so that kind shows its initial weights throughout.
pub fn schedule_csv(spec: &ScheduleSpec) -> CliResult<String> {
    let state = match spec.kind {
        ScheduleKind::Uncertainty => Some(UncertaintyState::from_bounds(spec.tau, spec.theta)?),
        _ => None,
    };
    let mut out = String::from("epoch,alpha,beta\n");
    for epoch in 0..=spec.total {
        let w = schedule_weights(spec, epoch, state.as_ref())?;
        writeln!(out, "{epoch},{},{}", w.alpha, w.beta).unwrap();
    }
    Ok(out)
}

pub fn run(args: &ScheduleCmdArgs, argv: &[String]) -> CliResult<()> {
    let csv = schedule_csv(&args.schedule.spec()?)?;
    emit(args.out_dir.as_deref(), "schedule.csv", &csv, argv, None, &[])
}
