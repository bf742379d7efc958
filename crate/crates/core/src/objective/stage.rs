use super::{fcd, schedule_weights, ScheduleSpec, UncertaintyState};
use crate::cloud::PointCloud;
use crate::error::Result;
use crate::metrics::DistanceOrder;

/// Coarse-to-fine supervision at one epoch: `K` coarse (prediction, target)
/// pairs plus the fine pair.
#[derive(Debug, Clone, Copy)]
pub struct StageLossSpec<'a> {
    pub coarse: &'a [(&'a PointCloud, &'a PointCloud)],
    pub fine: (&'a PointCloud, &'a PointCloud),
    pub epoch: u32,
}

/// Sum of static-weighted coarse losses and the scheduled fine loss.
///
/// Coarse stages always use `(tau, theta)`; the fine stage uses the schedule
/// at `spec.epoch` (`state` is required only for uncertainty schedules).
pub fn multi_stage_loss(
    spec: &StageLossSpec<'_>,
    schedule: &ScheduleSpec,
    r: DistanceOrder,
    state: Option<&UncertaintyState>,
) -> Result<f64> {
    schedule.validate()?;
    let coarse_w = schedule.static_weights();
    let mut total = 0.0;
    for (pred, target) in spec.coarse {
        total += fcd(pred, target, coarse_w, r)?;
    }
    let fine_w = schedule_weights(schedule, spec.epoch, state)?;
    Ok(total + fcd(spec.fine.0, spec.fine.1, fine_w, r)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{FcdWeights, ScheduleKind};

    fn cloud(pts: &[[f64; 2]]) -> PointCloud {
        PointCloud::from_points(pts).unwrap()
    }

    #[test]
    fn perfect_single_stage_is_zero() {
        let g = cloud(&[[0.0, 0.0], [1.0, 0.5], [2.0, 2.0]]);
        let spec = StageLossSpec { coarse: &[(&g, &g)], fine: (&g, &g), epoch: 10 };
        let v = multi_stage_loss(&spec, &ScheduleSpec::default(), DistanceOrder::L1, None).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn no_coarse_is_fine_only() {
        let p = cloud(&[[0.5, 0.0], [1.0, 0.0]]);
        let g = cloud(&[[0.0, 0.0], [4.0, 0.0]]);
        let sched = ScheduleSpec::with_kind(ScheduleKind::Linear);
        let spec = StageLossSpec { coarse: &[], fine: (&p, &g), epoch: 200 };
        let v = multi_stage_loss(&spec, &sched, DistanceOrder::L1, None).unwrap();
        let expect = fcd(&p, &g, FcdWeights::new(1.0, 1.5).unwrap(), DistanceOrder::L1).unwrap();
        assert_eq!(v, expect);
    }

    #[test]
    fn two_coarse_stages_sum() {
        let g = cloud(&[[0.0, 0.0], [4.0, 0.0], [1.0, 3.0]]);
        let c1 = cloud(&[[0.1, 0.2]]);
        let c2 = cloud(&[[0.0, 0.0], [3.0, 1.0]]);
        let f = cloud(&[[0.5, 0.0], [1.0, 0.0], [3.9, 0.1], [1.0, 2.5]]);
        let sched = ScheduleSpec::with_kind(ScheduleKind::Exponential);
        let spec = StageLossSpec { coarse: &[(&c1, &g), (&c2, &g)], fine: (&f, &g), epoch: 50 };
        let got = multi_stage_loss(&spec, &sched, DistanceOrder::L2, None).unwrap();
        let stat = FcdWeights::new(1.0, 2.0).unwrap();
        let fine_w = FcdWeights::new(1.0, (-0.25f64).exp() + 1.0).unwrap();
        let expect = fcd(&c1, &g, stat, DistanceOrder::L2).unwrap()
            + fcd(&c2, &g, stat, DistanceOrder::L2).unwrap()
            + fcd(&f, &g, fine_w, DistanceOrder::L2).unwrap();
        assert!((got - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn uncertainty_needs_state() {
        let g = cloud(&[[0.0, 0.0]]);
        let spec = StageLossSpec { coarse: &[], fine: (&g, &g), epoch: 0 };
        let sched = ScheduleSpec::with_kind(ScheduleKind::Uncertainty);
        assert!(multi_stage_loss(&spec, &sched, DistanceOrder::L1, None).is_err());
        let st = UncertaintyState::from_bounds(1.0, 2.0).unwrap();
        assert_eq!(multi_stage_loss(&spec, &sched, DistanceOrder::L1, Some(&st)).unwrap(), 0.0);
    }
}
