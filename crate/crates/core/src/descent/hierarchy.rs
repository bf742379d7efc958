use super::{DivergenceGuard, OptimizationTrace, OptimizerConfig, Snapshotter, Stepper, TraceRow, WeightPlan};
use crate::cloud::{subsample, PointCloud, SampleMethod};
use crate::error::{Error, Result};
use crate::metrics::{directional_terms, Correspondence, DistanceOrder};
use crate::objective::{fcd_gradient_from_correspondence, GradientField, ScheduleSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Two-level parametric cloud: each coarse point spawns `children_per_coarse`
/// fine points at `coarse + offset`, with the offsets as free variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchySpec {
    pub coarse_count: usize,
    pub children_per_coarse: usize,
    /// Standard deviation of the initial offsets; 0 starts every child on its parent.
    pub offset_init_scale: f64,
    /// Keep offsets at their initial values.
    pub freeze_offsets: bool,
    pub r: DistanceOrder,
}

impl HierarchySpec {
    pub fn fine_count(&self) -> usize {
        self.coarse_count * self.children_per_coarse
    }
}

#[derive(Debug, Clone)]
pub struct HierarchicalOutcome {
    pub fine: PointCloud,
    pub coarse: PointCloud,
    pub coarse_target: PointCloud,
    pub trace: OptimizationTrace,
}

/// Fine cloud for the given coarse points and flat offsets.
pub fn expand(coarse: &PointCloud, offsets: &[f64], children: usize) -> Result<PointCloud> {
    let dim = coarse.dim();
    let mut fine = Vec::with_capacity(offsets.len());
    for (i, c) in coarse.iter().enumerate() {
        for j in 0..children {
            let o = &offsets[(i * children + j) * dim..(i * children + j + 1) * dim];
            fine.extend(c.iter().zip(o).map(|(a, b)| a + b));
        }
    }
    PointCloud::from_flat(dim, fine)
}

/// Jointly descends coarse coordinates and child offsets on
/// `fcd(coarse, coarse_target; tau, theta) + fcd(fine, target; schedule(epoch))`.
///
/// The coarse target is the farthest-point subsample of `target` to
/// `coarse_count` points. `config.pinned` refers to coarse points.
pub fn optimize_hierarchical(
    init_coarse: &PointCloud,
    hierarchy: &HierarchySpec,
    target: &PointCloud,
    schedule: &ScheduleSpec,
    config: &OptimizerConfig,
) -> Result<HierarchicalOutcome> {
    config.validate()?;
    schedule.validate()?;
    target.ensure_non_empty("target")?;
    init_coarse.ensure_same_dim(target)?;
    if hierarchy.coarse_count == 0 || hierarchy.children_per_coarse == 0 {
        return Err(Error::invalid("hierarchy needs at least one coarse point and one child each"));
    }
    if init_coarse.len() != hierarchy.coarse_count {
        return Err(Error::invalid(format!(
            "initial coarse cloud has {} points, hierarchy expects {}",
            init_coarse.len(),
            hierarchy.coarse_count
        )));
    }
    if !(hierarchy.offset_init_scale >= 0.0 && hierarchy.offset_init_scale.is_finite()) {
        return Err(Error::invalid("offset_init_scale must be finite and non-negative"));
    }
    let dim = target.dim();
    let m = hierarchy.children_per_coarse;
    let coarse_target = subsample(target, hierarchy.coarse_count.min(target.len()), SampleMethod::FarthestPoint, config.seed)?;

    let mut offsets = vec![0.0; hierarchy.fine_count() * dim];
    if hierarchy.offset_init_scale > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let normal = Normal::new(0.0, hierarchy.offset_init_scale).expect("valid scale");
        offsets.iter_mut().for_each(|o| *o = normal.sample(&mut rng));
    }

    let r = hierarchy.r;
    let static_w = schedule.static_weights();
    let mut plan = WeightPlan::new(static_w, Some(schedule))?;
    let mut coarse = init_coarse.clone();
    let mut coarse_step = Stepper::new(config, coarse.len(), dim, &config.pinned)?;
    let mut offset_step = Stepper::new(config, hierarchy.fine_count(), dim, &[])?;
    let snap = Snapshotter::new(config);
    let mut guard = DivergenceGuard::new();
    let mut trace = OptimizationTrace::default();
    let mut previous: Option<(Correspondence, Correspondence)> = None;

    for step in 0..=config.steps {
        let fine = expand(&coarse, &offsets, m)?;
        let cc = Correspondence::compute(&coarse, &coarse_target)?;
        let cf = Correspondence::compute(&fine, target)?;
        let w = plan.weights(step)?;
        let switched = previous
            .as_ref()
            .is_some_and(|(a, b)| !a.same_assignment(&cc) || !b.same_assignment(&cf));

        let (cl, cg) = directional_terms(&cc, r);
        let (fl, fg) = directional_terms(&cf, r);
        let step_size = if step < config.steps { config.step_size } else { 0.0 };
        let value = static_w.alpha * cl + static_w.beta * cg + plan.value_and_update(fl, fg, w, step_size)?;

        let fine_grad = fcd_gradient_from_correspondence(&fine, target, &cf, w, r);
        let mut coarse_grad = fcd_gradient_from_correspondence(&coarse, &coarse_target, &cc, static_w, r);
        for i in 0..coarse.len() {
            let acc = coarse_grad.vector_mut(i);
            for j in 0..m {
                for (a, b) in acc.iter_mut().zip(fine_grad.vector(i * m + j)) {
                    *a += b;
                }
            }
        }
        let offset_grad = if hierarchy.freeze_offsets {
            GradientField::zeros(fine.len(), dim)
        } else {
            fine_grad
        };
        guard.check(step, value, coarse_grad.as_flat())?;
        guard.check(step, value, offset_grad.as_flat())?;

        let last = step == config.steps;
        if step % config.record_every == 0 || last {
            let (cd_l1, dcd, emd) = snap.take(&fine, target, &cf)?;
            trace.rows.push(TraceRow {
                epoch: step,
                objective: value,
                alpha: w.alpha,
                beta: w.beta,
                cd_l1,
                dcd,
                emd,
                grad_max: coarse_grad.max_norm().max(offset_grad.max_norm()),
                switched,
            });
        }
        if last {
            return Ok(HierarchicalOutcome { fine, coarse, coarse_target, trace });
        }
        coarse_step.apply(coarse.as_flat_mut(), coarse_grad.as_flat());
        offset_step.apply(&mut offsets, offset_grad.as_flat());
        previous = Some((cc, cf));
    }
    unreachable!("loop returns on the final step")
}
