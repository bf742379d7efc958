//! Direct gradient descent on free point coordinates against a target cloud.
//!
//! The point coordinates play the role of network parameters: each step
//! recomputes nearest-neighbor assignments, evaluates the objective and its
//! subgradient, and moves every unpinned point by `-step_size * gradient`.

mod benchmark;
mod hierarchy;
mod trace;

pub use benchmark::{clustered_grid_benchmark, BenchmarkProblem};
pub use hierarchy::{expand, optimize_hierarchical, HierarchicalOutcome, HierarchySpec};
pub use trace::{OptimizationTrace, TraceRow};

use crate::cloud::{subsample, PointCloud, SampleMethod};
use crate::error::{Error, Result};
use crate::metrics::{
    check_temperature, dcd_from_correspondence, dcd_gradient_into, directional_terms, emd_exact, Correspondence,
    DistanceOrder, DEFAULT_DCD_TEMPERATURE,
};
use crate::objective::{
    fcd_gradient_from_correspondence, schedule_weights, uncertainty_loss, FcdWeights, GradientField, ScheduleKind,
    ScheduleSpec, UncertaintyState,
};
use serde::{Deserialize, Serialize};

/// Abort when the objective grows past this multiple of its initial value.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateRule {
    Plain,
    Momentum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub steps: usize,
    pub step_size: f64,
    pub update_rule: UpdateRule,
    pub momentum: f64,
    /// Seeds the subsampling used for trace EMD snapshots.
    pub seed: u64,
    /// Record a trace row every this many steps (the final state is always recorded).
    pub record_every: usize,
    /// Point indices that never move.
    pub pinned: Vec<usize>,
    /// Skip the cd/dcd/emd snapshot metrics in the trace.
    pub skip_snapshots: bool,
    /// Clouds larger than this are subsampled before the EMD snapshot.
    pub snapshot_emd_size: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            steps: 1000,
            step_size: 0.01,
            update_rule: UpdateRule::Plain,
            momentum: 0.9,
            seed: 0,
            record_every: 10,
            pinned: Vec::new(),
            skip_snapshots: false,
            snapshot_emd_size: 256,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::invalid("steps must be at least 1"));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::invalid(format!("step size must be positive, got {}", self.step_size)));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::invalid(format!("momentum must be in [0, 1), got {}", self.momentum)));
        }
        if self.record_every == 0 {
            return Err(Error::invalid("record_every must be at least 1"));
        }
        if self.snapshot_emd_size == 0 {
            return Err(Error::invalid("snapshot_emd_size must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveKind {
    /// Chamfer with Euclidean terms and outer one half.
    CdL1,
    /// Chamfer with squared terms.
    CdL2,
    /// Flexible-weighted Chamfer; fixed weights or a schedule.
    Fcd,
    /// Density-aware Chamfer used as a loss.
    DcdLoss,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub kind: ObjectiveKind,
    /// Used by `Fcd` when no schedule is supplied.
    pub weights: FcdWeights,
    /// Used by `Fcd`; the Chamfer kinds fix their own order.
    pub r: DistanceOrder,
    /// Used by `DcdLoss`.
    pub temperature: f64,
}

impl ObjectiveSpec {
    pub fn cd_l1() -> Self {
        Self { kind: ObjectiveKind::CdL1, weights: FcdWeights { alpha: 0.5, beta: 0.5 }, r: DistanceOrder::L1, temperature: DEFAULT_DCD_TEMPERATURE }
    }

    pub fn cd_l2() -> Self {
        Self { kind: ObjectiveKind::CdL2, weights: FcdWeights::CHAMFER, r: DistanceOrder::L2, temperature: DEFAULT_DCD_TEMPERATURE }
    }

    pub fn fcd(weights: FcdWeights, r: DistanceOrder) -> Self {
        Self { kind: ObjectiveKind::Fcd, weights, r, temperature: DEFAULT_DCD_TEMPERATURE }
    }

    pub fn dcd_loss(temperature: f64) -> Self {
        Self { kind: ObjectiveKind::DcdLoss, weights: FcdWeights::CHAMFER, r: DistanceOrder::L1, temperature }
    }

    pub fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        if self.kind == ObjectiveKind::DcdLoss {
            check_temperature(self.temperature)?;
        }
        Ok(())
    }
}

/// Weight source for a run: fixed, scheduled, or learned via uncertainty state.
pub(crate) struct WeightPlan {
    fixed: FcdWeights,
    schedule: Option<ScheduleSpec>,
    state: Option<UncertaintyState>,
}

impl WeightPlan {
    pub(crate) fn new(fixed: FcdWeights, schedule: Option<&ScheduleSpec>) -> Result<Self> {
        let schedule = schedule.copied();
        let mut state = None;
        if let Some(s) = &schedule {
            s.validate()?;
            if s.kind == ScheduleKind::Uncertainty {
                state = Some(UncertaintyState::from_bounds(s.tau, s.theta)?);
            }
        }
        Ok(Self { fixed, schedule, state })
    }

    /// Weights at `step`; schedules hold their final value after epoch T.
    pub(crate) fn weights(&self, step: usize) -> Result<FcdWeights> {
        match &self.schedule {
            None => Ok(self.fixed),
            Some(s) => {
                let epoch = step.min(s.total as usize) as u32;
                schedule_weights(s, epoch, self.state.as_ref())
            }
        }
    }

    /// Objective value for the given terms; descends the uncertainty state when present.
    pub(crate) fn value_and_update(&mut self, local: f64, global: f64, w: FcdWeights, step_size: f64) -> Result<f64> {
        match self.state.as_mut() {
            None => Ok(w.alpha * local + w.beta * global),
            Some(state) => {
                let u = uncertainty_loss(local, global, state)?;
                state.s_local -= step_size * u.d_s_local;
                state.s_global -= step_size * u.d_s_global;
                Ok(u.total)
            }
        }
    }
}

pub(crate) struct Snapshotter {
    enabled: bool,
    emd_size: usize,
    seed: u64,
}

impl Snapshotter {
    pub(crate) fn new(config: &OptimizerConfig) -> Self {
        Self { enabled: !config.skip_snapshots, emd_size: config.snapshot_emd_size, seed: config.seed }
    }

    /// `(cd_l1, dcd, emd)` of `pred` against `target`.
    pub(crate) fn take(&self, pred: &PointCloud, target: &PointCloud, c: &Correspondence) -> Result<(Option<f64>, Option<f64>, Option<f64>)> {
        if !self.enabled {
            return Ok((None, None, None));
        }
        let (l, g) = directional_terms(c, DistanceOrder::L1);
        let cd = 0.5 * (l + g);
        let dcd = dcd_from_correspondence(c, DEFAULT_DCD_TEMPERATURE);
        let m = pred.len().min(target.len()).min(self.emd_size);
        let emd = if m == pred.len() && m == target.len() {
            emd_exact(pred, target)?
        } else {
            let a = subsample(pred, m, SampleMethod::Random, self.seed)?;
            let b = subsample(target, m, SampleMethod::Random, self.seed.wrapping_add(1))?;
            emd_exact(&a, &b)?
        };
        Ok((Some(cd), Some(dcd), Some(emd)))
    }
}

/// Applies one update to `coords` (flat), skipping pinned points.
pub(crate) struct Stepper {
    rule: UpdateRule,
    step_size: f64,
    momentum: f64,
    velocity: Vec<f64>,
    frozen: Vec<bool>,
    dim: usize,
}

impl Stepper {
    pub(crate) fn new(config: &OptimizerConfig, len: usize, dim: usize, pinned: &[usize]) -> Result<Self> {
        let mut frozen = vec![false; len];
        for &i in pinned {
            if i >= len {
                return Err(Error::invalid(format!("pinned index {i} out of range for {len} points")));
            }
            frozen[i] = true;
        }
        Ok(Self {
            rule: config.update_rule,
            step_size: config.step_size,
            momentum: config.momentum,
            velocity: vec![0.0; len * dim],
            frozen,
            dim,
        })
    }

    pub(crate) fn apply(&mut self, coords: &mut [f64], grad: &[f64]) {
        for (i, frozen) in self.frozen.iter().enumerate() {
            if *frozen {
                continue;
            }
            for k in i * self.dim..(i + 1) * self.dim {
                let dir = match self.rule {
                    UpdateRule::Plain => grad[k],
                    UpdateRule::Momentum => {
                        self.velocity[k] = self.momentum * self.velocity[k] + grad[k];
                        self.velocity[k]
                    }
                };
                coords[k] -= self.step_size * dir;
            }
        }
    }
}

pub(crate) struct DivergenceGuard {
    initial: Option<f64>,
}

impl DivergenceGuard {
    pub(crate) fn new() -> Self {
        Self { initial: None }
    }

    pub(crate) fn check(&mut self, step: usize, value: f64, grad: &[f64]) -> Result<()> {
        if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::Diverged { step, reason: "non-finite objective or gradient".into() });
        }
        // Uncertainty totals can be negative; compare magnitudes.
        let initial = *self.initial.get_or_insert(value.abs());
        if initial > 0.0 && value.abs() > DIVERGENCE_FACTOR * initial {
            return Err(Error::Diverged {
                step,
                reason: format!("objective {value} exceeds {DIVERGENCE_FACTOR}x initial value {initial}"),
            });
        }
        Ok(())
    }
}

/// Descends `objective` from `init` towards `target`.
///
/// Returns the final cloud and the trace. Deterministic for a fixed config.
pub fn optimize(
    init: &PointCloud,
    target: &PointCloud,
    objective: &ObjectiveSpec,
    schedule: Option<&ScheduleSpec>,
    config: &OptimizerConfig,
) -> Result<(PointCloud, OptimizationTrace)> {
    config.validate()?;
    objective.validate()?;
    init.ensure_non_empty("initial")?;
    target.ensure_non_empty("target")?;
    init.ensure_same_dim(target)?;

    let base = match objective.kind {
        ObjectiveKind::CdL1 => ObjectiveSpec::cd_l1(),
        ObjectiveKind::CdL2 => ObjectiveSpec::cd_l2(),
        _ => *objective,
    };
    let schedule = if objective.kind == ObjectiveKind::Fcd { schedule } else { None };
    let mut plan = WeightPlan::new(base.weights, schedule)?;
    let mut points = init.clone();
    let mut stepper = Stepper::new(config, points.len(), points.dim(), &config.pinned)?;
    let snap = Snapshotter::new(config);
    let mut guard = DivergenceGuard::new();
    let mut trace = OptimizationTrace::default();
    let mut previous: Option<Correspondence> = None;

    for step in 0..=config.steps {
        let c = Correspondence::compute(&points, target)?;
        let w = plan.weights(step)?;
        let switched = previous.as_ref().is_some_and(|p| !p.same_assignment(&c));
        let (value, grad) = match base.kind {
            ObjectiveKind::DcdLoss => {
                let mut g = vec![0.0; points.as_flat().len()];
                dcd_gradient_into(&points, target, &c, base.temperature, &mut g);
                (dcd_from_correspondence(&c, base.temperature), GradientField::from_flat(points.dim(), g))
            }
            _ => {
                let (local, global) = directional_terms(&c, base.r);
                let grad = fcd_gradient_from_correspondence(&points, target, &c, w, base.r);
                let step_size = if step < config.steps { config.step_size } else { 0.0 };
                (plan.value_and_update(local, global, w, step_size)?, grad)
            }
        };
        guard.check(step, value, grad.as_flat())?;

        let last = step == config.steps;
        if step % config.record_every == 0 || last {
            let (cd_l1, dcd, emd) = snap.take(&points, target, &c)?;
            trace.rows.push(TraceRow {
                epoch: step,
                objective: value,
                alpha: w.alpha,
                beta: w.beta,
                cd_l1,
                dcd,
                emd,
                grad_max: grad.max_norm(),
                switched,
            });
        }
        if last {
            break;
        }
        stepper.apply(points.as_flat_mut(), grad.as_flat());
        previous = Some(c);
    }
    Ok((points, trace))
}
