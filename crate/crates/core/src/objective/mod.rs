//! The flexible-weighted Chamfer objective: value, analytic (sub)gradients,
//! weight schedules, uncertainty weighting and multi-stage composition.

mod fcd;
mod schedule;
mod stage;
mod uncertainty;

pub use fcd::{distance_gradient, fcd, fcd_from_correspondence, fcd_gradient, fcd_gradient_from_correspondence, FcdWeights, GradientField};
pub use schedule::{schedule_weights, ScheduleKind, ScheduleSpec};
pub use stage::{multi_stage_loss, StageLossSpec};
pub use uncertainty::{uncertainty_loss, UncertaintyLoss, UncertaintyState};
