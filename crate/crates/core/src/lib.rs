//! Point-cloud distance metrics and the flexible-weighted Chamfer objective.
//!
//! - [`cloud`]: point clouds, exact nearest-neighbor index, sampling, meshes, file I/O.
//! - [`metrics`]: Chamfer, density-aware Chamfer, EMD, F-Score, Hausdorff, P2F, fidelity.
//! - [`objective`]: weighted Chamfer value and subgradient, weight schedules,
//!   uncertainty weighting, coarse-to-fine loss composition.
//! - [`descent`]: gradient descent on raw point coordinates.
//! - [`stalemate`]: closed-form gradient analysis of the two-point stalemate
//!   and the equal-Chamfer clustered/uniform construction.

pub mod cloud;
pub mod descent;
pub mod error;
pub mod metrics;
pub mod objective;
pub mod stalemate;
mod sum;

pub use cloud::{NnIndex, PointCloud, TriangleMesh};
pub use error::{Error, Result};
pub use metrics::{DistanceOrder, MetricReport};
pub use objective::{FcdWeights, GradientField, ScheduleKind, ScheduleSpec, UncertaintyState};
pub use sum::compensated_sum;
