//! Point-set similarity metrics: Chamfer (both orders and both directional
//! terms), density-aware Chamfer, EMD, F-Score, Hausdorff, point-to-mesh and
//! fidelity.

mod dcd;
mod emd;
mod matching;
mod report;

pub use dcd::{dcd, dcd_from_correspondence, DEFAULT_DCD_TEMPERATURE};
pub(crate) use dcd::{check_temperature, dcd_gradient_into};
pub use emd::{emd_approx, emd_exact, emd_exact_sum, min_cost_assignment, EXACT_EMD_CAP};
pub use matching::Correspondence;
pub(crate) use matching::nearest_all;
pub use report::MetricReport;

use crate::cloud::{NnIndex, PointCloud, TriangleMesh};
use crate::error::{Error, Result};
use crate::sum::mean;
use serde::{Deserialize, Serialize};

pub const DEFAULT_FSCORE_THRESHOLD: f64 = 0.01;

/// Whether nearest-neighbor distances enter a loss as-is or squared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistanceOrder {
    /// Euclidean distance.
    #[serde(rename = "l1")]
    L1,
    /// Squared Euclidean distance.
    #[serde(rename = "l2")]
    L2,
}

impl DistanceOrder {
    /// Applies the order to a squared Euclidean distance.
    #[inline]
    pub fn from_squared(self, sq: f64) -> f64 {
        match self {
            DistanceOrder::L1 => sq.sqrt(),
            DistanceOrder::L2 => sq,
        }
    }
}

impl std::str::FromStr for DistanceOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "l1" => Ok(DistanceOrder::L1),
            "2" | "l2" => Ok(DistanceOrder::L2),
            _ => Err(Error::invalid(format!("unknown distance order {s:?}"))),
        }
    }
}

/// Mean local-fitting and global-coverage terms for a known correspondence.
pub fn directional_terms(c: &Correspondence, r: DistanceOrder) -> (f64, f64) {
    let local = mean(c.pred_to_target.iter().map(|m| r.from_squared(m.1)), c.pred_to_target.len());
    let global = mean(c.target_to_pred.iter().map(|m| r.from_squared(m.1)), c.target_to_pred.len());
    (local, global)
}

/// Mean over predicted points of the distance (of order `r`) to the nearest target point.
pub fn cd_local(pred: &PointCloud, target: &PointCloud, r: DistanceOrder) -> Result<f64> {
    one_way(pred, target, r)
}

/// Mean over target points of the distance (of order `r`) to the nearest predicted point.
pub fn cd_global(pred: &PointCloud, target: &PointCloud, r: DistanceOrder) -> Result<f64> {
    one_way(target, pred, r)
}

fn one_way(from: &PointCloud, to: &PointCloud, r: DistanceOrder) -> Result<f64> {
    from.ensure_non_empty("query")?;
    from.ensure_same_dim(to)?;
    let index = NnIndex::build(to)?;
    let nn = nearest_all(from, &index)?;
    Ok(mean(nn.iter().map(|m| r.from_squared(m.1)), nn.len()))
}

/// Chamfer distance with Euclidean terms and an outer factor of one half.
pub fn chamfer_l1(pred: &PointCloud, target: &PointCloud) -> Result<f64> {
    let c = Correspondence::compute(pred, target)?;
    let (l, g) = directional_terms(&c, DistanceOrder::L1);
    Ok(0.5 * (l + g))
}

/// Chamfer distance with squared terms, no outer factor.
pub fn chamfer_l2(pred: &PointCloud, target: &PointCloud) -> Result<f64> {
    let c = Correspondence::compute(pred, target)?;
    let (l, g) = directional_terms(&c, DistanceOrder::L2);
    Ok(l + g)
}

/// Harmonic mean of precision and recall at distance `threshold`.
///
/// A point counts when its nearest-neighbor distance is strictly below the threshold.
pub fn fscore(pred: &PointCloud, target: &PointCloud, threshold: f64) -> Result<f64> {
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::invalid(format!("F-Score threshold must be positive, got {threshold}")));
    }
    let c = Correspondence::compute(pred, target)?;
    Ok(fscore_from_correspondence(&c, threshold))
}

pub(crate) fn fscore_from_correspondence(c: &Correspondence, threshold: f64) -> f64 {
    let th_sq = threshold * threshold;
    let frac = |v: &[(usize, f64)]| v.iter().filter(|m| m.1 < th_sq).count() as f64 / v.len() as f64;
    let precision = frac(&c.pred_to_target);
    let recall = frac(&c.target_to_pred);
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Symmetric Hausdorff distance.
pub fn hausdorff(pred: &PointCloud, target: &PointCloud) -> Result<f64> {
    let c = Correspondence::compute(pred, target)?;
    Ok(hausdorff_from_correspondence(&c))
}

pub(crate) fn hausdorff_from_correspondence(c: &Correspondence) -> f64 {
    c.pred_to_target
        .iter()
        .chain(&c.target_to_pred)
        .map(|m| m.1)
        .fold(0.0, f64::max)
        .sqrt()
}

/// Mean distance from each predicted point to the closest triangle of `mesh`.
pub fn point_to_mesh(pred: &PointCloud, mesh: &TriangleMesh) -> Result<f64> {
    pred.ensure_non_empty("predicted")?;
    if pred.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: pred.dim() });
    }
    if mesh.is_empty() {
        return Err(Error::invalid("mesh has no triangles"));
    }
    let d = pred
        .iter()
        .map(|p| mesh.distance([p[0], p[1], p[2]]))
        .collect::<Result<Vec<_>>>()?;
    Ok(mean(d, pred.len()))
}

/// Mean distance from each partial-input point to its nearest output point.
pub fn fidelity(input: &PointCloud, output: &PointCloud) -> Result<f64> {
    cd_local(input, output, DistanceOrder::L1)
}
