use crate::cloud::{NnIndex, PointCloud};
use crate::error::Result;
use rayon::prelude::*;

const PAR_THRESHOLD: usize = 1024;

/// Nearest neighbor in `index` for every point of `queries`, as `(index, squared distance)`.
pub(crate) fn nearest_all(queries: &PointCloud, index: &NnIndex<'_>) -> Result<Vec<(usize, f64)>> {
    index.cloud().ensure_same_dim(queries)?;
    let out = if queries.len() >= PAR_THRESHOLD {
        queries.as_flat().par_chunks_exact(queries.dim()).map(|q| index.nearest_sq(q)).collect()
    } else {
        queries.iter().map(|q| index.nearest_sq(q)).collect()
    };
    Ok(out)
}

/// Nearest-neighbor assignments in both directions between a prediction and a target.
#[derive(Debug, Clone)]
pub struct Correspondence {
    /// For each predicted point: nearest target index and squared distance.
    pub pred_to_target: Vec<(usize, f64)>,
    /// For each target point: nearest predicted index and squared distance.
    pub target_to_pred: Vec<(usize, f64)>,
}

impl Correspondence {
    pub fn compute(pred: &PointCloud, target: &PointCloud) -> Result<Self> {
        pred.ensure_non_empty("predicted")?;
        target.ensure_non_empty("target")?;
        pred.ensure_same_dim(target)?;
        let target_index = NnIndex::build(target)?;
        let pred_index = NnIndex::build(pred)?;
        Ok(Self {
            pred_to_target: nearest_all(pred, &target_index)?,
            target_to_pred: nearest_all(target, &pred_index)?,
        })
    }

    /// Assignment fingerprint, used to spot nearest-neighbor switches between steps.
    pub fn same_assignment(&self, other: &Correspondence) -> bool {
        self.pred_to_target.iter().map(|m| m.0).eq(other.pred_to_target.iter().map(|m| m.0))
            && self.target_to_pred.iter().map(|m| m.0).eq(other.target_to_pred.iter().map(|m| m.0))
    }
}
