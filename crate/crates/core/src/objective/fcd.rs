use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::metrics::{directional_terms, Correspondence, DistanceOrder};
use serde::{Deserialize, Serialize};

/// Weights of the local-fitting (`alpha`) and global-coverage (`beta`) terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FcdWeights {
    pub alpha: f64,
    pub beta: f64,
}

impl FcdWeights {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let w = Self { alpha, beta };
        w.validate()?;
        Ok(w)
    }

    /// Equal weights: plain Chamfer distance without the outer one half.
    pub const CHAMFER: FcdWeights = FcdWeights { alpha: 1.0, beta: 1.0 };

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        if ok(self.alpha) && ok(self.beta) {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "FCD weights must be positive and finite, got ({}, {})",
                self.alpha, self.beta
            )))
        }
    }
}

/// `alpha * cd_local + beta * cd_global`.
pub fn fcd(pred: &PointCloud, target: &PointCloud, weights: FcdWeights, r: DistanceOrder) -> Result<f64> {
    weights.validate()?;
    let c = Correspondence::compute(pred, target)?;
    Ok(fcd_from_correspondence(&c, weights, r))
}

pub fn fcd_from_correspondence(c: &Correspondence, weights: FcdWeights, r: DistanceOrder) -> f64 {
    let (local, global) = directional_terms(c, r);
    weights.alpha * local + weights.beta * global
}

/// One gradient vector per predicted point.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    dim: usize,
    data: Vec<f64>,
}

impl GradientField {
    pub fn zeros(len: usize, dim: usize) -> Self {
        Self { dim, data: vec![0.0; len * dim] }
    }

    pub fn from_flat(dim: usize, data: Vec<f64>) -> Self {
        assert!(dim > 0 && data.len().is_multiple_of(dim), "flat gradient length must be a multiple of dim");
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vector_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    pub fn max_norm(&self) -> f64 {
        self.iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: f64, other: &GradientField) {
        debug_assert_eq!(self.data.len(), other.data.len());
        self.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += s * b);
    }
}

/// Gradient of `d^r(p, g)` with respect to `p`, added into `out` scaled by `scale`.
///
/// For `r = 1` coincident points contribute nothing (0 is in the subdifferential).
#[inline]
pub fn distance_gradient(p: &[f64], g: &[f64], sq: f64, r: DistanceOrder, scale: f64, out: &mut [f64]) {
    match r {
        DistanceOrder::L1 => {
            if sq == 0.0 {
                return;
            }
            let d = sq.sqrt();
            for k in 0..p.len() {
                out[k] += scale * ((p[k] - g[k]) / d);
            }
        }
        DistanceOrder::L2 => {
            let s = 2.0 * scale;
            for k in 0..p.len() {
                out[k] += s * (p[k] - g[k]);
            }
        }
    }
}

/// Subgradient of [`fcd`] with respect to the predicted coordinates, holding
/// the current nearest-neighbor assignments fixed.
pub fn fcd_gradient(pred: &PointCloud, target: &PointCloud, weights: FcdWeights, r: DistanceOrder) -> Result<GradientField> {
    weights.validate()?;
    let c = Correspondence::compute(pred, target)?;
    Ok(fcd_gradient_from_correspondence(pred, target, &c, weights, r))
}

pub fn fcd_gradient_from_correspondence(
    pred: &PointCloud,
    target: &PointCloud,
    c: &Correspondence,
    weights: FcdWeights,
    r: DistanceOrder,
) -> GradientField {
    let mut grad = GradientField::zeros(pred.len(), pred.dim());
    let local_scale = weights.alpha / pred.len() as f64;
    for (i, &(j, sq)) in c.pred_to_target.iter().enumerate() {
        distance_gradient(pred.point(i), target.point(j), sq, r, local_scale, grad.vector_mut(i));
    }
    // Scatter in target order so the result does not depend on evaluation order.
    let global_scale = weights.beta / target.len() as f64;
    for (j, &(i, sq)) in c.target_to_pred.iter().enumerate() {
        distance_gradient(pred.point(i), target.point(j), sq, r, global_scale, grad.vector_mut(i));
    }
    grad
}
