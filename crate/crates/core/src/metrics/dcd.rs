use super::Correspondence;
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::sum::mean;

pub const DEFAULT_DCD_TEMPERATURE: f64 = 1000.0;

/// Density-aware Chamfer distance, in `[0, 1]`.
///
/// Each point contributes `1 - exp(-temperature * d) / n`, where `d` is the
/// Euclidean distance to its nearest neighbor in the other cloud and `n` is
/// how many points of its own cloud share that nearest neighbor.
pub fn dcd(pred: &PointCloud, target: &PointCloud, temperature: f64) -> Result<f64> {
    check_temperature(temperature)?;
    let c = Correspondence::compute(pred, target)?;
    Ok(dcd_from_correspondence(&c, temperature))
}

pub(crate) fn check_temperature(temperature: f64) -> Result<()> {
    if temperature > 0.0 && temperature.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("DCD temperature must be positive, got {temperature}")))
    }
}

/// Per-point hit counts: how many queries landed on each indexed point.
pub(crate) fn hit_counts(nn: &[(usize, f64)], indexed_len: usize) -> Vec<usize> {
    let mut counts = vec![0usize; indexed_len];
    for m in nn {
        counts[m.0] += 1;
    }
    counts
}

pub fn dcd_from_correspondence(c: &Correspondence, temperature: f64) -> f64 {
    let target_hits = hit_counts(&c.pred_to_target, c.target_to_pred.len());
    let pred_hits = hit_counts(&c.target_to_pred, c.pred_to_target.len());
    let term = |nn: &[(usize, f64)], hits: &[usize]| {
        mean(
            nn.iter().map(|&(j, sq)| 1.0 - (-temperature * sq.sqrt()).exp() / hits[j] as f64),
            nn.len(),
        )
    };
    let v = 0.5 * (term(&c.pred_to_target, &target_hits) + term(&c.target_to_pred, &pred_hits));
    v.clamp(0.0, 1.0)
}

/// Gradient of [`dcd`] with respect to the predicted points, treating the
/// hit counts and nearest-neighbor assignments as constants. Added into `out`
/// (flat, `pred.len() * dim`).
pub(crate) fn dcd_gradient_into(
    pred: &PointCloud,
    target: &PointCloud,
    c: &Correspondence,
    temperature: f64,
    out: &mut [f64],
) {
    let dim = pred.dim();
    let target_hits = hit_counts(&c.pred_to_target, target.len());
    let pred_hits = hit_counts(&c.target_to_pred, pred.len());
    // d/dp [1 - exp(-T d)/n] = (T/n) exp(-T d) * (p - q)/d
    let mut add = |i: usize, p: &[f64], q: &[f64], sq: f64, n: usize, scale: f64| {
        if sq == 0.0 {
            return;
        }
        let d = sq.sqrt();
        let s = scale * temperature * (-temperature * d).exp() / (n as f64 * d);
        for k in 0..dim {
            out[i * dim + k] += s * (p[k] - q[k]);
        }
    };
    let local_scale = 0.5 / pred.len() as f64;
    for (i, &(j, sq)) in c.pred_to_target.iter().enumerate() {
        add(i, pred.point(i), target.point(j), sq, target_hits[j], local_scale);
    }
    let global_scale = 0.5 / target.len() as f64;
    for (j, &(i, sq)) in c.target_to_pred.iter().enumerate() {
        add(i, pred.point(i), target.point(j), sq, pred_hits[i], global_scale);
    }
}
