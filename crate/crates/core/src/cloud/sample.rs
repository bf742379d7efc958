use super::{squared_distance, PointCloud};
use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMethod {
    /// Uniform without replacement; kept points stay in input order.
    Random,
    /// Greedy farthest-point sampling from point 0; output in selection order.
    FarthestPoint,
}

/// Draws `n` points from `cloud`. Deterministic for a fixed `seed`.
pub fn subsample(cloud: &PointCloud, n: usize, method: SampleMethod, seed: u64) -> Result<PointCloud> {
    if n == 0 || n > cloud.len() {
        return Err(Error::invalid(format!(
            "subsample size {n} outside 1..={}",
            cloud.len()
        )));
    }
    let indices = match method {
        SampleMethod::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx = rand::seq::index::sample(&mut rng, cloud.len(), n).into_vec();
            idx.sort_unstable();
            idx
        }
        SampleMethod::FarthestPoint => farthest_point_indices(cloud, n),
    };
    Ok(cloud.select(&indices))
}

fn farthest_point_indices(cloud: &PointCloud, n: usize) -> Vec<usize> {
    let mut chosen = Vec::with_capacity(n);
    let mut min_sq = vec![f64::INFINITY; cloud.len()];
    let mut current = 0usize;
    for _ in 0..n {
        chosen.push(current);
        let c = cloud.point(current);
        let mut next = 0usize;
        let mut far = f64::NEG_INFINITY;
        for (i, p) in cloud.iter().enumerate() {
            let d = squared_distance(p, c);
            if d < min_sq[i] {
                min_sq[i] = d;
            }
            if min_sq[i] > far {
                far = min_sq[i];
                next = i;
            }
        }
        current = next;
    }
    chosen
}
