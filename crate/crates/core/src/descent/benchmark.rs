use crate::cloud::PointCloud;
use crate::error::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Initial and target clouds for a fixed descent experiment.
#[derive(Debug, Clone)]
pub struct BenchmarkProblem {
    pub init: PointCloud,
    pub target: PointCloud,
}

/// The clustered-grid problem: target is an 8x8 grid spanning the unit
/// square; the initial cloud is 64 points drawn from an isotropic Gaussian
/// (sigma 0.05) around the grid corner at the origin.
pub fn clustered_grid_benchmark(seed: u64) -> Result<BenchmarkProblem> {
    let side = 8;
    let mut target = Vec::with_capacity(side * side * 2);
    for i in 0..side {
        for j in 0..side {
            target.push(i as f64 / (side - 1) as f64);
            target.push(j as f64 / (side - 1) as f64);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 0.05).expect("valid sigma");
    let init: Vec<f64> = (0..side * side * 2).map(|_| normal.sample(&mut rng)).collect();
    Ok(BenchmarkProblem { init: PointCloud::from_flat(2, init)?, target: PointCloud::from_flat(2, target)? })
}
