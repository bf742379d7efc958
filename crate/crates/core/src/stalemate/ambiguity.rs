use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::metrics::{chamfer_l1, dcd, DEFAULT_DCD_TEMPERATURE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const MAX_BISECTIONS: usize = 200;
/// Relative Chamfer mismatch at which bisection stops.
const MATCH_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbiguityConfig {
    /// Point count of every cloud; even and at least 8.
    pub n: usize,
    pub seed: u64,
    /// Grid spacing of the target cloud.
    pub spacing: f64,
    /// Jitter half-width of the uniform prediction, in units of `spacing`.
    pub uniform_jitter: f64,
    /// Temperature for the reported density-aware distances.
    pub temperature: f64,
}

impl AmbiguityConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        // Spacing of a couple of kernel lengths, so the density term is not saturated.
        Self { n, seed, spacing: 2.0 / DEFAULT_DCD_TEMPERATURE, uniform_jitter: 0.4, temperature: DEFAULT_DCD_TEMPERATURE }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbiguityReport {
    pub cd_clustered: f64,
    pub cd_uniform: f64,
    pub dcd_clustered: f64,
    pub dcd_uniform: f64,
    /// Clustered-cloud jitter (in units of spacing) found by bisection.
    pub cluster_jitter: f64,
    pub bisection_steps: usize,
}

#[derive(Debug, Clone)]
pub struct AmbiguityPair {
    pub clustered: PointCloud,
    pub uniform: PointCloud,
    pub target: PointCloud,
    pub report: AmbiguityReport,
}

/// Grid shape `rows x cols` with `rows` the largest divisor of `n` not above sqrt(n).
fn grid_shape(n: usize) -> (usize, usize) {
    let rows = (1..=n).take_while(|r| r * r <= n).filter(|r| n.is_multiple_of(*r)).last().unwrap_or(1);
    (rows, n / rows)
}

/// Builds two predictions with (nearly) the same Chamfer-L1 distance to a grid:
/// one jittered copy of the grid, and one that puts two points near each cell
/// of a checkerboard half of the grid and none near the other half.
///
/// The clustered cloud's jitter is bisected until the Chamfer values agree.
pub fn build_ambiguity_pair(config: &AmbiguityConfig) -> Result<AmbiguityPair> {
    let n = config.n;
    if n < 8 || !n.is_multiple_of(2) {
        return Err(Error::invalid(format!("ambiguity pair needs an even n >= 8, got {n}")));
    }
    if !(config.spacing > 0.0 && config.uniform_jitter > 0.0 && config.temperature > 0.0) {
        return Err(Error::invalid("spacing, jitter and temperature must be positive"));
    }
    let (rows, cols) = grid_shape(n);
    let s = config.spacing;
    let mut grid = Vec::with_capacity(n);
    for r in 0..rows {
        for c in 0..cols {
            grid.push([c as f64 * s, r as f64 * s]);
        }
    }
    let target = PointCloud::from_points(&grid)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut unit_jitter = |count: usize| -> Vec<[f64; 2]> {
        (0..count).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect()
    };
    let uniform_dirs = unit_jitter(n);
    let cluster_dirs = unit_jitter(n);

    let uniform: Vec<[f64; 2]> = grid
        .iter()
        .zip(&uniform_dirs)
        .map(|(g, d)| [g[0] + config.uniform_jitter * s * d[0], g[1] + config.uniform_jitter * s * d[1]])
        .collect();
    let uniform = PointCloud::from_points(&uniform)?;
    let cd_uniform = chamfer_l1(&uniform, &target)?;

    // Checkerboard half; n even guarantees it has exactly n/2 cells.
    let anchors: Vec<[f64; 2]> = (0..n).filter(|i| (i / cols + i % cols) % 2 == 0).map(|i| grid[i]).collect();
    debug_assert_eq!(anchors.len(), n / 2);
    let clustered_at = |scale: f64| -> Result<PointCloud> {
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|k| {
                let a = anchors[k / 2];
                let d = cluster_dirs[k];
                [a[0] + scale * s * d[0], a[1] + scale * s * d[1]]
            })
            .collect();
        PointCloud::from_points(&pts)
    };
    let mismatch = |scale: f64| -> Result<f64> { Ok(chamfer_l1(&clustered_at(scale)?, &target)? - cd_uniform) };

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let (f_lo, f_hi) = (mismatch(lo)?, mismatch(hi)?);
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Construction(format!(
            "cluster jitter cannot reach the uniform Chamfer value {cd_uniform} (bracket {f_lo}, {f_hi})"
        )));
    }
    let mut steps = 0;
    let mut mid;
    loop {
        if steps == MAX_BISECTIONS {
            return Err(Error::Construction(format!(
                "bisection did not match Chamfer within {MAX_BISECTIONS} iterations"
            )));
        }
        steps += 1;
        mid = 0.5 * (lo + hi);
        let f = mismatch(mid)?;
        if (f / cd_uniform).abs() <= MATCH_TOL {
            break;
        }
        if f.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let clustered = clustered_at(mid)?;
    let report = AmbiguityReport {
        cd_clustered: chamfer_l1(&clustered, &target)?,
        cd_uniform,
        dcd_clustered: dcd(&clustered, &target, config.temperature)?,
        dcd_uniform: dcd(&uniform, &target, config.temperature)?,
        cluster_jitter: mid,
        bisection_steps: steps,
    };
    Ok(AmbiguityPair { clustered, uniform, target, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(grid_shape(64), (8, 8));
        assert_eq!(grid_shape(8), (2, 4));
        assert_eq!(grid_shape(10), (2, 5));
    }

    #[test]
    fn small_pair_is_deterministic_and_matched() {
        let cfg = AmbiguityConfig::new(8, 7);
        let a = build_ambiguity_pair(&cfg).unwrap();
        let b = build_ambiguity_pair(&cfg).unwrap();
        assert_eq!(a.clustered, b.clustered);
        assert_eq!(a.uniform, b.uniform);
        let r = a.report;
        assert!((r.cd_clustered - r.cd_uniform).abs() / r.cd_uniform <= 0.01);
        assert!(r.dcd_clustered > r.dcd_uniform, "{r:?}");
    }

    #[test]
    fn rejects_bad_n() {
        assert!(build_ambiguity_pair(&AmbiguityConfig::new(6, 0)).is_err());
        assert!(build_ambiguity_pair(&AmbiguityConfig::new(9, 0)).is_err());
    }
}
