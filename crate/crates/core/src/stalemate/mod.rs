//! The two-point stalemate analysis and the equal-Chamfer ambiguity pair.
//!
//! With targets `g1`, `g2`, a well-matched prediction `p1` near `g1` and a
//! free prediction `p2` on the segment between the targets, the local term
//! pulls `p2` back to `g1` while the global term pulls it to `g2`. Under
//! equal weights and Euclidean distances the two cancel exactly until `p2`
//! crosses the midpoint.

mod ambiguity;
mod sweep;

pub use ambiguity::{build_ambiguity_pair, AmbiguityConfig, AmbiguityPair, AmbiguityReport};
pub use sweep::{sweep, sweep_csv, SweepConfig, SweepRow, SWEEP_CSV_HEADER};

use crate::cloud::{distance, PointCloud};
use crate::error::{Error, Result};
use crate::metrics::DistanceOrder;
use crate::objective::{fcd_gradient, FcdWeights};
use serde::{Deserialize, Serialize};

pub type Vec2 = [f64; 2];

/// Targets, the matched prediction, and the asymmetric weights under study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StalemateSetup {
    pub g1: Vec2,
    pub g2: Vec2,
    pub p1: Vec2,
    pub weights: FcdWeights,
}

impl Default for StalemateSetup {
    fn default() -> Self {
        Self { g1: [0.0, 0.0], g2: [4.0, 0.0], p1: [0.5, 0.0], weights: FcdWeights { alpha: 1.0, beta: 2.0 } }
    }
}

/// Which target `p2` is matched to by the local term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    BeforeMidpoint,
    AfterMidpoint,
}

/// Gradients at `p2` for equal weights ("cd") and the setup weights ("fcd").
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StalemateGradients {
    pub cd_l1: Vec2,
    pub fcd_l1: Vec2,
    pub cd_l2: Vec2,
    pub fcd_l2: Vec2,
}

impl StalemateSetup {
    pub fn predicted(&self, p2: Vec2) -> PointCloud {
        PointCloud::from_points(&[self.p1, p2]).expect("finite 2D points")
    }

    pub fn targets(&self) -> PointCloud {
        PointCloud::from_points(&[self.g1, self.g2]).expect("finite 2D points")
    }

    /// Checks the assignment structure the closed forms rely on and reports the regime.
    pub fn regime(&self, p2: Vec2) -> Result<Regime> {
        let (g1, g2, p1) = (self.g1, self.g2, self.p1);
        let seg = [g2[0] - g1[0], g2[1] - g1[1]];
        let rel = [p2[0] - g1[0], p2[1] - g1[1]];
        let len_sq = seg[0] * seg[0] + seg[1] * seg[1];
        let cross = seg[0] * rel[1] - seg[1] * rel[0];
        let along = (seg[0] * rel[0] + seg[1] * rel[1]) / len_sq;
        if cross.abs() > 1e-12 * len_sq || !(along > 0.0 && along < 1.0) {
            return Err(Error::invalid(format!("p2 {p2:?} is not strictly between g1 and g2")));
        }
        if distance(&p2, &g1) <= distance(&p1, &g1) {
            return Err(Error::invalid(format!(
                "p2 {p2:?} must be farther from g1 than p1 is"
            )));
        }
        if distance(&g2, &p2) >= distance(&g2, &p1) {
            return Err(Error::invalid("g2 must be matched to p2"));
        }
        let (d1, d2) = (distance(&p2, &g1), distance(&p2, &g2));
        if d1 == d2 {
            Err(Error::Ambiguous(format!("p2 {p2:?} is equidistant from g1 and g2")))
        } else if d1 < d2 {
            Ok(Regime::BeforeMidpoint)
        } else {
            Ok(Regime::AfterMidpoint)
        }
    }
}

fn unit(from: Vec2, to: Vec2) -> Vec2 {
    let d = distance(&from, &to);
    [(from[0] - to[0]) / d, (from[1] - to[1]) / d]
}

/// Analytic gradients at `p2` for the two-point configuration.
///
/// Before the midpoint, with `u = (p2 - g2)/|p2 - g2|`:
/// Euclidean: `((beta - alpha)/2) u`, so zero for equal weights;
/// squared: `(alpha + beta) p2 - (alpha g1 + beta g2)`.
/// After the midpoint both terms match `p2` to `g2`:
/// `((alpha + beta)/2) u` and `(alpha + beta)(p2 - g2)`.
pub fn closed_form_gradients(p2: Vec2, setup: &StalemateSetup) -> Result<StalemateGradients> {
    setup.weights.validate()?;
    let regime = setup.regime(p2)?;
    let (g1, g2) = (setup.g1, setup.g2);
    let u = unit(p2, g2);
    let l1 = |a: f64, b: f64| -> Vec2 {
        let c = match regime {
            Regime::BeforeMidpoint => (b - a) / 2.0,
            Regime::AfterMidpoint => (a + b) / 2.0,
        };
        [c * u[0], c * u[1]]
    };
    let l2 = |a: f64, b: f64| -> Vec2 {
        match regime {
            Regime::BeforeMidpoint => [
                (a + b) * p2[0] - (a * g1[0] + b * g2[0]),
                (a + b) * p2[1] - (a * g1[1] + b * g2[1]),
            ],
            Regime::AfterMidpoint => [(a + b) * (p2[0] - g2[0]), (a + b) * (p2[1] - g2[1])],
        }
    };
    let FcdWeights { alpha, beta } = setup.weights;
    let cd_l1 = match regime {
        // Opposite unit vectors with equal coefficients.
        Regime::BeforeMidpoint => [0.0, 0.0],
        Regime::AfterMidpoint => l1(1.0, 1.0),
    };
    Ok(StalemateGradients { cd_l1, fcd_l1: l1(alpha, beta), cd_l2: l2(1.0, 1.0), fcd_l2: l2(alpha, beta) })
}

/// The same four gradients computed by the general subgradient on the two-point clouds.
pub fn numeric_gradients(p2: Vec2, setup: &StalemateSetup) -> Result<StalemateGradients> {
    let pred = setup.predicted(p2);
    let target = setup.targets();
    let at = |w: FcdWeights, r: DistanceOrder| -> Result<Vec2> {
        let g = fcd_gradient(&pred, &target, w, r)?;
        Ok([g.vector(1)[0], g.vector(1)[1]])
    };
    Ok(StalemateGradients {
        cd_l1: at(FcdWeights::CHAMFER, DistanceOrder::L1)?,
        fcd_l1: at(setup.weights, DistanceOrder::L1)?,
        cd_l2: at(FcdWeights::CHAMFER, DistanceOrder::L2)?,
        fcd_l2: at(setup.weights, DistanceOrder::L2)?,
    })
}
