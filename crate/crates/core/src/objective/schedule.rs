use super::{FcdWeights, UncertaintyState};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    Static,
    Stair,
    Linear,
    AbridgedLinear,
    Exponential,
    Uncertainty,
}

impl ScheduleKind {
    pub const PRESETS: [ScheduleKind; 5] = [
        ScheduleKind::Static,
        ScheduleKind::Stair,
        ScheduleKind::Linear,
        ScheduleKind::AbridgedLinear,
        ScheduleKind::Exponential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScheduleKind::Static => "static",
            ScheduleKind::Stair => "stair",
            ScheduleKind::Linear => "linear",
            ScheduleKind::AbridgedLinear => "abridged-linear",
            ScheduleKind::Exponential => "exponential",
            ScheduleKind::Uncertainty => "uncertainty",
        }
    }
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScheduleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [ScheduleKind::Uncertainty]
            .into_iter()
            .chain(Self::PRESETS)
            .find(|k| k.name() == s || (s == "abridged_linear" && *k == ScheduleKind::AbridgedLinear))
            .ok_or_else(|| Error::invalid(format!("unknown schedule kind {s:?}")))
    }
}

/// Parameters of an epoch-indexed weight schedule.
///
/// `theta` is the upper bound on the global weight and `tau` the lower bound
/// (also the fixed local weight); `transition` is the stair / abridged-linear
/// switch epoch, `total` the number of epochs and `sigma` the exponential
/// decay rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub kind: ScheduleKind,
    pub theta: f64,
    pub tau: f64,
    #[serde(rename = "t")]
    pub transition: u32,
    #[serde(rename = "T")]
    pub total: u32,
    pub sigma: f64,
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        Self { kind: ScheduleKind::Static, theta: 2.0, tau: 1.0, transition: 200, total: 400, sigma: 200.0 }
    }
}

impl ScheduleSpec {
    pub fn with_kind(kind: ScheduleKind) -> Self {
        Self { kind, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.theta > self.tau && self.theta.is_finite()) {
            return Err(Error::invalid(format!(
                "schedule bounds need theta > tau > 0, got theta={} tau={}",
                self.theta, self.tau
            )));
        }
        if !(0 < self.transition && self.transition < self.total) {
            return Err(Error::invalid(format!(
                "schedule needs 0 < t < T, got t={} T={}",
                self.transition, self.total
            )));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be positive, got {}", self.sigma)));
        }
        Ok(())
    }

    /// Static coarse-stage weights `(tau, theta)`.
    pub fn static_weights(&self) -> FcdWeights {
        FcdWeights { alpha: self.tau, beta: self.theta }
    }

    /// Parses `key=value` pairs separated by newlines, commas or whitespace.
    /// Missing keys keep their defaults.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut spec = Self::default();
        for item in text.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
            if item.starts_with('#') {
                continue;
            }
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("expected key=value, got {item:?}")))?;
            let num = |v: &str| v.parse::<f64>().map_err(|_| Error::invalid(format!("bad number for {key}: {v:?}")));
            let int = |v: &str| v.parse::<u32>().map_err(|_| Error::invalid(format!("bad integer for {key}: {v:?}")));
            match key {
                "kind" => spec.kind = value.parse()?,
                "theta" => spec.theta = num(value)?,
                "tau" => spec.tau = num(value)?,
                "t" => spec.transition = int(value)?,
                "T" => spec.total = int(value)?,
                "sigma" => spec.sigma = num(value)?,
                _ => return Err(Error::invalid(format!("unknown schedule key {key:?}"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_key_values(&self) -> String {
        format!(
            "kind={}\ntheta={}\ntau={}\nt={}\nT={}\nsigma={}\n",
            self.kind, self.theta, self.tau, self.transition, self.total, self.sigma
        )
    }
}

/// `theta - frac * (theta - tau)`, exactly `tau` at `frac = 1` and never
/// below it through rounding.
fn decay(theta: f64, tau: f64, frac: f64) -> f64 {
    if frac >= 1.0 {
        tau
    } else {
        (theta - frac * (theta - tau)).max(tau)
    }
}

/// Weights for `epoch` (0..=T). The local weight is always `tau`; the global
/// weight follows the schedule kind. Uncertainty schedules read the
/// effective weights from `state`.
pub fn schedule_weights(spec: &ScheduleSpec, epoch: u32, state: Option<&UncertaintyState>) -> Result<FcdWeights> {
    spec.validate()?;
    if epoch > spec.total {
        return Err(Error::invalid(format!("epoch {epoch} outside 0..={}", spec.total)));
    }
    let (theta, tau) = (spec.theta, spec.tau);
    let e = epoch as f64;
    let beta = match spec.kind {
        ScheduleKind::Static => theta,
        ScheduleKind::Stair => {
            if epoch < spec.transition {
                theta
            } else {
                tau
            }
        }
        ScheduleKind::Linear => decay(theta, tau, e / spec.total as f64),
        ScheduleKind::AbridgedLinear => {
            if epoch <= spec.transition {
                theta
            } else {
                let span = (spec.total - spec.transition) as f64;
                decay(theta, tau, (e - spec.transition as f64) / span)
            }
        }
        ScheduleKind::Exponential => (theta - tau) * (-e / spec.sigma).exp() + tau,
        ScheduleKind::Uncertainty => {
            let state = state.ok_or_else(|| Error::invalid("uncertainty schedule requires an uncertainty state"))?;
            return state.weights();
        }
    };
    Ok(FcdWeights { alpha: tau, beta })
}
