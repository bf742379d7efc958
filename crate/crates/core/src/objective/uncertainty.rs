use super::FcdWeights;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Learned log-variance parameters for the local and global terms.
///
/// The effective weight of a term is `exp(-s)`, positive for any finite `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyState {
    pub s_local: f64,
    pub s_global: f64,
}

impl UncertaintyState {
    /// State whose effective weights are `(tau, theta)`.
    pub fn from_bounds(tau: f64, theta: f64) -> Result<Self> {
        if !(tau > 0.0 && theta > 0.0) {
            return Err(Error::invalid("uncertainty initial weights must be positive"));
        }
        Ok(Self { s_local: -tau.ln(), s_global: -theta.ln() })
    }

    pub fn validate(&self) -> Result<()> {
        if self.s_local.is_finite() && self.s_global.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid("uncertainty state must be finite"))
        }
    }

    pub fn weights(&self) -> Result<FcdWeights> {
        self.validate()?;
        FcdWeights::new((-self.s_local).exp(), (-self.s_global).exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyLoss {
    pub total: f64,
    pub d_s_local: f64,
    pub d_s_global: f64,
}

/// `exp(-s_l) L_l + exp(-s_g) L_g + s_l + s_g` and its partials in `s_l`, `s_g`.
pub fn uncertainty_loss(local_loss: f64, global_loss: f64, state: &UncertaintyState) -> Result<UncertaintyLoss> {
    state.validate()?;
    if !(local_loss >= 0.0 && global_loss >= 0.0) {
        return Err(Error::invalid("uncertainty weighting needs non-negative losses"));
    }
    let wl = (-state.s_local).exp();
    let wg = (-state.s_global).exp();
    Ok(UncertaintyLoss {
        total: wl * local_loss + wg * global_loss + state.s_local + state.s_global,
        d_s_local: 1.0 - wl * local_loss,
        d_s_global: 1.0 - wg * global_loss,
    })
}
