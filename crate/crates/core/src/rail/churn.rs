use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Merchant, RailError, Result};
use crate::seed;

/// Monthly churn probability `base + sensitivity * (1 - success_rate)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChurnParams {
    pub base: f64,
    pub sensitivity: f64,
}

impl Default for ChurnParams {
    fn default() -> Self {
        Self { base: 0.01, sensitivity: 0.5 }
    }
}

impl ChurnParams {
    pub fn probability(&self, success_rate: f64) -> f64 {
        (self.base + self.sensitivity * (1.0 - success_rate)).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChurnOutcome {
    pub active_before: u64,
    pub deactivated: u64,
    pub churn_rate: f64,
}

/// Deactivates merchants at random. Each draw is seeded from
/// (seed, month, merchant id); inactive merchants never come back.
pub fn apply_churn(
    merchants: &mut [Merchant],
    month_success_rate: f64,
    seed: u64,
    month: usize,
    params: &ChurnParams,
) -> Result<ChurnOutcome> {
    if !(0.0..=1.0).contains(&month_success_rate) {
        return Err(RailError::InvalidSuccessRate(month_success_rate));
    }
    let p = params.probability(month_success_rate);
    let mut active_before = 0;
    let mut deactivated = 0;
    for m in merchants.iter_mut().filter(|m| m.active) {
        active_before += 1;
        let mut rng = seed::rng(seed::derive(&[seed, seed::tag::CHURN, month as u64, seed::fnv1a(m.id.as_bytes())]));
        if rng.random::<f64>() < p {
            m.active = false;
            deactivated += 1;
        }
    }
    let churn_rate = if active_before == 0 { 0.0 } else { deactivated as f64 / active_before as f64 };
    Ok(ChurnOutcome { active_before, deactivated, churn_rate })
}
