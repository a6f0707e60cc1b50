use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::{Result, TreasuryError};
use crate::Real;

/// One-month lognormal VaR: `value * (1 - exp(-z_alpha * sigma))`.
pub fn sleeve_var<F: Real>(sleeve_value: F, sigma_monthly: F, alpha: F) -> Result<F> {
    let a = alpha.as_f64();
    if !(a > 0.5 && a < 1.0) {
        return Err(TreasuryError::InvalidConfidence(a));
    }
    let s = sigma_monthly.as_f64();
    if !(s.is_finite() && s >= 0.0) {
        return Err(TreasuryError::InvalidVolatility(s));
    }
    let z = F::of(Normal::standard().inverse_cdf(a));
    Ok(sleeve_value * (F::one() - (-z * sigma_monthly).exp()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarCheck {
    pub var_cents: f64,
    pub cap_cents: f64,
    pub passes: bool,
    /// `cap - var`; negative when the cap is breached.
    pub headroom_cents: f64,
}

/// Compare sleeve VaR against `cap_fraction * cash`.
pub fn var_cap_check(var_cents: f64, cash_cents: i64, cap_fraction: f64) -> VarCheck {
    let cap = cap_fraction * cash_cents.max(0) as f64;
    VarCheck { var_cents, cap_cents: cap, passes: var_cents <= cap, headroom_cents: cap - var_cents }
}
