use serde::{Deserialize, Serialize};

use super::{Result, TreasuryError};
use crate::units::{Cents, Sats};

/// Which form of the no-forced-sale test decides survival.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurvivalMode {
    /// Only the horizon totals: `cash0 + sum(inflows) >= sum(outflows)`.
    Terminal,
    /// Running cash must stay non-negative after every month.
    #[default]
    Pathwise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreasuryConfig {
    pub btc_core_sats: Sats,
    /// Liquidity sleeve as a fraction of core BTC.
    pub sleeve_fraction: f64,
    pub cash0_cents: Cents,
    pub opex_monthly_cents: Cents,
    pub interest_monthly_cents: Cents,
    pub capex_monthly_cents: Cents,
    pub horizon_months: usize,
    /// Sleeve VaR may not exceed this fraction of cash.
    pub var_cap_fraction: f64,
    pub var_confidence: f64,
    /// One-month log-volatility used for the sleeve VaR.
    pub var_sigma_monthly: f64,
    pub cash_yield_apy: f64,
    pub survival_mode: SurvivalMode,
}

impl Default for TreasuryConfig {
    fn default() -> Self {
        Self {
            btc_core_sats: 640_808 * crate::units::SATS_PER_BTC,
            sleeve_fraction: 0.02,
            cash0_cents: 0,
            opex_monthly_cents: 0,
            interest_monthly_cents: 0,
            capex_monthly_cents: 0,
            horizon_months: 24,
            var_cap_fraction: 0.20,
            var_confidence: 0.99,
            var_sigma_monthly: 0.20,
            cash_yield_apy: 0.0,
            survival_mode: SurvivalMode::Pathwise,
        }
    }
}

impl TreasuryConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(TreasuryError::InvalidConfig(m));
        if !(0.0..=1.0).contains(&self.sleeve_fraction) {
            return bad(format!("sleeve_fraction must lie in [0, 1], got {}", self.sleeve_fraction));
        }
        if self.horizon_months == 0 {
            return bad("horizon_months must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.var_cap_fraction) {
            return bad(format!("var_cap_fraction must lie in [0, 1], got {}", self.var_cap_fraction));
        }
        if !(self.var_confidence > 0.5 && self.var_confidence < 1.0) {
            return bad(format!("var_confidence must lie in (0.5, 1), got {}", self.var_confidence));
        }
        if !(self.var_sigma_monthly.is_finite() && self.var_sigma_monthly >= 0.0) {
            return bad(format!("var_sigma_monthly must be non-negative, got {}", self.var_sigma_monthly));
        }
        if !(self.cash_yield_apy.is_finite() && self.cash_yield_apy >= 0.0) {
            return bad(format!("cash_yield_apy must be non-negative, got {}", self.cash_yield_apy));
        }
        for (name, v) in [
            ("opex_monthly_cents", self.opex_monthly_cents),
            ("interest_monthly_cents", self.interest_monthly_cents),
            ("capex_monthly_cents", self.capex_monthly_cents),
        ] {
            if v < 0 {
                return bad(format!("{name} must be non-negative"));
            }
        }
        Ok(())
    }

    /// Monthly operating outflow: OPEX + interest + maintenance capex + `extra`.
    pub fn monthly_outflow(&self, extra_cents: Cents) -> Cents {
        self.opex_monthly_cents + self.interest_monthly_cents + self.capex_monthly_cents + extra_cents
    }

    /// Sleeve size in sats.
    pub fn sleeve_sats(&self) -> Sats {
        (self.btc_core_sats as f64 * self.sleeve_fraction).floor() as Sats
    }
}
