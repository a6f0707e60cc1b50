use serde::Serialize;

use super::{Result, SurvivalMode, TreasuryConfig, TreasuryError};
use crate::units::{Cents, Msat, Sats};

/// Treasury position after `month` completed months.
///
/// Core BTC is never changed by this module. A shortfall records the sats
/// that would have to be sold; nothing is sold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreasuryState {
    pub month: usize,
    pub btc_core_sats: Sats,
    pub sleeve_deployed_msat: Msat,
    /// Sleeve liquidity withdrawn from channels; not spendable cash.
    pub sleeve_idle_msat: Msat,
    pub cash_cents: Cents,
    /// Rail inflows plus yield.
    pub cumulative_inflows_cents: Cents,
    pub cumulative_outflows_cents: Cents,
    pub cumulative_yield_cents: Cents,
    /// Sum of amounts added back when cash is floored at zero after a breach.
    pub breach_floor_adjustments_cents: Cents,
    pub forced_sale: bool,
    pub breach_month: Option<usize>,
    /// Total sats that would have been sold across all breached months.
    pub required_sale_sats: Option<Sats>,
    /// Sub-cent yield not yet credited, in units of 1e-6 cent.
    yield_carry_micro: i64,
}

/// One month of treasury accounting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub month: usize,
    pub cash_open_cents: Cents,
    pub rail_inflow_cents: Cents,
    pub yield_cents: Cents,
    pub outflow_cents: Cents,
    pub cash_close_cents: Cents,
    pub floor_adjustment_cents: Cents,
    pub required_sale_sats: Option<Sats>,
}

impl TreasuryState {
    pub fn new(config: &TreasuryConfig, sleeve_deployed_msat: Msat) -> Self {
        Self {
            month: 0,
            btc_core_sats: config.btc_core_sats,
            sleeve_deployed_msat,
            sleeve_idle_msat: 0,
            cash_cents: config.cash0_cents,
            cumulative_inflows_cents: 0,
            cumulative_outflows_cents: 0,
            cumulative_yield_cents: 0,
            breach_floor_adjustments_cents: 0,
            forced_sale: false,
            breach_month: None,
            required_sale_sats: None,
            yield_carry_micro: 0,
        }
    }
}

const MICRO: i128 = 1_000_000;

/// Monthly yield on positive cash, floored to cents with the remainder
/// carried so twelve monthly credits track annual compounding to a cent.
fn accrue_yield(cash: Cents, apy: f64, carry_micro: i64) -> (Cents, i64) {
    if apy == 0.0 || cash <= 0 {
        return (0, carry_micro);
    }
    let rate = (1.0 + apy).powf(1.0 / 12.0) - 1.0;
    let exact_micro = (cash as f64 * rate * MICRO as f64).floor() as i128 + carry_micro as i128;
    let cents = exact_micro.div_euclid(MICRO);
    (cents as Cents, exact_micro.rem_euclid(MICRO) as i64)
}

/// Advance the treasury one month.
///
/// `Out_t = opex + interest + capex + extra_out`, `cash' = cash + C_P + yield - Out_t`.
/// Pathwise mode treats `cash' < 0` as a breach: it records the sats needed
/// to cover the gap at `price_cents` and floors cash at zero. Terminal mode
/// lets cash run negative and judges only at the horizon.
pub fn step_treasury(
    state: &TreasuryState,
    config: &TreasuryConfig,
    price_cents: Cents,
    rail_inflow_cents: Cents,
    extra_out_cents: Cents,
) -> Result<(TreasuryState, LedgerEntry)> {
    if state.month >= config.horizon_months {
        return Err(TreasuryError::PastHorizon { month: state.month + 1, horizon: config.horizon_months });
    }
    if price_cents <= 0 {
        return Err(TreasuryError::NonPositivePrice);
    }
    let month = state.month + 1;
    let outflow = config.monthly_outflow(extra_out_cents);
    let (yield_cents, carry) = accrue_yield(state.cash_cents, config.cash_yield_apy, state.yield_carry_micro);
    let raw_close = state.cash_cents + rail_inflow_cents + yield_cents - outflow;

    let mut next = state.clone();
    next.month = month;
    next.yield_carry_micro = carry;
    next.cumulative_inflows_cents += rail_inflow_cents + yield_cents;
    next.cumulative_outflows_cents += outflow;
    next.cumulative_yield_cents += yield_cents;

    let shortfall = match config.survival_mode {
        SurvivalMode::Pathwise => raw_close < 0,
        SurvivalMode::Terminal => raw_close < 0 && month == config.horizon_months,
    };
    let mut floor_adjustment = 0;
    let mut required = None;
    if shortfall {
        let sats = crate::units::sats_to_cover(-raw_close, price_cents);
        required = Some(sats);
        next.required_sale_sats = Some(state.required_sale_sats.unwrap_or(0) + sats);
        next.forced_sale = true;
        next.breach_month.get_or_insert(month);
    }
    next.cash_cents = raw_close;
    if config.survival_mode == SurvivalMode::Pathwise && raw_close < 0 {
        floor_adjustment = -raw_close;
        next.cash_cents = 0;
        next.breach_floor_adjustments_cents += floor_adjustment;
    }

    let entry = LedgerEntry {
        month,
        cash_open_cents: state.cash_cents,
        rail_inflow_cents,
        yield_cents,
        outflow_cents: outflow,
        cash_close_cents: next.cash_cents,
        floor_adjustment_cents: floor_adjustment,
        required_sale_sats: required,
    };
    debug_assert_eq!(next.btc_core_sats, state.btc_core_sats);
    Ok((next, entry))
}
