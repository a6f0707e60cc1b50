use serde::{Deserialize, Serialize};

use super::{RailError, Result};
use crate::units::{apply_bps_floor, msat_to_cents_floor, Cents, Msat};

/// `floor(gmv * take_rate_bps / 10_000)`.
pub fn acquiring_fee(gmv_settled_cents: Cents, take_rate_bps: u64) -> Cents {
    apply_bps_floor(gmv_settled_cents, take_rate_bps)
}

/// Sats-back reward outlay, same arithmetic as the acquiring fee.
pub fn sats_back_outlay(gmv_settled_cents: Cents, sats_back_bps: u64) -> Cents {
    apply_bps_floor(gmv_settled_cents, sats_back_bps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HedgeSettlement {
    pub gross_cents: Cents,
    pub merchant_fiat_cents: Cents,
    pub spread_revenue_cents: Cents,
}

/// Converts a sats settlement to fiat at the quoted price, keeping the spread.
///
/// The BTC leg is hedged at the quote, so the rail carries no price exposure
/// on it afterwards.
pub fn hedge_settlement(amount_msat: Msat, price_cents: Cents, spread_bps: u64) -> Result<HedgeSettlement> {
    if price_cents <= 0 {
        return Err(RailError::NonPositivePrice(price_cents));
    }
    let gross = msat_to_cents_floor(amount_msat, price_cents);
    let spread = apply_bps_floor(gross, spread_bps);
    Ok(HedgeSettlement { gross_cents: gross, merchant_fiat_cents: gross - spread, spread_revenue_cents: spread })
}

/// Inputs to one month's rail cash-flow record. All money is non-negative.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RailMonthComponents {
    pub month: usize,
    pub gmv_cents: Cents,
    pub gmv_settled_cents: Cents,
    pub tx_count: u64,
    pub tx_settled: u64,
    pub acquiring_fee_cents: Cents,
    pub hedge_spread_cents: Cents,
    pub routing_fee_cents: Cents,
    pub rebalancing_cost_cents: Cents,
    pub sats_back_cents: Cents,
    pub variable_cost_cents: Cents,
}

/// One month of non-mark-to-market rail cash flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RailMonthRecord {
    pub month: usize,
    pub gmv_cents: Cents,
    pub gmv_settled_cents: Cents,
    pub tx_count: u64,
    pub tx_settled: u64,
    pub acquiring_fee_cents: Cents,
    pub hedge_spread_cents: Cents,
    pub routing_fee_cents: Cents,
    pub rebalancing_cost_cents: Cents,
    pub sats_back_cents: Cents,
    pub variable_cost_cents: Cents,
    pub net_inflow_cents: Cents,
}

impl RailMonthRecord {
    pub fn fee_revenue_cents(&self) -> Cents {
        self.acquiring_fee_cents + self.hedge_spread_cents + self.routing_fee_cents
    }
}

pub fn month_rail_cashflow(c: RailMonthComponents) -> Result<RailMonthRecord> {
    let checks = [
        ("gmv_cents", c.gmv_cents),
        ("gmv_settled_cents", c.gmv_settled_cents),
        ("acquiring_fee_cents", c.acquiring_fee_cents),
        ("hedge_spread_cents", c.hedge_spread_cents),
        ("routing_fee_cents", c.routing_fee_cents),
        ("rebalancing_cost_cents", c.rebalancing_cost_cents),
        ("sats_back_cents", c.sats_back_cents),
        ("variable_cost_cents", c.variable_cost_cents),
    ];
    if let Some((name, _)) = checks.iter().find(|(_, v)| *v < 0) {
        return Err(RailError::NegativeComponent(name));
    }
    let tx_settled = c.tx_settled.min(c.tx_count);
    let net = c.acquiring_fee_cents + c.hedge_spread_cents + c.routing_fee_cents
        - c.rebalancing_cost_cents
        - c.sats_back_cents
        - c.variable_cost_cents;
    Ok(RailMonthRecord {
        month: c.month,
        gmv_cents: c.gmv_cents,
        gmv_settled_cents: c.gmv_settled_cents,
        tx_count: c.tx_count,
        tx_settled,
        acquiring_fee_cents: c.acquiring_fee_cents,
        hedge_spread_cents: c.hedge_spread_cents,
        routing_fee_cents: c.routing_fee_cents,
        rebalancing_cost_cents: c.rebalancing_cost_cents,
        sats_back_cents: c.sats_back_cents,
        variable_cost_cents: c.variable_cost_cents,
        net_inflow_cents: net,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::MSAT_PER_BTC;
    use proptest::prelude::*;

    #[test]
    fn acquiring_fee_examples() {
        assert_eq!(acquiring_fee(0, 30), 0);
        assert_eq!(acquiring_fee(1_000_000_00, 30), 300_000);
        assert_eq!(acquiring_fee(99_999, 10), 99);
    }

    #[test]
    fn sats_back_examples() {
        assert_eq!(sats_back_outlay(10_000_00, 0), 0);
        assert_eq!(sats_back_outlay(10_000_00, 25), 25_00);
    }

    #[test]
    fn hedge_one_btc() {
        let h = hedge_settlement(MSAT_PER_BTC, 11_030_000, 5).unwrap();
        assert_eq!(h.gross_cents, 11_030_000);
        assert_eq!(h.spread_revenue_cents, 5_515);
        assert_eq!(h.merchant_fiat_cents, 11_024_485);
        let free = hedge_settlement(MSAT_PER_BTC, 11_030_000, 0).unwrap();
        assert_eq!(free.merchant_fiat_cents, 11_030_000);
        assert_eq!(free.spread_revenue_cents, 0);
        assert!(hedge_settlement(1, 0, 5).is_err());
    }

    #[test]
    fn cashflow_identity() {
        let rec = month_rail_cashflow(RailMonthComponents {
            acquiring_fee_cents: 300_000,
            hedge_spread_cents: 5_515,
            routing_fee_cents: 1_200,
            rebalancing_cost_cents: 800,
            sats_back_cents: 25_00,
            variable_cost_cents: 10_000,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(rec.net_inflow_cents, 293_415);
        assert_eq!(month_rail_cashflow(RailMonthComponents::default()).unwrap().net_inflow_cents, 0);
        assert_eq!(
            month_rail_cashflow(RailMonthComponents { routing_fee_cents: -1, ..Default::default() }),
            Err(RailError::NegativeComponent("routing_fee_cents"))
        );
    }

    proptest! {
        #[test]
        fn hedge_conserves_gross(msat in 0u64..u64::MAX / 2, price in 1i64..100_000_000_00, bps in 0u64..10_000) {
            let h = hedge_settlement(msat, price, bps).unwrap();
            prop_assert_eq!(h.merchant_fiat_cents + h.spread_revenue_cents, h.gross_cents);
            prop_assert!(h.spread_revenue_cents >= 0 && h.merchant_fiat_cents >= 0);
        }

        #[test]
        fn sats_back_bounded_by_take(gmv in 0i64..1_000_000_000_000, take in 0u64..500, sb in 0u64..500) {
            if sb <= take {
                prop_assert!(sats_back_outlay(gmv, sb) <= acquiring_fee(gmv, take));
            }
        }

        #[test]
        fn net_monotone_and_bounded(acq in 0i64..1_000_000_000, extra in 0i64..1_000_000, spread in 0i64..1_000_000,
                                    routing in 0i64..1_000_000, costs in (0i64..1_000_000, 0i64..1_000_000, 0i64..1_000_000)) {
            let base = RailMonthComponents {
                acquiring_fee_cents: acq,
                hedge_spread_cents: spread,
                routing_fee_cents: routing,
                rebalancing_cost_cents: costs.0,
                sats_back_cents: costs.1,
                variable_cost_cents: costs.2,
                ..Default::default()
            };
            let a = month_rail_cashflow(base).unwrap();
            let b = month_rail_cashflow(RailMonthComponents { acquiring_fee_cents: acq + extra, ..base }).unwrap();
            prop_assert_eq!(b.net_inflow_cents - a.net_inflow_cents, extra);
            prop_assert!(a.net_inflow_cents <= a.fee_revenue_cents());
        }
    }
}
