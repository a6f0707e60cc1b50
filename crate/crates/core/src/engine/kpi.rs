use serde::{Serialize, Serializer};

use crate::rail::RailMonthRecord;
use crate::units::{Cents, Msat};

/// Reported in place of a coverage ratio when OPEX is zero.
pub const COVERAGE_SENTINEL: &str = "uncovered-by-zero-opex";

/// Fee revenue over OPEX.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coverage {
    Ratio(f64),
    /// OPEX is zero, so the ratio is unbounded.
    ZeroOpex,
}

impl Coverage {
    pub fn of(fee_revenue_cents: Cents, opex_cents: Cents) -> Self {
        if opex_cents == 0 {
            Coverage::ZeroOpex
        } else {
            Coverage::Ratio(fee_revenue_cents as f64 / opex_cents as f64)
        }
    }

    pub fn ratio(self) -> Option<f64> {
        match self {
            Coverage::Ratio(r) => Some(r),
            Coverage::ZeroOpex => None,
        }
    }
}

impl std::fmt::Display for Coverage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coverage::Ratio(r) => write!(f, "{r:.4}"),
            Coverage::ZeroOpex => f.write_str(COVERAGE_SENTINEL),
        }
    }
}

impl Serialize for Coverage {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Coverage::Ratio(r) => s.serialize_f64(*r),
            Coverage::ZeroOpex => s.serialize_str(COVERAGE_SENTINEL),
        }
    }
}

/// Counters the rail record does not carry.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct MonthStats {
    /// Payments actually simulated.
    pub sampled_attempted: u64,
    pub sampled_settled: u64,
    pub rebalance_volume_msat: Msat,
    pub rebalance_cost_msat: Msat,
    pub churn_rate: f64,
}

impl MonthStats {
    /// Settled over attempted, 1.0 when nothing was attempted.
    pub fn success_rate(&self) -> f64 {
        if self.sampled_attempted == 0 {
            1.0
        } else {
            self.sampled_settled as f64 / self.sampled_attempted as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KpiRow {
    pub gmv_cents: Cents,
    pub realized_take_rate_bps: f64,
    pub payment_success_rate: f64,
    pub routing_revenue_per_100k_tx_cents: f64,
    pub rebalancing_cost_bps: f64,
    pub merchant_churn_rate: f64,
    pub opex_coverage_ratio: Coverage,
}

/// KPIs for one month. Degenerate denominators give 0, except success
/// rate (1.0 with no attempts) and coverage (sentinel with zero OPEX).
pub fn kpi_month(record: &RailMonthRecord, stats: &MonthStats, opex_cents: Cents) -> KpiRow {
    let per = |num: f64, den: f64, scale: f64| if den == 0.0 { 0.0 } else { num * scale / den };
    KpiRow {
        gmv_cents: record.gmv_cents,
        realized_take_rate_bps: per(record.acquiring_fee_cents as f64, record.gmv_cents as f64, 10_000.0),
        payment_success_rate: stats.success_rate(),
        routing_revenue_per_100k_tx_cents: per(record.routing_fee_cents as f64, record.tx_count as f64, 100_000.0),
        rebalancing_cost_bps: per(stats.rebalance_cost_msat as f64, stats.rebalance_volume_msat as f64, 10_000.0),
        merchant_churn_rate: stats.churn_rate,
        opex_coverage_ratio: Coverage::of(record.fee_revenue_cents(), opex_cents),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rail::{month_rail_cashflow, RailMonthComponents};

    fn record(c: RailMonthComponents) -> RailMonthRecord {
        month_rail_cashflow(c).unwrap()
    }

    #[test]
    fn empty_month() {
        let k = kpi_month(&record(RailMonthComponents::default()), &MonthStats::default(), 100);
        assert_eq!(k.realized_take_rate_bps, 0.0);
        assert_eq!(k.payment_success_rate, 1.0);
        assert_eq!(k.routing_revenue_per_100k_tx_cents, 0.0);
        assert_eq!(k.rebalancing_cost_bps, 0.0);
        assert_eq!(k.opex_coverage_ratio, Coverage::Ratio(0.0));
    }

    #[test]
    fn take_rate_inverts_acquiring_fee() {
        let r =
            record(RailMonthComponents { gmv_cents: 100_000_000, acquiring_fee_cents: 300_000, ..Default::default() });
        assert_eq!(kpi_month(&r, &MonthStats::default(), 1).realized_take_rate_bps, 30.0);
    }

    #[test]
    fn coverage_identity_and_sentinel() {
        let r = record(RailMonthComponents {
            acquiring_fee_cents: 700,
            hedge_spread_cents: 200,
            routing_fee_cents: 100,
            ..Default::default()
        });
        assert_eq!(kpi_month(&r, &MonthStats::default(), 1_000).opex_coverage_ratio, Coverage::Ratio(1.0));
        let zero = kpi_month(&r, &MonthStats::default(), 0).opex_coverage_ratio;
        assert_eq!(zero, Coverage::ZeroOpex);
        assert_eq!(serde_json::to_string(&zero).unwrap(), "\"uncovered-by-zero-opex\"");
    }

    #[test]
    fn rates() {
        let r = record(RailMonthComponents { tx_count: 200_000, routing_fee_cents: 50, ..Default::default() });
        let s = MonthStats {
            sampled_attempted: 4,
            sampled_settled: 3,
            rebalance_volume_msat: 1_000_000,
            rebalance_cost_msat: 250,
            churn_rate: 0.1,
        };
        let k = kpi_month(&r, &s, 1);
        assert_eq!(k.payment_success_rate, 0.75);
        assert_eq!(k.routing_revenue_per_100k_tx_cents, 25.0);
        assert_eq!(k.rebalancing_cost_bps, 2.5);
        assert_eq!(k.merchant_churn_rate, 0.1);
    }
}
