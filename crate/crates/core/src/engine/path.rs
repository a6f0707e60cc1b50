use std::collections::BTreeSet;

use serde::Serialize;

use super::{kpi_month, EngineError, KpiRow, MarketModel, MonthStats, RebalancePolicy, Result, Scenario};
use crate::lightning::{
    deploy_sleeve, rebalance, send_payment, shrink_sleeve, ChannelGraph, ChannelId, LightningError, ShrinkOutcome,
};
use crate::market::{gen_gbm_path, gen_stress_path, GbmParams, PricePath, StressShape};
use crate::rail::{
    acquiring_fee, apply_churn, hedge_settlement, merchant_payments, month_rail_cashflow, sats_back_outlay, tx_count,
    ChurnOutcome, Merchant, RailMonthComponents, RailMonthRecord, SatsBackBooking, SettleMode,
};
use crate::seed;
use crate::treasury::{sleeve_var, step_treasury, var_cap_check, LedgerEntry, TreasuryState, VarCheck};
use crate::units::{
    apply_bps_floor, cents_to_msat_ceil, msat_to_cents_ceil, msat_to_cents_floor, Cents, Msat, Sats, MSAT_PER_SAT,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonthReport {
    pub month: usize,
    pub price_cents: Cents,
    pub drawdown: f64,
    pub stress_triggered: bool,
    pub shrink: Option<ShrinkOutcome>,
    pub rail: RailMonthRecord,
    pub stats: MonthStats,
    pub kpi: KpiRow,
    pub ledger: LedgerEntry,
    pub churn: ChurnOutcome,
    pub sleeve_deployed_msat: Msat,
    pub sleeve_idle_msat: Msat,
    pub var: VarCheck,
}

/// Booked treasury inflow against rail net inflow; equal by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Reconciliation {
    pub booked_inflow_cents: Cents,
    pub rail_net_inflow_cents: Cents,
    pub balanced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathResult {
    pub path_index: usize,
    pub seed: u64,
    pub survives: bool,
    pub breach_month: Option<usize>,
    /// Lowest month-end cash before any floor is applied.
    pub min_cash_cents: Cents,
    pub terminal_cash_cents: Cents,
    pub required_sale_sats: Option<Sats>,
    pub btc_core_sats: Sats,
    pub stress_triggers: u32,
    pub var_breach_months: Vec<usize>,
    pub prices: Vec<Cents>,
    pub kpi: KpiRow,
    pub reconciliation: Reconciliation,
    pub months: Vec<MonthReport>,
}

pub(super) fn path_seed(master_seed: u64, path_index: usize) -> u64 {
    seed::derive(&[master_seed, path_index as u64])
}

pub(super) fn price_path(scenario: &Scenario, path_seed: u64) -> Result<PricePath> {
    let cfg = &scenario.config;
    let horizon = cfg.treasury.horizon_months;
    let start = cfg.market.start_price_cents;
    Ok(match cfg.market.model {
        MarketModel::Gbm { mu, sigma } => gen_gbm_path(
            &GbmParams { mu, sigma, horizon_months: horizon },
            start,
            seed::derive(&[path_seed, seed::tag::PRICE]),
        )?,
        MarketModel::Stress { kind, total_drawdown } => {
            gen_stress_path(&StressShape { kind, total_drawdown, horizon_months: horizon }, start)?
        }
    })
}

/// Simulates one path. Deterministic in (config, master seed, path index).
pub fn run_path(scenario: &Scenario, path_index: usize) -> Result<PathResult> {
    let cfg = &scenario.config;
    let tcfg = &cfg.treasury;
    let seed = path_seed(cfg.monte_carlo.master_seed, path_index);
    let prices = price_path(scenario, seed)?;

    let mut graph = scenario.graph.clone();
    let sleeve_msat = tcfg
        .sleeve_sats()
        .checked_mul(MSAT_PER_SAT)
        .ok_or_else(|| EngineError::config("treasury.sleeve_fraction", "sleeve exceeds the msat range"))?;
    let sleeve_channels: Vec<ChannelId> = if cfg.sleeve.peers.is_empty() || sleeve_msat == 0 {
        Vec::new()
    } else {
        deploy_sleeve(&mut graph, sleeve_msat, &cfg.sleeve.peers, &cfg.sleeve.options)
            .map_err(|e| EngineError::config("sleeve", e))?
    };
    let mut state = TreasuryState::new(tcfg, graph.hub_deployed_msat());
    let mut merchants = scenario.merchants.clone();
    let initially_active = merchants.iter().filter(|m| m.active).count() as u64;

    let mut months = Vec::with_capacity(tcfg.horizon_months);
    let mut armed = true;
    let mut stress_triggers = 0;
    let mut min_cash = Cents::MAX;
    let mut total = Totals::default();

    for month in 1..=tcfg.horizon_months {
        let price = prices.price(month);
        if month > 1 && cfg.rail.gmv_growth_bps_monthly != 0 {
            grow(&mut merchants, cfg.rail.gmv_growth_bps_monthly);
        }

        let drawdown = prices.drawdown_at(month);
        let mut shrink = None;
        let mut triggered = false;
        if drawdown >= cfg.stress_trigger.drawdown_threshold {
            if armed {
                // Without a deployed sleeve there is nothing to shrink.
                if !sleeve_channels.is_empty() {
                    let out = shrink_sleeve(&mut graph, cfg.stress_trigger.shrink_target)?;
                    state.sleeve_idle_msat += out.freed_msat;
                    shrink = Some(out);
                }
                triggered = true;
                stress_triggers += 1;
                armed = false;
            }
        } else {
            armed = true;
        }

        let flows = route_month(scenario, &mut graph, &merchants, month, price, seed)?;
        let (rebalance_volume_msat, rebalance_cost_msat) =
            rebalance_sleeve(&mut graph, &sleeve_channels, &cfg.rebalance);

        let record = rail_record(scenario, &merchants, &flows, month, price, rebalance_cost_msat)?;
        state.sleeve_deployed_msat = graph.hub_deployed_msat();
        let (next, ledger) = step_treasury(&state, tcfg, price, record.net_inflow_cents, 0)?;
        min_cash = min_cash.min(ledger.cash_close_cents - ledger.floor_adjustment_cents);
        state = next;

        let mut stats = MonthStats {
            sampled_attempted: flows.iter().map(|f| f.sampled).sum(),
            sampled_settled: flows.iter().map(|f| f.settled).sum(),
            rebalance_volume_msat,
            rebalance_cost_msat,
            churn_rate: 0.0,
        };
        let churn = apply_churn(&mut merchants, stats.success_rate(), seed, month, &cfg.rail.churn)?;
        stats.churn_rate = churn.churn_rate;

        let sleeve_value =
            msat_to_cents_floor(state.sleeve_deployed_msat.saturating_add(state.sleeve_idle_msat), price);
        let var_cents = sleeve_var(sleeve_value as f64, tcfg.var_sigma_monthly, tcfg.var_confidence)?;
        let var = var_cap_check(var_cents, state.cash_cents, tcfg.var_cap_fraction);

        total.add(&record, &stats, tcfg.opex_monthly_cents, churn.deactivated);
        months.push(MonthReport {
            month,
            price_cents: price,
            drawdown,
            stress_triggered: triggered,
            shrink,
            kpi: kpi_month(&record, &stats, tcfg.opex_monthly_cents),
            rail: record,
            stats,
            ledger,
            churn,
            sleeve_deployed_msat: state.sleeve_deployed_msat,
            sleeve_idle_msat: state.sleeve_idle_msat,
            var,
        });
    }

    let booked: Cents = months.iter().map(|m| m.ledger.rail_inflow_cents).sum();
    let net: Cents = months.iter().map(|m| m.rail.net_inflow_cents).sum();
    Ok(PathResult {
        path_index,
        seed,
        survives: !state.forced_sale,
        breach_month: state.breach_month,
        min_cash_cents: min_cash,
        terminal_cash_cents: state.cash_cents,
        required_sale_sats: state.required_sale_sats,
        btc_core_sats: state.btc_core_sats,
        stress_triggers,
        var_breach_months: months.iter().filter(|m| !m.var.passes).map(|m| m.month).collect(),
        prices: prices.prices,
        kpi: total.kpi(initially_active),
        reconciliation: Reconciliation {
            booked_inflow_cents: booked,
            rail_net_inflow_cents: net,
            balanced: booked == net,
        },
        months,
    })
}

fn grow(merchants: &mut [Merchant], bps: i64) {
    for m in merchants.iter_mut().filter(|m| m.active) {
        let next = m.monthly_gmv_cents as i128 + m.monthly_gmv_cents as i128 * bps as i128 / 10_000;
        m.monthly_gmv_cents = next.clamp(1, Cents::MAX as i128) as Cents;
    }
}

/// One merchant's simulated month.
struct MerchantFlow {
    merchant: usize,
    /// Payments the merchant's GMV implies.
    total: u64,
    sampled: u64,
    settled: u64,
    sampled_fiat_cents: Cents,
    settled_fiat_cents: Cents,
    hub_fee_msat: u128,
}

/// Routes each active merchant's sampled payments, interleaved round-robin
/// so no merchant gets first claim on liquidity.
fn route_month(
    scenario: &Scenario,
    graph: &mut ChannelGraph,
    merchants: &[Merchant],
    month: usize,
    price: Cents,
    seed: u64,
) -> Result<Vec<MerchantFlow>> {
    let cfg = &scenario.config;
    let hub = graph.hub().clone();
    let mut flows = Vec::new();
    let mut queues = Vec::new();
    for (i, m) in merchants.iter().enumerate().filter(|(_, m)| m.active) {
        let requests = merchant_payments(m, month, price, seed, &cfg.rail, cfg.payment_sample_cap)?;
        flows.push(MerchantFlow {
            merchant: i,
            total: tx_count(m, &cfg.rail.ticket),
            sampled: requests.len() as u64,
            settled: 0,
            sampled_fiat_cents: requests.iter().map(|r| r.fiat_cents).sum(),
            settled_fiat_cents: 0,
            hub_fee_msat: 0,
        });
        queues.push(requests);
    }
    let longest = queues.iter().map(Vec::len).max().unwrap_or(0);
    for k in 0..longest {
        for (flow, queue) in flows.iter_mut().zip(&queues) {
            let Some(req) = queue.get(k) else { continue };
            let cap = cfg.routing.max_fee_bps.map(|bps| (req.amount_msat as u128 * bps as u128 / 10_000) as Msat);
            let sent = match send_payment(
                graph,
                &req.payer,
                &req.merchant_node,
                req.amount_msat,
                cap,
                cfg.routing.max_retries,
            ) {
                Ok(sent) => sent,
                Err(LightningError::SameEndpoints) => continue,
                Err(e) => return Err(e.into()),
            };
            if let (true, Some(route)) = (sent.result.is_settled(), &sent.result.route) {
                flow.settled += 1;
                flow.settled_fiat_cents += req.fiat_cents;
                flow.hub_fee_msat += route.fee_earned_by(&hub) as u128;
            }
        }
    }
    Ok(flows)
}

/// Tops up depleted sleeve channels from the hub channel with the most
/// spare outbound liquidity. Failed attempts leave the graph untouched.
fn rebalance_sleeve(graph: &mut ChannelGraph, sleeve: &[ChannelId], policy: &RebalancePolicy) -> (Msat, Msat) {
    let (mut volume, mut cost) = (0u64, 0u64);
    if !policy.enabled || sleeve.is_empty() {
        return (0, 0);
    }
    let hub = graph.hub().clone();
    let mut skipped = BTreeSet::new();
    for _ in 0..policy.max_per_month {
        let needy = sleeve
            .iter()
            .filter(|id| !skipped.contains(*id))
            .filter_map(|id| graph.channel(id).filter(|c| c.open))
            .map(|c| {
                (c.balance_of(&hub) as f64 / c.capacity_msat as f64, c.id.clone(), c.capacity_msat, c.balance_of(&hub))
            })
            .filter(|(ratio, ..)| *ratio < policy.low_watermark)
            .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        let Some((_, to, capacity, have)) = needy else { break };
        let want = ((capacity as f64 * policy.target).floor() as Msat).saturating_sub(have);
        let donor = graph
            .hub_channels()
            .filter(|c| c.id != to)
            .map(|c| {
                let reserve =
                    if sleeve.contains(&c.id) { (c.capacity_msat as f64 * policy.target).floor() as Msat } else { 0 };
                (c.balance_of(&hub).saturating_sub(reserve), c.id.clone())
            })
            .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
        let amount = donor.as_ref().map_or(0, |(spare, _)| want.min(*spare));
        if amount == 0 {
            skipped.insert(to);
            continue;
        }
        let from = donor.expect("amount > 0 implies a donor").1;
        // The donor also pays the fees, so leave headroom for them.
        let attempt = [amount, amount - amount / 100]
            .into_iter()
            .find_map(|a| rebalance(graph, &from, &to, a).ok().map(|o| (a, o)));
        match attempt {
            Some((a, out)) => {
                volume += a;
                cost += out.cost_msat;
            }
            None => {
                skipped.insert(to);
            }
        }
    }
    (volume, cost)
}

fn rail_record(
    scenario: &Scenario,
    merchants: &[Merchant],
    flows: &[MerchantFlow],
    month: usize,
    price: Cents,
    rebalance_cost_msat: Msat,
) -> Result<RailMonthRecord> {
    let rail = &scenario.config.rail;
    let mut c = RailMonthComponents { month, ..Default::default() };
    let mut routing_msat: u128 = 0;
    for f in flows {
        let m = &merchants[f.merchant];
        c.gmv_cents += m.monthly_gmv_cents;
        c.tx_count += f.total;
        if f.sampled == 0 {
            continue;
        }
        // Extrapolate the sample linearly to the merchant's whole month.
        let settled =
            (m.monthly_gmv_cents as i128 * f.settled_fiat_cents as i128 / f.sampled_fiat_cents.max(1) as i128) as Cents;
        c.gmv_settled_cents += settled;
        c.tx_settled +=
            ((f.total as u128 * f.settled as u128 * 2 + f.sampled as u128) / (2 * f.sampled as u128)) as u64;
        routing_msat += f.hub_fee_msat * f.total as u128 / f.sampled as u128;
        c.acquiring_fee_cents += acquiring_fee(settled, m.take_rate_bps);
        if rail.sats_back_booking == SatsBackBooking::RailCost {
            c.sats_back_cents += sats_back_outlay(settled, m.sats_back_bps);
        }
        if m.settle_mode == SettleMode::Fiat {
            c.hedge_spread_cents +=
                hedge_settlement(cents_to_msat_ceil(settled, price), price, rail.spread_bps)?.spread_revenue_cents;
        }
    }
    c.variable_cost_cents = apply_bps_floor(c.gmv_settled_cents, rail.variable_cost_bps);
    c.routing_fee_cents = msat_to_cents_floor(routing_msat.min(Msat::MAX as u128) as Msat, price);
    c.rebalancing_cost_cents = msat_to_cents_ceil(rebalance_cost_msat, price);
    Ok(month_rail_cashflow(c)?)
}

/// Horizon aggregates for the path KPI row.
#[derive(Default)]
struct Totals {
    record: RailMonthComponents,
    stats: MonthStats,
    opex: Cents,
    deactivated: u64,
}

impl Totals {
    fn add(&mut self, r: &RailMonthRecord, s: &MonthStats, opex: Cents, deactivated: u64) {
        let t = &mut self.record;
        t.gmv_cents += r.gmv_cents;
        t.gmv_settled_cents += r.gmv_settled_cents;
        t.tx_count += r.tx_count;
        t.tx_settled += r.tx_settled;
        t.acquiring_fee_cents += r.acquiring_fee_cents;
        t.hedge_spread_cents += r.hedge_spread_cents;
        t.routing_fee_cents += r.routing_fee_cents;
        t.rebalancing_cost_cents += r.rebalancing_cost_cents;
        t.sats_back_cents += r.sats_back_cents;
        t.variable_cost_cents += r.variable_cost_cents;
        self.stats.sampled_attempted += s.sampled_attempted;
        self.stats.sampled_settled += s.sampled_settled;
        self.stats.rebalance_volume_msat += s.rebalance_volume_msat;
        self.stats.rebalance_cost_msat += s.rebalance_cost_msat;
        self.opex += opex;
        self.deactivated += deactivated;
    }

    fn kpi(&self, initially_active: u64) -> KpiRow {
        let record = month_rail_cashflow(self.record).expect("sums of non-negative components");
        let stats = MonthStats {
            churn_rate: if initially_active == 0 { 0.0 } else { self.deactivated as f64 / initially_active as f64 },
            ..self.stats
        };
        kpi_month(&record, &stats, self.opex)
    }
}
