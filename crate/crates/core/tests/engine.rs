mod support;

use satrail::engine::{run_path, run_scenario, run_scenario_serial, write_month_csv, Coverage, Scenario};
use satrail::treasury::{no_forced_sale, SurvivalMode};
use support::fixture;

fn load(rel: &str) -> Scenario {
    Scenario::load(fixture(rel)).unwrap()
}

/// Spreadsheet-style ledger for the single-merchant fixture, computed from
/// first principles: linear prices, msat = ceil(cents * 1e11 / price),
/// hub fee = 1000 + floor(msat * 1000 / 1e6), all bps terms floored.
fn hand_ledger() -> Vec<(i64, i64, i64)> {
    let (start, gmv, out) = (5_000_000i128, 10_000i128, 80i128);
    let mut cash = 1_000i128;
    let mut rows = Vec::new();
    for t in 1..=4i128 {
        let price = start - start * t / 8; // 50% over 4 months, exact in cents
        let msat = (gmv * 100_000_000_000 + price - 1) / price;
        let hub_fee = 1_000 + msat * 1_000 / 1_000_000;
        let routing = hub_fee * price / 100_000_000_000;
        let acquiring = gmv * 100 / 10_000;
        let spread = gmv * 5 / 10_000;
        let sats_back = gmv * 10 / 10_000;
        let variable = gmv * 5 / 10_000;
        let net = acquiring + spread + routing - sats_back - variable;
        cash += net - out;
        rows.push((price as i64, net as i64, cash as i64));
    }
    rows
}

#[test]
fn single_merchant_matches_hand_ledger() {
    let s = load("scenarios/hand_ledger.json");
    let p = run_path(&s, 0).unwrap();
    let expect = hand_ledger();
    assert_eq!(p.months.len(), 4);
    for (m, (price, net, cash)) in p.months.iter().zip(&expect) {
        assert_eq!(m.price_cents, *price, "month {}", m.month);
        assert_eq!(m.rail.net_inflow_cents, *net, "month {}", m.month);
        assert_eq!(m.ledger.cash_close_cents, *cash, "month {}", m.month);
        assert_eq!(m.rail.tx_count, 1);
        assert_eq!(m.rail.tx_settled, 1);
    }
    assert_eq!(p.terminal_cash_cents, expect[3].2);
    assert!(p.survives);
}

#[test]
fn empty_rail_flat_price_is_inert() {
    let mut s = load("scenarios/hand_ledger.json");
    s.merchants.clear();
    s.config.treasury.opex_monthly_cents = 0;
    s.config.treasury.interest_monthly_cents = 0;
    s.config.treasury.capex_monthly_cents = 0;
    s.config.market.model =
        satrail::engine::MarketModel::Stress { kind: satrail::market::StressKind::Linear, total_drawdown: 0.0 };
    let p = run_path(&s, 0).unwrap();
    assert!(p.survives);
    assert_eq!(p.terminal_cash_cents, s.config.treasury.cash0_cents);
    for m in &p.months {
        assert_eq!(m.rail.gmv_cents, 0);
        assert_eq!(m.rail.net_inflow_cents, 0);
        assert_eq!(m.kpi.realized_take_rate_bps, 0.0);
        assert_eq!(m.kpi.routing_revenue_per_100k_tx_cents, 0.0);
        assert_eq!(m.kpi.payment_success_rate, 1.0);
        assert_eq!(m.kpi.opex_coverage_ratio, Coverage::ZeroOpex);
    }
}

#[test]
fn paths_are_deterministic() {
    let s = load("scenarios/gbm_example.json");
    let a = serde_json::to_string(&run_path(&s, 3).unwrap()).unwrap();
    let b = serde_json::to_string(&run_path(&s, 3).unwrap()).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, serde_json::to_string(&run_path(&s, 4).unwrap()).unwrap());
}

#[test]
fn parallel_and_serial_reports_are_identical() {
    let mut s = load("scenarios/gbm_example.json");
    s.config.monte_carlo.num_paths = 12;
    let par = run_scenario(&s).unwrap();
    let ser = run_scenario_serial(&s).unwrap();
    assert_eq!(par.to_json(), ser.to_json());
    assert_eq!(par.reconciliation_hash, ser.reconciliation_hash);
    assert_eq!(par.survival_probability, par.surviving_paths as f64 / 12.0);
}

#[test]
fn single_path_report_is_the_path() {
    let s = load("scenarios/headline_covered.json");
    let r = run_scenario(&s).unwrap();
    assert_eq!(r.paths, vec![run_path(&s, 0).unwrap()]);
}

#[test]
fn covered_stress_path_survives_and_reconciles() {
    let s = load("scenarios/headline_covered.json");
    let r = run_scenario(&s).unwrap();
    let p = &r.paths[0];
    assert_eq!(r.survival_probability, 1.0);
    assert_eq!(*p.prices.last().unwrap(), (11_030_000f64 * 0.3).round() as i64);
    let out = s.config.treasury.monthly_outflow(0);
    for m in &p.months {
        assert!(m.rail.net_inflow_cents >= out, "month {} not covered", m.month);
    }
    assert!(p.reconciliation.balanced);
    assert_eq!(p.btc_core_sats, s.config.treasury.btc_core_sats);
    // Monotone non-increasing price: the trigger fires once.
    assert_eq!(p.stress_triggers, 1);
}

#[test]
fn rail_free_path_matches_direct_condition() {
    let s = load("scenarios/headline_no_rail.json");
    let t = &s.config.treasury;
    let h = t.horizon_months;
    let direct =
        no_forced_sale(t.cash0_cents, &vec![0; h], &vec![t.monthly_outflow(0); h], SurvivalMode::Pathwise).unwrap();
    let p = run_path(&s, 0).unwrap();
    assert_eq!(p.survives, direct.survives);
    assert_eq!(p.breach_month, direct.breach_month);
    // $2.5M against $1M a month: 1.5M, 0.5M, then short.
    assert_eq!(p.breach_month, Some(3));
    assert!(p.required_sale_sats.unwrap() > 0);

    let mut terminal = s.clone();
    terminal.config.treasury.survival_mode = SurvivalMode::Terminal;
    let pt = run_path(&terminal, 0).unwrap();
    let direct_t =
        no_forced_sale(t.cash0_cents, &vec![0; h], &vec![t.monthly_outflow(0); h], SurvivalMode::Terminal).unwrap();
    assert_eq!((pt.survives, pt.breach_month), (direct_t.survives, direct_t.breach_month));
    assert_eq!(pt.terminal_cash_cents, direct_t.terminal_cash_cents);
}

#[test]
fn more_cash_never_lowers_survival() {
    let mut s = load("scenarios/gbm_example.json");
    s.config.monte_carlo.num_paths = 8;
    s.config.treasury.cash0_cents = 0;
    s.config.treasury.opex_monthly_cents = 1_150_000_00;
    let mut last = -1.0;
    for cash in [0i64, 1_000_000_00, 2_000_000_00, 4_000_000_00, 8_000_000_00] {
        s.config.treasury.cash0_cents = cash;
        let p = run_scenario(&s).unwrap().survival_probability;
        assert!(p >= last, "cash {cash}: {p} < {last}");
        last = p;
    }
}

#[test]
fn csv_has_one_row_per_path_month() {
    let mut s = load("scenarios/gbm_example.json");
    s.config.monte_carlo.num_paths = 3;
    let r = run_scenario(&s).unwrap();
    let mut buf = Vec::new();
    write_month_csv(&r, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("month,price,cash,gmv,success_rate,coverage,"));
    assert_eq!(lines.count(), 3 * 24);
}
