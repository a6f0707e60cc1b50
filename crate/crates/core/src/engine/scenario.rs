use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{run_path, Coverage, EngineError, PathResult, Result, Scenario, ScenarioConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub config: ScenarioConfig,
    pub master_seed: u64,
    pub num_paths: usize,
    pub surviving_paths: usize,
    /// `surviving_paths / num_paths`.
    pub survival_probability: f64,
    /// Mean over paths of horizon OPEX coverage; `None` when OPEX is zero.
    pub mean_coverage: Option<f64>,
    /// Payments simulated per merchant-month; larger months are extrapolated.
    pub payment_sample_cap: u64,
    pub paths: Vec<PathResult>,
    /// SHA-256 of the canonical JSON of every other field.
    pub reconciliation_hash: String,
}

/// Runs every path in parallel. The report is identical to the serial one.
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioReport> {
    let n = paths_checked(scenario)?;
    let paths = (0..n).into_par_iter().map(|i| run_path(scenario, i)).collect::<Result<Vec<_>>>()?;
    Ok(assemble(scenario, paths))
}

pub fn run_scenario_serial(scenario: &Scenario) -> Result<ScenarioReport> {
    let n = paths_checked(scenario)?;
    let paths = (0..n).map(|i| run_path(scenario, i)).collect::<Result<Vec<_>>>()?;
    Ok(assemble(scenario, paths))
}

fn paths_checked(scenario: &Scenario) -> Result<usize> {
    scenario.config.validate()?;
    Ok(scenario.config.monte_carlo.num_paths)
}

fn assemble(scenario: &Scenario, mut paths: Vec<PathResult>) -> ScenarioReport {
    paths.sort_by_key(|p| p.path_index);
    let num_paths = paths.len();
    let surviving_paths = paths.iter().filter(|p| p.survives).count();
    let ratios: Vec<f64> = paths.iter().filter_map(|p| p.kpi.opex_coverage_ratio.ratio()).collect();
    let mean_coverage = (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64);
    let mut report = ScenarioReport {
        config: scenario.config.clone(),
        master_seed: scenario.config.monte_carlo.master_seed,
        num_paths,
        surviving_paths,
        survival_probability: surviving_paths as f64 / num_paths as f64,
        mean_coverage,
        payment_sample_cap: scenario.config.payment_sample_cap,
        paths,
        reconciliation_hash: String::new(),
    };
    report.reconciliation_hash = report_hash(&report);
    report
}

fn report_hash(report: &ScenarioReport) -> String {
    let mut value = serde_json::to_value(report).expect("report serializes");
    if let Some(obj) = value.as_object_mut() {
        obj.remove("reconciliation_hash");
    }
    // serde_json maps are ordered by key, so this rendering is canonical.
    hex::encode(Sha256::digest(value.to_string().as_bytes()))
}

impl ScenarioReport {
    /// Pretty JSON with keys in sorted order.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&value).expect("value serializes")
    }

    /// `mean_coverage` formatted for humans.
    pub fn coverage_label(&self) -> String {
        match self.mean_coverage {
            Some(r) => Coverage::Ratio(r).to_string(),
            None => Coverage::ZeroOpex.to_string(),
        }
    }
}

/// One CSV row per path-month. Money columns are cents.
pub fn write_month_csv<W: Write>(report: &ScenarioReport, out: W) -> Result<()> {
    let io = |e: csv::Error| EngineError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "month",
        "price",
        "cash",
        "gmv",
        "success_rate",
        "coverage",
        "acquiring",
        "hedge_spread",
        "routing",
        "rebalancing",
        "sats_back",
        "variable_cost",
        "net_inflow",
        "sleeve_deployed_msat",
        "var",
        "var_ok",
        "stress_triggered",
        "path",
    ])
    .map_err(io)?;
    for p in &report.paths {
        for m in &p.months {
            let r = &m.rail;
            w.write_record([
                m.month.to_string(),
                m.price_cents.to_string(),
                m.ledger.cash_close_cents.to_string(),
                r.gmv_cents.to_string(),
                m.kpi.payment_success_rate.to_string(),
                m.kpi
                    .opex_coverage_ratio
                    .ratio()
                    .map_or_else(|| super::COVERAGE_SENTINEL.to_string(), |c| c.to_string()),
                r.acquiring_fee_cents.to_string(),
                r.hedge_spread_cents.to_string(),
                r.routing_fee_cents.to_string(),
                r.rebalancing_cost_cents.to_string(),
                r.sats_back_cents.to_string(),
                r.variable_cost_cents.to_string(),
                r.net_inflow_cents.to_string(),
                m.sleeve_deployed_msat.to_string(),
                m.var.var_cents.to_string(),
                m.var.passes.to_string(),
                m.stress_triggered.to_string(),
                p.path_index.to_string(),
            ])
            .map_err(io)?;
        }
    }
    w.flush().map_err(|e| EngineError::Io(e.to_string()))
}
