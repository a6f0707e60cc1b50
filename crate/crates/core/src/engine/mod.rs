//! Scenario orchestration: the per-path monthly loop, Monte Carlo
//! aggregation, KPIs and the survival verdict.

mod config;
mod kpi;
mod path;
mod scenario;

pub use config::{
    MarketConfig, MarketModel, MonteCarloConfig, RebalancePolicy, RoutingConfig, Scenario, ScenarioConfig,
    SleeveConfig, Source, StressTrigger,
};
pub use kpi::{kpi_month, Coverage, KpiRow, MonthStats, COVERAGE_SENTINEL};
pub use path::{run_path, MonthReport, PathResult, Reconciliation};
pub use scenario::{run_scenario, run_scenario_serial, write_month_csv, ScenarioReport};

use thiserror::Error;

use crate::lightning::LightningError;
use crate::market::MarketError;
use crate::rail::RailError;
use crate::treasury::TreasuryError;

#[derive(Debug, Error)]
pub enum EngineError {
    /// Invalid or unreadable configuration; `key` is the dotted path.
    #[error("config `{key}`: {reason}")]
    Config { key: String, reason: String },
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error(transparent)]
    Lightning(#[from] LightningError),
    #[error(transparent)]
    Rail(#[from] RailError),
    #[error(transparent)]
    Treasury(#[from] TreasuryError),
}

impl EngineError {
    pub fn config(key: impl Into<String>, reason: impl std::fmt::Display) -> Self {
        Self::Config { key: key.into(), reason: reason.to_string() }
    }

    pub fn is_config(&self) -> bool {
        matches!(self, Self::Config { .. })
    }
}

pub type Result<T> = std::result::Result<T, EngineError>;
