//! Balance-sheet model: cash ledger, the no-forced-sale test, the sleeve
//! VaR cap, and holdings analytics (mNAV, BTC per share).

mod condition;
mod config;
mod holdings;
mod state;
mod var;

pub use condition::{no_forced_sale, SurvivalVerdict};
pub use config::{SurvivalMode, TreasuryConfig};
pub use holdings::{btc_per_share, load_holdings_csv, mnav, parse_holdings_csv, HoldingsRow};
pub use state::{step_treasury, LedgerEntry, TreasuryState};
pub use var::{sleeve_var, var_cap_check, VarCheck};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreasuryError {
    #[error("inflow and outflow series differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("horizon must be at least one month")]
    EmptyHorizon,
    #[error("cannot step month {month}: horizon is {horizon}")]
    PastHorizon { month: usize, horizon: usize },
    #[error("price must be positive")]
    NonPositivePrice,
    #[error("BTC holdings must be positive")]
    NonPositiveHoldings,
    #[error("shares outstanding must be positive")]
    ZeroShares,
    #[error("confidence level must lie in (0.5, 1), got {0}")]
    InvalidConfidence(f64),
    #[error("volatility must be finite and non-negative, got {0}")]
    InvalidVolatility(f64),
    #[error("treasury config: {0}")]
    InvalidConfig(String),
    #[error("holdings CSV row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("holdings CSV header must be `ticker,btc_held,mkt_cap_usd,shares_outstanding`, got `{0}`")]
    BadHeader(String),
    #[error("holdings CSV: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, TreasuryError>;
