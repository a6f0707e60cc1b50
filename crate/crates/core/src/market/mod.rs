//! BTC price paths, historical price series and correlation analytics.

mod gbm;
mod series;
mod stats;
mod stress;

pub use gbm::{gen_gbm_path, GbmParams, MONTH_FRACTION};
pub use series::{inner_join, load_price_csv, parse_price_csv, write_price_csv, DatedSeries};
pub use stats::{correlate, pearson_corr, to_returns, CorrelationBasis};
pub use stress::{gen_stress_path, StressKind, StressShape};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::Cents;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarketError {
    #[error("start price must be positive, got {0} cents")]
    NonPositiveStartPrice(Cents),
    #[error("horizon must be at least one month")]
    ZeroHorizon,
    #[error("volatility must be finite and non-negative, got {0}")]
    InvalidVolatility(f64),
    #[error("drift must be finite, got {0}")]
    InvalidDrift(f64),
    #[error("drawdown must lie in [0, 1), got {0}")]
    InvalidDrawdown(f64),
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("correlation undefined: series has zero variance")]
    ZeroVariance,
    #[error("price CSV row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("price CSV header must be `date,price`, got `{0}`")]
    BadHeader(String),
    #[error("price CSV: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, MarketError>;

/// Monthly BTC price path in integer cents per BTC, month 0 included.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PricePath {
    pub start_price: Cents,
    pub prices: Vec<Cents>,
}

impl PricePath {
    pub fn horizon_months(&self) -> usize {
        self.prices.len() - 1
    }

    pub fn price(&self, month: usize) -> Cents {
        self.prices[month]
    }

    /// Peak-to-current drawdown at `month`, as a fraction of the running peak.
    pub fn drawdown_at(&self, month: usize) -> f64 {
        let peak = self.prices[..=month].iter().copied().max().unwrap_or(1);
        1.0 - self.prices[month] as f64 / peak as f64
    }
}

/// Rounds to whole cents with a one-cent floor.
pub(crate) fn to_price_cents<F: crate::Real>(value: F) -> Cents {
    let rounded = value.round();
    match rounded.to_i64() {
        Some(c) if c >= 1 => c,
        Some(_) => 1,
        // Overflow only on absurd upward paths; saturate rather than wrap.
        None if value > F::zero() => Cents::MAX,
        None => 1,
    }
}
