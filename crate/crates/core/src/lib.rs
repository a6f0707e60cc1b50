//! Treasury survival simulator for a BTC-to-sats payments rail.
//!
//! A firm holding a large BTC reserve deploys a small liquidity sleeve into
//! payment channels, earns acquiring, hedge-spread and routing fees, and pays
//! monthly operating outflows. The simulator answers whether cash on hand
//! plus that fee income bridges a bear market without selling core BTC.

pub mod apportion;
pub mod cli;
pub mod engine;
pub mod lightning;
pub mod market;
pub mod rail;
pub mod scalar;
pub mod seed;
pub mod treasury;
pub mod units;

pub use scalar::Real;

/// Double-precision instantiations used by the engine and CLI.
pub type GbmParams = market::GbmParams<f64>;
pub type StressShape = market::StressShape<f64>;
pub type PriceSeries = market::DatedSeries<f64>;
