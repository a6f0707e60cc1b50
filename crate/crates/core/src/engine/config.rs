use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use super::{EngineError, Result};
use crate::lightning::{build_graph, ChannelGraph, GraphSpec, SleeveOptions, SleevePeer};
use crate::market::StressKind;
use crate::rail::{validate_roster, Merchant, RailParams};
use crate::treasury::TreasuryConfig;
use crate::units::Cents;

/// Either a path to a JSON file, relative to the config file, or the value
/// inline.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Source<T> {
    Path(PathBuf),
    Inline(T),
}

impl<'de, T: serde::de::DeserializeOwned> Deserialize<'de> for Source<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(d)?;
        if let serde_json::Value::String(p) = value {
            return Ok(Source::Path(p.into()));
        }
        serde_path_to_error::deserialize(value).map(Source::Inline).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            serde::de::Error::custom(if path == "." { inner.to_string() } else { format!("{path}: {inner}") })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MarketModel {
    Gbm { mu: f64, sigma: f64 },
    Stress { kind: StressKind, total_drawdown: f64 },
}

/// The horizon comes from `treasury.horizon_months`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketConfig {
    pub start_price_cents: Cents,
    pub model: MarketModel,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SleeveConfig {
    /// Empty means no sleeve is deployed.
    pub peers: Vec<SleevePeer>,
    pub options: SleeveOptions,
}

/// Shrinks the sleeve once drawdown from the running peak reaches the
/// threshold. Re-arms after drawdown falls back below it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StressTrigger {
    pub drawdown_threshold: f64,
    pub shrink_target: f64,
}

impl Default for StressTrigger {
    fn default() -> Self {
        Self { drawdown_threshold: 0.30, shrink_target: 0.50 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub num_paths: usize,
    pub master_seed: u64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self { num_paths: 1, master_seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoutingConfig {
    /// Per-payment fee cap as bps of the amount; `null` for no cap.
    pub max_fee_bps: Option<u64>,
    pub max_retries: u32,
}

impl Default for RoutingConfig {
    fn default() -> Self {
        Self { max_fee_bps: Some(100), max_retries: 3 }
    }
}

/// Tops up sleeve channels whose hub-side share of capacity fell below
/// `low_watermark`, bringing them back to `target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RebalancePolicy {
    pub enabled: bool,
    pub low_watermark: f64,
    pub target: f64,
    pub max_per_month: u32,
}

impl Default for RebalancePolicy {
    fn default() -> Self {
        Self { enabled: true, low_watermark: 0.20, target: 0.50, max_per_month: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub treasury: TreasuryConfig,
    pub market: MarketConfig,
    pub graph: Source<GraphSpec>,
    pub merchants: Source<Vec<Merchant>>,
    #[serde(default)]
    pub rail: RailParams,
    #[serde(default)]
    pub sleeve: SleeveConfig,
    #[serde(default)]
    pub stress_trigger: StressTrigger,
    #[serde(default)]
    pub monte_carlo: MonteCarloConfig,
    /// Payments simulated per merchant per month; the rest are extrapolated.
    #[serde(default = "default_sample_cap")]
    pub payment_sample_cap: u64,
    #[serde(default)]
    pub routing: RoutingConfig,
    #[serde(default)]
    pub rebalance: RebalancePolicy,
}

fn default_sample_cap() -> u64 {
    200
}

/// A validated config with its graph and roster loaded.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub graph: ChannelGraph,
    pub merchants: Vec<Merchant>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            EngineError::config(key, e.into_inner())
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| EngineError::config(".", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Validates, then loads file references relative to `base_dir`.
    pub fn resolve(self, base_dir: &Path) -> Result<Scenario> {
        self.validate()?;
        let spec: GraphSpec = match &self.graph {
            Source::Inline(s) => s.clone(),
            Source::Path(p) => read_json(&base_dir.join(p), "graph")?,
        };
        let graph = build_graph(&spec).map_err(|e| EngineError::config("graph", e))?;
        let merchants: Vec<Merchant> = match &self.merchants {
            Source::Inline(m) => m.clone(),
            Source::Path(p) => read_json(&base_dir.join(p), "merchants")?,
        };
        validate_roster(&merchants).map_err(|e| EngineError::config("merchants", e))?;
        for (i, m) in merchants.iter().enumerate() {
            if !graph.contains_node(&m.node) {
                return Err(EngineError::config(format!("merchants[{i}].node"), format!("unknown node `{}`", m.node)));
            }
            if self.rail.payer_nodes.contains(&m.node) {
                return Err(EngineError::config(format!("merchants[{i}].node"), "merchant node is also a payer"));
            }
        }
        for (i, p) in self.rail.payer_nodes.iter().enumerate() {
            if !graph.contains_node(p) {
                return Err(EngineError::config(format!("rail.payer_nodes[{i}]"), format!("unknown node `{p}`")));
            }
        }
        if merchants.iter().any(|m| m.active) && self.rail.payer_nodes.is_empty() {
            return Err(EngineError::config("rail.payer_nodes", "active merchants need at least one payer node"));
        }
        for (i, p) in self.sleeve.peers.iter().enumerate() {
            if !graph.contains_node(&p.node) {
                return Err(EngineError::config(
                    format!("sleeve.peers[{i}].node"),
                    format!("unknown node `{}`", p.node),
                ));
            }
        }
        Ok(Scenario { config: self, graph, merchants })
    }

    pub fn validate(&self) -> Result<()> {
        self.treasury.validate().map_err(|e| EngineError::config("treasury", e))?;
        if self.market.start_price_cents <= 0 {
            return Err(EngineError::config("market.start_price_cents", "must be positive"));
        }
        match self.market.model {
            MarketModel::Gbm { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(EngineError::config("market.model.mu", "must be finite"));
                }
                if !(sigma.is_finite() && sigma >= 0.0) {
                    return Err(EngineError::config("market.model.sigma", "must be finite and non-negative"));
                }
            }
            MarketModel::Stress { total_drawdown, .. } => {
                if !(0.0..1.0).contains(&total_drawdown) {
                    return Err(EngineError::config("market.model.total_drawdown", "must lie in [0, 1)"));
                }
            }
        }
        let frac = |key: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(EngineError::config(key, format!("must lie in [0, 1], got {v}")))
            }
        };
        frac("stress_trigger.drawdown_threshold", self.stress_trigger.drawdown_threshold)?;
        frac("stress_trigger.shrink_target", self.stress_trigger.shrink_target)?;
        frac("rebalance.low_watermark", self.rebalance.low_watermark)?;
        frac("rebalance.target", self.rebalance.target)?;
        if self.rebalance.target < self.rebalance.low_watermark {
            return Err(EngineError::config("rebalance.target", "must be at least rebalance.low_watermark"));
        }
        if self.monte_carlo.num_paths == 0 {
            return Err(EngineError::config("monte_carlo.num_paths", "must be at least 1"));
        }
        if self.payment_sample_cap == 0 {
            return Err(EngineError::config("payment_sample_cap", "must be at least 1"));
        }
        self.rail.ticket.validate().map_err(|e| EngineError::config("rail.ticket", e))?;
        if !(self.rail.churn.base.is_finite() && self.rail.churn.sensitivity.is_finite()) {
            return Err(EngineError::config("rail.churn", "parameters must be finite"));
        }
        Ok(())
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, key: &str) -> Result<T> {
    let text =
        std::fs::read_to_string(path).map_err(|e| EngineError::config(key, format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.path().to_string();
        EngineError::config(if inner == "." { key.to_string() } else { format!("{key}.{inner}") }, e.into_inner())
    })
}

impl Scenario {
    /// Reads a config file and resolves its references.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let base = path.parent().unwrap_or(Path::new("."));
        ScenarioConfig::load(path)?.resolve(base)
    }
}
