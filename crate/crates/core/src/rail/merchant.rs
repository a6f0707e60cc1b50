use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{RailError, Result};
use crate::lightning::NodeId;
use crate::units::Cents;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SettleMode {
    Btc,
    Fiat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Merchant {
    pub id: String,
    /// Node the merchant receives payments on.
    pub node: NodeId,
    pub monthly_gmv_cents: Cents,
    pub take_rate_bps: u64,
    pub settle_mode: SettleMode,
    #[serde(default)]
    pub sats_back_bps: u64,
    #[serde(default = "active_default")]
    pub active: bool,
}

fn active_default() -> bool {
    true
}

pub fn parse_roster(text: &str) -> Result<Vec<Merchant>> {
    let merchants: Vec<Merchant> = serde_json::from_str(text).map_err(|e| RailError::Roster(e.to_string()))?;
    validate_roster(&merchants)?;
    Ok(merchants)
}

/// Ids are unique and active merchants have positive GMV.
pub fn validate_roster(merchants: &[Merchant]) -> Result<()> {
    let mut ids = std::collections::BTreeSet::new();
    for m in merchants {
        if !ids.insert(m.id.as_str()) {
            return Err(RailError::Roster(format!("duplicate merchant id `{}`", m.id)));
        }
        if m.active && m.monthly_gmv_cents <= 0 {
            return Err(RailError::Roster(format!("merchant `{}` is active with non-positive GMV", m.id)));
        }
    }
    Ok(())
}

pub fn load_roster(path: impl AsRef<Path>) -> Result<Vec<Merchant>> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| RailError::Roster(format!("{}: {e}", path.as_ref().display())))?;
    parse_roster(&text)
}
