use serde::{Deserialize, Serialize};

use crate::units::Msat;

/// Forwarding fee charged by a channel's source node for one direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FeePolicy {
    #[serde(rename = "base_msat")]
    pub base_fee_msat: Msat,
    #[serde(rename = "ppm")]
    pub proportional_millionths: u64,
}

impl FeePolicy {
    pub const fn new(base_fee_msat: Msat, proportional_millionths: u64) -> Self {
        Self { base_fee_msat, proportional_millionths }
    }
}

/// `base + floor(amount * ppm / 1_000_000)`, saturating at `u64::MAX`.
///
/// This is the only place fee arithmetic happens.
pub fn hop_fee(policy: FeePolicy, forward_amount_msat: Msat) -> Msat {
    let proportional = forward_amount_msat as u128 * policy.proportional_millionths as u128 / 1_000_000;
    let fee = policy.base_fee_msat as u128 + proportional;
    fee.min(u64::MAX as u128) as Msat
}
