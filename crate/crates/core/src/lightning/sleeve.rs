use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Channel, ChannelGraph, ChannelId, FeePolicy, LightningError, NodeId, Result};
use crate::apportion::largest_remainder;
use crate::units::Msat;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SleevePeer {
    pub node: NodeId,
    pub weight: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SleeveOptions {
    /// Smallest channel the hub will open.
    pub min_channel_msat: Msat,
    /// Hub's forwarding policy towards each peer.
    pub hub_policy: FeePolicy,
    /// Peer's forwarding policy towards the hub.
    pub peer_policy: FeePolicy,
}

impl Default for SleeveOptions {
    fn default() -> Self {
        Self {
            min_channel_msat: 20_000_000,
            hub_policy: FeePolicy::new(1_000, 100),
            peer_policy: FeePolicy::new(1_000, 100),
        }
    }
}

/// Opens one hub channel per peer, sized by weight with largest-remainder
/// apportionment (remainder ties go to the smaller peer id). The hub holds
/// the whole balance of each new channel.
pub fn deploy_sleeve(
    graph: &mut ChannelGraph,
    sleeve_msat: Msat,
    peers: &[SleevePeer],
    options: &SleeveOptions,
) -> Result<Vec<ChannelId>> {
    if sleeve_msat == 0 {
        return Err(LightningError::ZeroAmount);
    }
    if peers.is_empty() {
        return Err(LightningError::NoPeers);
    }
    let mut sorted: Vec<&SleevePeer> = peers.iter().collect();
    sorted.sort_by(|x, y| x.node.cmp(&y.node));
    let mut seen = BTreeSet::new();
    for p in &sorted {
        if !graph.contains_node(&p.node) {
            return Err(LightningError::UnknownNode(p.node.clone()));
        }
        if p.node == *graph.hub() {
            return Err(LightningError::PeerIsHub);
        }
        if p.weight == 0 {
            return Err(LightningError::ZeroWeight(p.node.clone()));
        }
        if !seen.insert(&p.node) {
            return Err(LightningError::DuplicatePeer(p.node.clone()));
        }
    }
    let weights: Vec<u64> = sorted.iter().map(|p| p.weight).collect();
    let sizes = largest_remainder(sleeve_msat, &weights).expect("weights are positive");
    if let Some((p, &size)) = sorted.iter().zip(&sizes).find(|(_, &s)| s < options.min_channel_msat.max(1)) {
        return Err(LightningError::SleeveTooSmall {
            peer: p.node.clone(),
            capacity_msat: size,
            min_msat: options.min_channel_msat.max(1),
        });
    }

    let hub = graph.hub().clone();
    let mut opened = Vec::with_capacity(sorted.len());
    for (p, size) in sorted.iter().zip(sizes) {
        let id = fresh_id(graph, &hub, &p.node);
        graph.insert_channel(Channel {
            id: id.clone(),
            node_a: hub.clone(),
            node_b: p.node.clone(),
            capacity_msat: size,
            balance_a_msat: size,
            policy_ab: options.hub_policy,
            policy_ba: options.peer_policy,
            open: true,
        })?;
        opened.push(id);
    }
    let deployed = graph.hub_deployed_msat();
    graph.set_deployment_baseline(deployed);
    Ok(opened)
}

fn fresh_id(graph: &ChannelGraph, hub: &NodeId, peer: &NodeId) -> ChannelId {
    (0u64..)
        .map(|seq| ChannelId(format!("sleeve:{hub}:{peer}:{seq}")))
        .find(|id| graph.channel(id).is_none())
        .expect("unbounded id space")
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ShrinkOutcome {
    pub closed: Vec<ChannelId>,
    /// Hub-side balances released back to the treasury.
    pub freed_msat: Msat,
    /// Counterparty-side balances, which stay with the counterparties.
    pub returned_to_peers_msat: Msat,
}

/// Closes hub channels, smallest hub-side balance first (ties by channel id),
/// until the hub's deployed balance is at most `target_fraction` of the
/// deployment baseline. The baseline is the deployment after the last
/// `deploy_sleeve`, or the current deployment if none happened.
pub fn shrink_sleeve(graph: &mut ChannelGraph, target_fraction: f64) -> Result<ShrinkOutcome> {
    if !(0.0..=1.0).contains(&target_fraction) {
        return Err(LightningError::InvalidFraction(target_fraction));
    }
    let mut outcome = ShrinkOutcome::default();
    if target_fraction == 1.0 {
        return Ok(outcome);
    }
    let hub = graph.hub().clone();
    let mut deployed = graph.hub_deployed_msat();
    let baseline = graph.deployment_baseline_msat().unwrap_or(deployed);
    let limit = (baseline as f64 * target_fraction).floor() as Msat;

    let mut order: Vec<(Msat, ChannelId)> = graph.hub_channels().map(|c| (c.balance_of(&hub), c.id.clone())).collect();
    order.sort();
    for (hub_side, id) in order {
        if deployed <= limit {
            break;
        }
        let idx = graph.channel_idx(&id).expect("listed channel exists");
        let ch = graph.channel_at_mut(idx);
        ch.open = false;
        outcome.returned_to_peers_msat += ch.capacity_msat - hub_side;
        outcome.freed_msat += hub_side;
        outcome.closed.push(id);
        deployed -= hub_side;
    }
    Ok(outcome)
}
