use serde::Serialize;

use super::routing::{assemble, cheapest_hops};
use super::{execute_payment, hop_fee, ChannelGraph, ChannelId, ExcludedHops, LightningError, Result, Route};
use crate::units::Msat;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RebalanceOutcome {
    pub cost_msat: Msat,
    /// `cost_msat * 10_000 / amount_msat`.
    pub cost_bps: f64,
    pub route: Route,
}

/// Moves `amount_msat` of hub liquidity from `from_channel` to `to_channel`
/// with a circular payment hub -> ... -> hub.
///
/// The hub receives exactly `amount_msat` on `to_channel` and pays
/// `amount_msat` plus the intermediaries' fees out of `from_channel`, so its
/// total balance drops by exactly the cost. On any failure the graph is left
/// untouched.
pub fn rebalance(
    graph: &mut ChannelGraph,
    from_channel: &ChannelId,
    to_channel: &ChannelId,
    amount_msat: Msat,
) -> Result<RebalanceOutcome> {
    if amount_msat == 0 {
        return Err(LightningError::ZeroAmount);
    }
    if from_channel == to_channel {
        return Err(LightningError::SameChannel);
    }
    let hub = graph.hub().clone();
    let hub_idx = graph.hub_idx();
    let resolve = |id: &ChannelId| -> Result<usize> {
        let ci = graph.channel_idx(id).ok_or_else(|| LightningError::UnknownChannel(id.clone()))?;
        let ch = graph.channel_at(ci);
        if !ch.open || ch.direction_from(&hub).is_none() {
            return Err(LightningError::NotHubChannel(id.clone()));
        }
        Ok(ci)
    };
    let from_idx = resolve(from_channel)?;
    let to_idx = resolve(to_channel)?;

    let from = graph.channel_at(from_idx);
    let out_dir = from.direction_from(&hub).expect("hub channel");
    let first_peer = graph.node_idx(from.target(out_dir)).expect("endpoint");
    let to = graph.channel_at(to_idx);
    let in_dir = to.direction_from(&hub).expect("hub channel").reverse();
    let last_peer = graph.node_idx(to.source(in_dir)).expect("endpoint");

    if to.capacity_msat < amount_msat {
        return Err(LightningError::NoRoute);
    }
    // The last peer forwards `amount_msat` into the hub and keeps its fee.
    let needed_at_last_peer =
        amount_msat.checked_add(hop_fee(to.policy(in_dir), amount_msat)).ok_or(LightningError::NoRoute)?;

    let mut hops = vec![(from_idx, out_dir)];
    if first_peer != last_peer {
        let inner =
            cheapest_hops(graph, first_peer, last_peer, needed_at_last_peer, &ExcludedHops::new(), Some(hub_idx))
                .ok_or(LightningError::NoRoute)?;
        hops.extend(inner);
    }
    hops.push((to_idx, in_dir));

    let route = assemble(graph, &hops, amount_msat);
    if graph.channel_at(from_idx).capacity_msat < route.amount_sent() {
        return Err(LightningError::NoRoute);
    }
    let result = execute_payment(graph, &route, amount_msat)?;
    if let Some(hop) = result.failed_hop {
        return Err(LightningError::InsufficientBalance { hop });
    }
    let cost = route.total_fee_msat;
    Ok(RebalanceOutcome { cost_msat: cost, cost_bps: cost as f64 * 10_000.0 / amount_msat as f64, route })
}
