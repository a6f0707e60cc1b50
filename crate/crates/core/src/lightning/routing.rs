use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap};
use std::rc::Rc;

use serde::Serialize;

use super::{hop_fee, ChannelGraph, ChannelId, Direction, LightningError, NodeId, Result};
use crate::units::Msat;

/// Channel directions a router must not use, e.g. after a failed attempt.
pub type ExcludedHops = BTreeSet<(ChannelId, Direction)>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RouteHop {
    pub channel: ChannelId,
    pub direction: Direction,
    pub from: NodeId,
    pub to: NodeId,
}

/// A single-path route.
///
/// `amounts_msat[i]` is what enters hop `i`. `fees_msat[i]` is the fee kept by
/// the node forwarding over hop `i`; the sender forwards for free, so
/// `fees_msat[0] == 0` and `amounts_msat[i - 1] == amounts_msat[i] + fees_msat[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Route {
    pub hops: Vec<RouteHop>,
    pub amounts_msat: Vec<Msat>,
    pub fees_msat: Vec<Msat>,
    pub total_fee_msat: Msat,
}

impl Route {
    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    pub fn amount_sent(&self) -> Msat {
        self.amounts_msat[0]
    }

    pub fn amount_delivered(&self) -> Msat {
        *self.amounts_msat.last().expect("routes have at least one hop")
    }

    /// Fees kept by `node` as a forwarding intermediary on this route.
    pub fn fee_earned_by(&self, node: &NodeId) -> Msat {
        self.hops.iter().zip(&self.fees_msat).skip(1).filter(|(h, _)| h.from == *node).map(|(_, f)| *f).sum()
    }
}

/// Cheapest-fee route from `src` to `dst` delivering `amount_msat`.
///
/// The search runs from the receiver back to the sender so each hop's entering
/// amount includes every downstream fee. Only open channel directions whose
/// capacity covers the entering amount are considered; balances are private
/// to the endpoints and are only discovered by attempting the payment. Equal
/// fees are broken by the lexicographic order of the node path, then of the
/// channel ids along it.
pub fn find_route(
    graph: &ChannelGraph,
    src: &NodeId,
    dst: &NodeId,
    amount_msat: Msat,
    max_fee_msat: Option<Msat>,
    excluded: &ExcludedHops,
) -> Result<Route> {
    let s = graph.node_idx(src).ok_or_else(|| LightningError::UnknownNode(src.clone()))?;
    let d = graph.node_idx(dst).ok_or_else(|| LightningError::UnknownNode(dst.clone()))?;
    if s == d {
        return Err(LightningError::SameEndpoints);
    }
    if amount_msat == 0 {
        return Err(LightningError::ZeroAmount);
    }
    let hops = cheapest_hops(graph, s, d, amount_msat, excluded, None).ok_or(LightningError::NoRoute)?;
    let route = assemble(graph, &hops, amount_msat);
    match max_fee_msat {
        Some(cap) if route.total_fee_msat > cap => {
            Err(LightningError::FeeCapExceeded { fee_msat: route.total_fee_msat, cap_msat: cap })
        }
        _ => Ok(route),
    }
}

/// One hop of a search label, stored in path order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Step {
    channel: usize,
    dir: Direction,
    /// Node the hop enters.
    next: usize,
    /// Rank of the channel id in ascending id order.
    rank: u32,
}

/// Search label: the amount that must enter the hop into `node`, and the
/// path from `node` to the destination.
#[derive(Debug, PartialEq, Eq)]
struct Label {
    amount: Msat,
    node: usize,
    steps: Vec<Step>,
}

impl Label {
    fn node_path(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.node).chain(self.steps.iter().map(|s| s.next))
    }
}

/// Node indices follow id order, so comparing indices and ranks is the same
/// as comparing the id strings.
impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        self.amount
            .cmp(&other.amount)
            .then_with(|| self.node_path().cmp(other.node_path()))
            .then_with(|| self.steps.iter().map(|s| s.rank).cmp(other.steps.iter().map(|s| s.rank)))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Label-setting search from `dst` back to `src`. The forwarding fee is
/// strictly increasing in the forwarded amount, so the first time `src` is
/// settled its label is optimal. `forbidden` may not appear as an
/// intermediate node.
pub(crate) fn cheapest_hops(
    graph: &ChannelGraph,
    src: usize,
    dst: usize,
    deliver_msat: Msat,
    excluded: &ExcludedHops,
    forbidden: Option<usize>,
) -> Option<Vec<(usize, Direction)>> {
    let n = graph.nodes().len();
    let mut best: Vec<Option<Rc<Label>>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();

    let start = Rc::new(Label { amount: deliver_msat, node: dst, steps: Vec::new() });
    best[dst] = Some(Rc::clone(&start));
    heap.push(Reverse(start));

    while let Some(Reverse(label)) = heap.pop() {
        let v = label.node;
        if settled[v] || !best[v].as_ref().is_some_and(|b| Rc::ptr_eq(b, &label)) {
            continue;
        }
        settled[v] = true;
        if v == src {
            return Some(label.steps.iter().map(|s| (s.channel, s.dir)).collect());
        }
        for &ci in graph.incident(v) {
            let ch = graph.channel_at(ci);
            if !ch.open || ch.capacity_msat < label.amount {
                continue;
            }
            // Hop u -> v, so v is the target.
            let (a, b) = graph.endpoints_at(ci);
            let (u, dir) = if v == b { (a, Direction::AToB) } else { (b, Direction::BToA) };
            if settled[u] || (Some(u) == forbidden && u != src) {
                continue;
            }
            if !excluded.is_empty() && excluded.contains(&(ch.id.clone(), dir)) {
                continue;
            }
            let amount = if u == src {
                label.amount
            } else {
                match label.amount.checked_add(hop_fee(ch.policy(dir), label.amount)) {
                    Some(a) => a,
                    None => continue,
                }
            };
            if best[u].as_ref().is_some_and(|b| b.amount < amount) {
                continue;
            }
            let mut steps = Vec::with_capacity(label.steps.len() + 1);
            steps.push(Step { channel: ci, dir, next: v, rank: graph.id_rank_at(ci) });
            steps.extend_from_slice(&label.steps);
            let candidate = Label { amount, node: u, steps };
            if best[u].as_ref().is_none_or(|b| candidate < **b) {
                let candidate = Rc::new(candidate);
                best[u] = Some(Rc::clone(&candidate));
                heap.push(Reverse(candidate));
            }
        }
    }
    None
}

/// Builds a route over `hops`, computing amounts from the receiver backwards.
pub(crate) fn assemble(graph: &ChannelGraph, hops: &[(usize, Direction)], deliver_msat: Msat) -> Route {
    let n = hops.len();
    let mut amounts = vec![0; n];
    let mut fees = vec![0; n];
    amounts[n - 1] = deliver_msat;
    for i in (0..n - 1).rev() {
        let (ci, dir) = hops[i + 1];
        let fee = hop_fee(graph.channel_at(ci).policy(dir), amounts[i + 1]);
        fees[i + 1] = fee;
        amounts[i] = amounts[i + 1].saturating_add(fee);
    }
    let route_hops = hops
        .iter()
        .map(|&(ci, dir)| {
            let ch = graph.channel_at(ci);
            RouteHop {
                channel: ch.id.clone(),
                direction: dir,
                from: ch.source(dir).clone(),
                to: ch.target(dir).clone(),
            }
        })
        .collect();
    let total = fees.iter().fold(0u64, |acc, f| acc.saturating_add(*f));
    Route { hops: route_hops, amounts_msat: amounts, fees_msat: fees, total_fee_msat: total }
}
