use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{FeePolicy, LightningError, Result};
use crate::units::Msat;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub String);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChannelId(pub String);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

impl From<&str> for ChannelId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    AToB,
    BToA,
}

impl Direction {
    pub fn reverse(self) -> Self {
        match self {
            Direction::AToB => Direction::BToA,
            Direction::BToA => Direction::AToB,
        }
    }
}

/// A two-party channel. `balance_a_msat` is node A's side; B's side is the
/// remainder of the capacity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    pub id: ChannelId,
    pub node_a: NodeId,
    pub node_b: NodeId,
    pub capacity_msat: Msat,
    pub balance_a_msat: Msat,
    pub policy_ab: FeePolicy,
    pub policy_ba: FeePolicy,
    pub open: bool,
}

impl Channel {
    pub fn balance_b_msat(&self) -> Msat {
        self.capacity_msat - self.balance_a_msat
    }

    pub fn source(&self, dir: Direction) -> &NodeId {
        match dir {
            Direction::AToB => &self.node_a,
            Direction::BToA => &self.node_b,
        }
    }

    pub fn target(&self, dir: Direction) -> &NodeId {
        self.source(dir.reverse())
    }

    /// Fee the source node charges to forward in `dir`.
    pub fn policy(&self, dir: Direction) -> FeePolicy {
        match dir {
            Direction::AToB => self.policy_ab,
            Direction::BToA => self.policy_ba,
        }
    }

    /// Balance the source side can send in `dir`.
    pub fn spendable(&self, dir: Direction) -> Msat {
        match dir {
            Direction::AToB => self.balance_a_msat,
            Direction::BToA => self.balance_b_msat(),
        }
    }

    /// Direction in which `node` is the sender, if it is an endpoint.
    pub fn direction_from(&self, node: &NodeId) -> Option<Direction> {
        if *node == self.node_a {
            Some(Direction::AToB)
        } else if *node == self.node_b {
            Some(Direction::BToA)
        } else {
            None
        }
    }

    pub fn balance_of(&self, node: &NodeId) -> Msat {
        match self.direction_from(node) {
            Some(dir) => self.spendable(dir),
            None => 0,
        }
    }

    pub(crate) fn shift(&mut self, dir: Direction, amount: Msat) {
        match dir {
            Direction::AToB => self.balance_a_msat -= amount,
            Direction::BToA => self.balance_a_msat += amount,
        }
        debug_assert!(self.balance_a_msat <= self.capacity_msat);
    }
}

/// Validated channel network with a distinguished hub (the treasury's node).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelGraph {
    nodes: Vec<NodeId>,
    node_index: BTreeMap<NodeId, usize>,
    channels: Vec<Channel>,
    channel_index: BTreeMap<ChannelId, usize>,
    adjacency: Vec<Vec<usize>>,
    /// Node indices of each channel's `(node_a, node_b)`.
    endpoints: Vec<(usize, usize)>,
    /// Position of each channel in ascending id order.
    id_rank: Vec<u32>,
    hub: usize,
    deployment_baseline_msat: Option<Msat>,
}

impl ChannelGraph {
    pub fn hub(&self) -> &NodeId {
        &self.nodes[self.hub]
    }

    /// Node ids in ascending order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn contains_node(&self, node: &NodeId) -> bool {
        self.node_index.contains_key(node)
    }

    /// Every channel ever opened, closed ones included.
    pub fn channels(&self) -> impl Iterator<Item = &Channel> {
        self.channels.iter()
    }

    pub fn open_channels(&self) -> impl Iterator<Item = &Channel> {
        self.channels.iter().filter(|c| c.open)
    }

    pub fn channel(&self, id: &ChannelId) -> Option<&Channel> {
        self.channel_index.get(id).map(|&i| &self.channels[i])
    }

    pub fn total_capacity_msat(&self) -> u128 {
        self.open_channels().map(|c| c.capacity_msat as u128).sum()
    }

    /// Sum of every node's local balance over open channels.
    pub fn total_balance_msat(&self) -> u128 {
        self.nodes.iter().map(|n| self.local_balance(n) as u128).sum()
    }

    /// Total balance `node` holds on its side of its open channels.
    pub fn local_balance(&self, node: &NodeId) -> Msat {
        match self.node_index.get(node) {
            Some(&i) => self.adjacency[i]
                .iter()
                .map(|&c| &self.channels[c])
                .filter(|c| c.open)
                .map(|c| c.balance_of(node))
                .sum(),
            None => 0,
        }
    }

    /// Open channels with the hub as an endpoint.
    pub fn hub_channels(&self) -> impl Iterator<Item = &Channel> {
        self.adjacency[self.hub].iter().map(|&c| &self.channels[c]).filter(|c| c.open)
    }

    /// The hub's side of all its open channels: the liquidity it has deployed.
    pub fn hub_deployed_msat(&self) -> Msat {
        self.local_balance(self.hub())
    }

    pub fn deployment_baseline_msat(&self) -> Option<Msat> {
        self.deployment_baseline_msat
    }

    pub(crate) fn set_deployment_baseline(&mut self, msat: Msat) {
        self.deployment_baseline_msat = Some(msat);
    }

    pub(crate) fn node_idx(&self, node: &NodeId) -> Option<usize> {
        self.node_index.get(node).copied()
    }

    pub(crate) fn hub_idx(&self) -> usize {
        self.hub
    }

    pub(crate) fn channel_idx(&self, id: &ChannelId) -> Option<usize> {
        self.channel_index.get(id).copied()
    }

    pub(crate) fn channel_at(&self, idx: usize) -> &Channel {
        &self.channels[idx]
    }

    pub(crate) fn channel_at_mut(&mut self, idx: usize) -> &mut Channel {
        &mut self.channels[idx]
    }

    pub(crate) fn incident(&self, node_idx: usize) -> &[usize] {
        &self.adjacency[node_idx]
    }

    pub(crate) fn endpoints_at(&self, idx: usize) -> (usize, usize) {
        self.endpoints[idx]
    }

    pub(crate) fn id_rank_at(&self, idx: usize) -> u32 {
        self.id_rank[idx]
    }

    pub(crate) fn insert_channel(&mut self, channel: Channel) -> Result<()> {
        if self.channel_index.contains_key(&channel.id) {
            return Err(LightningError::DuplicateChannel(channel.id));
        }
        let a = self.endpoint(&channel, &channel.node_a)?;
        let b = self.endpoint(&channel, &channel.node_b)?;
        if a == b {
            return Err(LightningError::SelfLoop(channel.id));
        }
        if channel.capacity_msat == 0 {
            return Err(LightningError::ZeroCapacity(channel.id));
        }
        if channel.balance_a_msat > channel.capacity_msat {
            return Err(LightningError::BalanceExceedsCapacity {
                channel: channel.id,
                balance: channel.balance_a_msat,
                capacity: channel.capacity_msat,
            });
        }
        let idx = self.channels.len();
        self.channel_index.insert(channel.id.clone(), idx);
        self.adjacency[a].push(idx);
        self.adjacency[b].push(idx);
        self.endpoints.push((a, b));
        self.channels.push(channel);
        self.id_rank = vec![0; self.channels.len()];
        for (rank, &i) in self.channel_index.values().enumerate() {
            self.id_rank[i] = rank as u32;
        }
        Ok(())
    }

    fn endpoint(&self, channel: &Channel, node: &NodeId) -> Result<usize> {
        self.node_idx(node)
            .ok_or_else(|| LightningError::DanglingEndpoint { channel: channel.id.clone(), node: node.clone() })
    }

    /// Canonical description: sorted node ids and channels sorted by id.
    pub fn to_spec(&self) -> GraphSpec {
        let mut channels: Vec<ChannelSpec> = self.channels.iter().map(ChannelSpec::from).collect();
        channels.sort_by(|x, y| x.id.cmp(&y.id));
        GraphSpec { nodes: self.nodes.clone(), hub: self.hub().clone(), channels }
    }

    /// Pretty JSON with sorted object keys and sorted ids.
    pub fn to_canonical_json(&self) -> String {
        let value = serde_json::to_value(self.to_spec()).expect("graph spec serialises");
        let mut text = serde_json::to_string_pretty(&value).expect("json value serialises");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GraphSpec = serde_json::from_str(text).map_err(|e| LightningError::Json(e.to_string()))?;
        build_graph(&spec)
    }
}

/// On-disk graph description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub nodes: Vec<NodeId>,
    pub hub: NodeId,
    #[serde(default)]
    pub channels: Vec<ChannelSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub id: ChannelId,
    pub a: NodeId,
    pub b: NodeId,
    pub capacity_msat: Msat,
    pub balance_a_msat: Msat,
    #[serde(default)]
    pub policy_ab: FeePolicy,
    #[serde(default)]
    pub policy_ba: FeePolicy,
    #[serde(default = "default_open", skip_serializing_if = "is_open")]
    pub open: bool,
}

fn default_open() -> bool {
    true
}

fn is_open(open: &bool) -> bool {
    *open
}

impl From<&Channel> for ChannelSpec {
    fn from(c: &Channel) -> Self {
        Self {
            id: c.id.clone(),
            a: c.node_a.clone(),
            b: c.node_b.clone(),
            capacity_msat: c.capacity_msat,
            balance_a_msat: c.balance_a_msat,
            policy_ab: c.policy_ab,
            policy_ba: c.policy_ba,
            open: c.open,
        }
    }
}

pub fn build_graph(spec: &GraphSpec) -> Result<ChannelGraph> {
    let mut unique = BTreeSet::new();
    for n in &spec.nodes {
        if !unique.insert(n.clone()) {
            return Err(LightningError::DuplicateNode(n.clone()));
        }
    }
    let nodes: Vec<NodeId> = unique.into_iter().collect();
    let node_index: BTreeMap<NodeId, usize> = nodes.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
    let hub = *node_index.get(&spec.hub).ok_or_else(|| LightningError::HubMissing(spec.hub.clone()))?;

    let mut graph = ChannelGraph {
        adjacency: vec![Vec::new(); nodes.len()],
        nodes,
        node_index,
        channels: Vec::with_capacity(spec.channels.len()),
        channel_index: BTreeMap::new(),
        endpoints: Vec::with_capacity(spec.channels.len()),
        id_rank: Vec::new(),
        hub,
        deployment_baseline_msat: None,
    };
    for c in &spec.channels {
        graph.insert_channel(Channel {
            id: c.id.clone(),
            node_a: c.a.clone(),
            node_b: c.b.clone(),
            capacity_msat: c.capacity_msat,
            balance_a_msat: c.balance_a_msat,
            policy_ab: c.policy_ab,
            policy_ba: c.policy_ba,
            open: c.open,
        })?;
    }
    Ok(graph)
}
