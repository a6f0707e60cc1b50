//! Payment-channel network micro-simulator.
//!
//! Channels are modelled economically: a capacity split into two directional
//! balances, a forwarding fee policy per direction, and nothing of the wire
//! protocol. All amounts are msat.

mod fees;
mod graph;
mod payment;
mod rebalance;
mod routing;
mod sleeve;

pub use fees::{hop_fee, FeePolicy};
pub use graph::{build_graph, Channel, ChannelGraph, ChannelId, ChannelSpec, Direction, GraphSpec, NodeId};
pub use payment::{execute_payment, send_payment, PaymentAttempts, PaymentResult, PaymentStatus};
pub use rebalance::{rebalance, RebalanceOutcome};
pub use routing::{find_route, ExcludedHops, Route, RouteHop};
pub use sleeve::{deploy_sleeve, shrink_sleeve, ShrinkOutcome, SleeveOptions, SleevePeer};

use thiserror::Error;

use crate::units::Msat;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LightningError {
    #[error("hub `{0}` is not among the graph's nodes")]
    HubMissing(NodeId),
    #[error("duplicate node id `{0}`")]
    DuplicateNode(NodeId),
    #[error("duplicate channel id `{0}`")]
    DuplicateChannel(ChannelId),
    #[error("channel `{channel}` references unknown node `{node}`")]
    DanglingEndpoint { channel: ChannelId, node: NodeId },
    #[error("channel `{0}` connects a node to itself")]
    SelfLoop(ChannelId),
    #[error("channel `{0}` has zero capacity")]
    ZeroCapacity(ChannelId),
    #[error("channel `{channel}`: balance {balance} exceeds capacity {capacity}")]
    BalanceExceedsCapacity { channel: ChannelId, balance: Msat, capacity: Msat },
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("unknown channel `{0}`")]
    UnknownChannel(ChannelId),
    #[error("route references closed channel `{0}`")]
    StaleRoute(ChannelId),
    #[error("route does not deliver the requested amount ({route} vs {requested} msat)")]
    RouteAmountMismatch { route: Msat, requested: Msat },
    #[error("source and destination are the same node")]
    SameEndpoints,
    #[error("amount must be positive")]
    ZeroAmount,
    #[error("no route")]
    NoRoute,
    #[error("cheapest route costs {fee_msat} msat, above the {cap_msat} msat cap")]
    FeeCapExceeded { fee_msat: Msat, cap_msat: Msat },
    #[error("insufficient balance at hop {hop}")]
    InsufficientBalance { hop: usize },
    #[error("sleeve needs at least one peer")]
    NoPeers,
    #[error("peer `{0}` has zero weight")]
    ZeroWeight(NodeId),
    #[error("peer `{0}` listed twice")]
    DuplicatePeer(NodeId),
    #[error("the hub cannot open a channel to itself")]
    PeerIsHub,
    #[error("sleeve too small: peer `{peer}` would get {capacity_msat} msat, minimum is {min_msat}")]
    SleeveTooSmall { peer: NodeId, capacity_msat: Msat, min_msat: Msat },
    #[error("fraction must lie in [0, 1], got {0}")]
    InvalidFraction(f64),
    #[error("channel `{0}` is not an open hub channel")]
    NotHubChannel(ChannelId),
    #[error("rebalance needs two distinct channels")]
    SameChannel,
    #[error("graph file: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, LightningError>;
