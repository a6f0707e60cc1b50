use serde::Serialize;

use super::{find_route, ChannelGraph, ExcludedHops, LightningError, NodeId, Result, Route};
use crate::units::Msat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PaymentStatus {
    Settled,
    NoRoute,
    InsufficientBalance,
    FeeCapExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PaymentResult {
    pub status: PaymentStatus,
    pub route: Option<Route>,
    pub failed_hop: Option<usize>,
}

impl PaymentResult {
    pub fn is_settled(&self) -> bool {
        self.status == PaymentStatus::Settled
    }

    fn failed(status: PaymentStatus) -> Self {
        Self { status, route: None, failed_hop: None }
    }
}

/// Attempts `route`, checking each hop's actual balance in order.
///
/// Either every hop shifts by its entering amount or nothing changes. On
/// success each intermediary ends up richer by exactly the fee it kept.
pub fn execute_payment(graph: &mut ChannelGraph, route: &Route, amount_msat: Msat) -> Result<PaymentResult> {
    if route.is_empty() || route.amount_delivered() != amount_msat {
        return Err(LightningError::RouteAmountMismatch {
            route: if route.is_empty() { 0 } else { route.amount_delivered() },
            requested: amount_msat,
        });
    }
    let mut resolved = Vec::with_capacity(route.len());
    for hop in &route.hops {
        let ci = graph.channel_idx(&hop.channel).ok_or_else(|| LightningError::UnknownChannel(hop.channel.clone()))?;
        if !graph.channel_at(ci).open {
            return Err(LightningError::StaleRoute(hop.channel.clone()));
        }
        resolved.push(ci);
    }
    for (i, (&ci, hop)) in resolved.iter().zip(&route.hops).enumerate() {
        if graph.channel_at(ci).spendable(hop.direction) < route.amounts_msat[i] {
            return Ok(PaymentResult {
                status: PaymentStatus::InsufficientBalance,
                route: Some(route.clone()),
                failed_hop: Some(i),
            });
        }
    }
    for (i, (&ci, hop)) in resolved.iter().zip(&route.hops).enumerate() {
        graph.channel_at_mut(ci).shift(hop.direction, route.amounts_msat[i]);
    }
    Ok(PaymentResult { status: PaymentStatus::Settled, route: Some(route.clone()), failed_hop: None })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PaymentAttempts {
    pub result: PaymentResult,
    pub attempts: u32,
}

/// Routes and executes a payment, retrying up to `max_retries` times with each
/// failed channel direction excluded from later searches.
pub fn send_payment(
    graph: &mut ChannelGraph,
    src: &NodeId,
    dst: &NodeId,
    amount_msat: Msat,
    max_fee_msat: Option<Msat>,
    max_retries: u32,
) -> Result<PaymentAttempts> {
    let mut excluded = ExcludedHops::new();
    let mut attempts = 0;
    let mut last = PaymentResult::failed(PaymentStatus::NoRoute);
    while attempts <= max_retries {
        let route = match find_route(graph, src, dst, amount_msat, max_fee_msat, &excluded) {
            Ok(route) => route,
            Err(LightningError::NoRoute) => {
                last = PaymentResult::failed(PaymentStatus::NoRoute);
                break;
            }
            Err(LightningError::FeeCapExceeded { .. }) => {
                last = PaymentResult::failed(PaymentStatus::FeeCapExceeded);
                break;
            }
            Err(e) => return Err(e),
        };
        attempts += 1;
        last = execute_payment(graph, &route, amount_msat)?;
        match last.failed_hop {
            None => break,
            Some(i) => {
                let hop = &route.hops[i];
                excluded.insert((hop.channel.clone(), hop.direction));
            }
        }
    }
    Ok(PaymentAttempts { result: last, attempts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lightning::{build_graph, hop_fee, ChannelSpec, FeePolicy, GraphSpec};

    fn spec(id: &str, a: &str, b: &str, cap: Msat, bal_a: Msat, p: FeePolicy) -> ChannelSpec {
        ChannelSpec {
            id: id.into(),
            a: a.into(),
            b: b.into(),
            capacity_msat: cap,
            balance_a_msat: bal_a,
            policy_ab: p,
            policy_ba: p,
            open: true,
        }
    }

    fn graph(nodes: &[&str], channels: Vec<ChannelSpec>) -> ChannelGraph {
        build_graph(&GraphSpec { nodes: nodes.iter().map(|&n| n.into()).collect(), hub: nodes[0].into(), channels })
            .unwrap()
    }

    #[test]
    fn single_hop_settles() {
        let mut g = graph(&["a", "b"], vec![spec("c", "a", "b", 1_000, 500, FeePolicy::default())]);
        let r = find_route(&g, &"a".into(), &"b".into(), 200, None, &ExcludedHops::new()).unwrap();
        let res = execute_payment(&mut g, &r, 200).unwrap();
        assert!(res.is_settled());
        assert_eq!(res.failed_hop, None);
        assert_eq!(g.local_balance(&"a".into()), 300);
        assert_eq!(g.local_balance(&"b".into()), 700);
    }

    #[test]
    fn insufficient_balance_is_atomic() {
        let mut g = graph(&["a", "b"], vec![spec("c", "a", "b", 1_000, 500, FeePolicy::default())]);
        let before = g.clone();
        let r = find_route(&g, &"a".into(), &"b".into(), 600, None, &ExcludedHops::new()).unwrap();
        let res = execute_payment(&mut g, &r, 600).unwrap();
        assert_eq!(res.status, PaymentStatus::InsufficientBalance);
        assert_eq!(res.failed_hop, Some(0));
        assert_eq!(g, before);
    }

    #[test]
    fn failure_at_later_hop_leaves_earlier_hops_untouched() {
        let p = FeePolicy::new(1000, 100);
        let mut g = graph(
            &["a", "b", "c"],
            vec![spec("ab", "a", "b", 10_000_000, 10_000_000, p), spec("bc", "b", "c", 10_000_000, 10, p)],
        );
        let before = g.clone();
        let r = find_route(&g, &"a".into(), &"c".into(), 1_000_000, None, &ExcludedHops::new()).unwrap();
        let res = execute_payment(&mut g, &r, 1_000_000).unwrap();
        assert_eq!(res.failed_hop, Some(1));
        assert_eq!(g, before);
    }

    #[test]
    fn intermediary_gains_exactly_its_fee() {
        let p = FeePolicy::new(1000, 100);
        let mut g = graph(
            &["a", "b", "c"],
            vec![
                spec("ab", "a", "b", 10_000_000_000, 5_000_000_000, p),
                spec("bc", "b", "c", 10_000_000_000, 5_000_000_000, p),
            ],
        );
        let amount = 1_000_000_000;
        let (a0, b0, c0) = (g.local_balance(&"a".into()), g.local_balance(&"b".into()), g.local_balance(&"c".into()));
        let r = find_route(&g, &"a".into(), &"c".into(), amount, None, &ExcludedHops::new()).unwrap();
        assert!(execute_payment(&mut g, &r, amount).unwrap().is_settled());
        let fee = hop_fee(p, amount);
        assert_eq!(fee, 101_000);
        assert_eq!(g.local_balance(&"b".into()) - b0, fee);
        assert_eq!(a0 - g.local_balance(&"a".into()), amount + fee);
        assert_eq!(g.local_balance(&"c".into()) - c0, amount);
    }

    #[test]
    fn stale_route_rejected() {
        let mut g = graph(&["a", "b"], vec![spec("c", "a", "b", 1_000, 500, FeePolicy::default())]);
        let r = find_route(&g, &"a".into(), &"b".into(), 100, None, &ExcludedHops::new()).unwrap();
        crate::lightning::shrink_sleeve(&mut g, 0.0).unwrap();
        assert_eq!(execute_payment(&mut g, &r, 100), Err(LightningError::StaleRoute("c".into())));
        assert!(matches!(execute_payment(&mut g, &r, 99), Err(LightningError::RouteAmountMismatch { .. })));
    }

    #[test]
    fn retries_route_around_depleted_channel() {
        // Router prefers the free direct channel, which has no spendable balance.
        let mut g = graph(
            &["a", "b", "c"],
            vec![
                spec("ab", "a", "b", 10_000, 0, FeePolicy::default()),
                spec("ac", "a", "c", 10_000, 10_000, FeePolicy::default()),
                spec("cb", "c", "b", 10_000, 10_000, FeePolicy::new(5, 0)),
            ],
        );
        let no_retry = send_payment(&mut g.clone(), &"a".into(), &"b".into(), 1_000, None, 0).unwrap();
        assert_eq!(no_retry.result.status, PaymentStatus::InsufficientBalance);
        assert_eq!(no_retry.attempts, 1);

        let out = send_payment(&mut g, &"a".into(), &"b".into(), 1_000, None, 2).unwrap();
        assert!(out.result.is_settled());
        assert_eq!(out.attempts, 2);
        assert_eq!(out.result.route.unwrap().total_fee_msat, 5);
    }

    #[test]
    fn exhausted_alternatives_report_no_route() {
        let mut g = graph(&["a", "b"], vec![spec("ab", "a", "b", 10_000, 0, FeePolicy::default())]);
        let out = send_payment(&mut g, &"a".into(), &"b".into(), 1_000, None, 3).unwrap();
        assert_eq!(out.result.status, PaymentStatus::NoRoute);
        assert_eq!(out.attempts, 1);
    }
}
