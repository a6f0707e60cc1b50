//! Independent oracles shared by the integration tests and the acceptance
//! harness. Nothing here calls the code it checks.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use satrail::lightning::{
    build_graph, rebalance, send_payment, ChannelGraph, ChannelSpec, Direction, FeePolicy, GraphSpec, NodeId,
};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

/// Textbook two-pass Pearson correlation.
pub fn pearson_two_pass(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Empirical lower `q`-quantile by sorting (nearest rank).
pub fn empirical_quantile(mut xs: Vec<f64>, q: f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let k = ((q * xs.len() as f64).ceil() as usize).clamp(1, xs.len()) - 1;
    xs[k]
}

/// Monte Carlo one-month VaR of a lognormal position: the `alpha` quantile
/// of `value * (1 - exp(sigma * Z))`. Box-Muller normals.
pub fn mc_lognormal_var(value: f64, sigma: f64, alpha: f64, draws: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut losses = Vec::with_capacity(draws);
    while losses.len() < draws {
        let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
        let u2: f64 = rng.random();
        let r = (-2.0 * u1.ln()).sqrt();
        for z in [r * (std::f64::consts::TAU * u2).cos(), r * (std::f64::consts::TAU * u2).sin()] {
            if losses.len() < draws {
                losses.push(value * (1.0 - (sigma * z).exp()));
            }
        }
    }
    empirical_quantile(losses, alpha)
}

fn fee(base: u64, ppm: u64, amount: u64) -> u128 {
    base as u128 + amount as u128 * ppm as u128 / 1_000_000
}

/// Minimum total fee over all simple paths, with the same eligibility rule
/// as the router: an open direction whose capacity covers the amount
/// entering it. The sender forwards for free.
pub fn brute_force_min_fee(graph: &ChannelGraph, src: &NodeId, dst: &NodeId, amount: u64) -> Option<u64> {
    let chans: Vec<_> = graph.open_channels().cloned().collect();
    let mut best: Option<u64> = None;
    let mut path: Vec<(usize, Direction)> = Vec::new();
    let mut visited = vec![src.clone()];

    fn walk(
        chans: &[satrail::lightning::Channel],
        at: &NodeId,
        dst: &NodeId,
        amount: u64,
        path: &mut Vec<(usize, Direction)>,
        visited: &mut Vec<NodeId>,
        best: &mut Option<u64>,
    ) {
        if at == dst {
            // Walk backwards from the receiver.
            let mut entering = amount as u128;
            for (k, &(ci, dir)) in path.iter().enumerate().rev() {
                let c = &chans[ci];
                if (c.capacity_msat as u128) < entering {
                    return;
                }
                if k > 0 {
                    let p = c.policy(dir);
                    entering += fee(p.base_fee_msat, p.proportional_millionths, entering as u64);
                    if entering > u64::MAX as u128 {
                        return;
                    }
                }
            }
            let total = (entering - amount as u128) as u64;
            *best = Some(best.map_or(total, |b| b.min(total)));
            return;
        }
        for (ci, c) in chans.iter().enumerate() {
            for dir in [Direction::AToB, Direction::BToA] {
                if c.source(dir) != at {
                    continue;
                }
                let next = c.target(dir).clone();
                if visited.contains(&next) {
                    continue;
                }
                visited.push(next.clone());
                path.push((ci, dir));
                walk(chans, &next, dst, amount, path, visited, best);
                path.pop();
                visited.pop();
            }
        }
    }
    walk(&chans, src, dst, amount, &mut path, &mut visited, &mut best);
    best
}

/// Random graph with `n` nodes (hub `n0`), random capacities, balances and
/// policies, and a few closed channels.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> ChannelGraph {
    let nodes: Vec<NodeId> = (0..n).map(|i| NodeId(format!("n{i}"))).collect();
    let mut channels = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let copies = if rng.random::<f64>() < density { 1 + (rng.random::<f64>() < 0.15) as usize } else { 0 };
            for c in 0..copies {
                let capacity = rng.random_range(1_000..5_000_000u64);
                let policy =
                    |rng: &mut ChaCha8Rng| FeePolicy::new(rng.random_range(0..2_000), rng.random_range(0..5_000));
                channels.push(ChannelSpec {
                    id: format!("c{i}-{j}-{c}").as_str().into(),
                    a: nodes[i].clone(),
                    b: nodes[j].clone(),
                    capacity_msat: capacity,
                    balance_a_msat: rng.random_range(0..=capacity),
                    policy_ab: policy(rng),
                    policy_ba: policy(rng),
                    open: rng.random::<f64>() > 0.1,
                });
            }
        }
    }
    build_graph(&GraphSpec { nodes: nodes.clone(), hub: nodes[0].clone(), channels }).expect("valid random graph")
}

/// Sum of every node's local balance.
pub fn total_local(graph: &ChannelGraph) -> u128 {
    graph.nodes().iter().map(|n| graph.local_balance(n) as u128).sum()
}

#[derive(Debug, Default)]
pub struct Tally {
    pub settled: usize,
    pub failed: usize,
    pub violations: Vec<String>,
}

/// Applies `ops` random payments and hub rebalances, checking after each that
/// total balance, capacity and per-node holdings are conserved and that every
/// failure leaves the graph bit-identical.
pub fn exercise(g: &mut ChannelGraph, rng: &mut ChaCha8Rng, ops: usize) -> Tally {
    let mut tally = Tally::default();
    let total = g.total_balance_msat();
    let capacity = g.total_capacity_msat();
    let check = |ok: bool, what: String, tally: &mut Tally| {
        if !ok {
            tally.violations.push(what);
        }
    };
    for op in 0..ops {
        let before = g.to_canonical_json();
        let local_before = total_local(g);
        let n = g.nodes().len();
        if rng.random::<f64>() < 0.8 {
            let s = rng.random_range(0..n);
            let d = (s + rng.random_range(1..n)) % n;
            let (src, dst) = (g.nodes()[s].clone(), g.nodes()[d].clone());
            let amount = rng.random_range(1..1_500_000);
            let (src_before, dst_before) = (g.local_balance(&src), g.local_balance(&dst));
            let res = send_payment(g, &src, &dst, amount, None, 2).expect("valid payment request");
            if res.result.is_settled() {
                tally.settled += 1;
                let route = res.result.route.expect("settled payments carry a route");
                check(
                    g.local_balance(&src) == src_before - route.amount_sent(),
                    format!("op {op}: sender debit"),
                    &mut tally,
                );
                check(g.local_balance(&dst) == dst_before + amount, format!("op {op}: receiver credit"), &mut tally);
            } else {
                tally.failed += 1;
                check(g.to_canonical_json() == before, format!("op {op}: failed payment mutated graph"), &mut tally);
            }
        } else {
            let hub = g.hub().clone();
            let ids: Vec<_> = g.hub_channels().map(|c| c.id.clone()).collect();
            if ids.len() < 2 {
                continue;
            }
            let from = &ids[rng.random_range(0..ids.len())];
            let to = &ids[rng.random_range(0..ids.len())];
            let hub_before = g.local_balance(&hub);
            match rebalance(g, from, to, rng.random_range(1..500_000)) {
                Ok(out) => {
                    tally.settled += 1;
                    check(
                        g.local_balance(&hub) == hub_before - out.cost_msat,
                        format!("op {op}: hub pays cost"),
                        &mut tally,
                    );
                }
                Err(_) => {
                    tally.failed += 1;
                    check(
                        g.to_canonical_json() == before,
                        format!("op {op}: failed rebalance mutated graph"),
                        &mut tally,
                    );
                }
            }
        }
        check(g.total_balance_msat() == total, format!("op {op}: total balance"), &mut tally);
        check(g.total_capacity_msat() == capacity, format!("op {op}: capacity"), &mut tally);
        check(total_local(g) == local_before, format!("op {op}: node holdings"), &mut tally);
    }
    tally
}
