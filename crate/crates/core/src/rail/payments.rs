use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::{Merchant, RailError, RailParams, Result};
use crate::lightning::NodeId;
use crate::seed;
use crate::units::{cents_to_msat_ceil, Cents, Msat};

/// Lognormal ticket-size model, truncated to `[min_cents, max_cents]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TicketModel {
    pub median_cents: Cents,
    /// Standard deviation of the log ticket size.
    pub shape: f64,
    pub min_cents: Cents,
    pub max_cents: Cents,
    /// Overrides the mean ticket implied by the distribution.
    pub mean_ticket_cents: Option<Cents>,
}

impl Default for TicketModel {
    fn default() -> Self {
        Self { median_cents: 25_00, shape: 0.8, min_cents: 1_00, max_cents: 5_000_00, mean_ticket_cents: None }
    }
}

impl TicketModel {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(RailError::InvalidTicketModel(m.to_owned()));
        if self.min_cents < 1 || self.max_cents < self.min_cents {
            return bad("need 1 <= min_cents <= max_cents");
        }
        if self.median_cents < 1 {
            return bad("median_cents must be positive");
        }
        if !self.shape.is_finite() || self.shape < 0.0 {
            return bad("shape must be finite and non-negative");
        }
        if self.shape == 0.0 && !(self.min_cents..=self.max_cents).contains(&self.median_cents) {
            return bad("with zero shape the median must lie within [min_cents, max_cents]");
        }
        if matches!(self.mean_ticket_cents, Some(m) if m < 1) {
            return bad("mean_ticket_cents must be positive");
        }
        Ok(())
    }

    /// Mean ticket in cents: the override if set, otherwise the mean of the
    /// truncated lognormal, rounded.
    pub fn mean_ticket_cents(&self) -> Cents {
        if let Some(m) = self.mean_ticket_cents {
            return m;
        }
        let mu = (self.median_cents as f64).ln();
        let s = self.shape;
        let (lo, hi) = ((self.min_cents as f64).ln(), (self.max_cents as f64).ln());
        if s == 0.0 {
            return self.median_cents.clamp(self.min_cents, self.max_cents);
        }
        let phi = Normal::standard();
        let mass = phi.cdf((hi - mu) / s) - phi.cdf((lo - mu) / s);
        let shifted = phi.cdf((hi - mu - s * s) / s) - phi.cdf((lo - mu - s * s) / s);
        let mean = (mu + s * s / 2.0).exp() * shifted / mass;
        (mean.round() as Cents).max(1)
    }

    fn sample(&self, rng: &mut seed::SimRng) -> Cents {
        let mu = (self.median_cents as f64).ln();
        let (lo, hi) = (self.min_cents as f64, self.max_cents as f64);
        for _ in 0..256 {
            let z: f64 = StandardNormal.sample(rng);
            let x = (mu + self.shape * z).exp();
            if (lo..=hi).contains(&x) {
                return (x.round() as Cents).clamp(self.min_cents, self.max_cents);
            }
        }
        // Truncation window holds almost no mass; fall back to the median.
        self.median_cents.clamp(self.min_cents, self.max_cents)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PaymentRequest {
    pub payer: NodeId,
    pub merchant_id: String,
    pub merchant_node: NodeId,
    pub fiat_cents: Cents,
    pub amount_msat: Msat,
}

/// Payments a merchant receives in a month: `round(gmv / mean_ticket)`.
pub fn tx_count(merchant: &Merchant, ticket: &TicketModel) -> u64 {
    if !merchant.active || merchant.monthly_gmv_cents <= 0 {
        return 0;
    }
    let mean = ticket.mean_ticket_cents() as i128;
    ((merchant.monthly_gmv_cents as i128 * 2 + mean) / (2 * mean)) as u64
}

/// The first `limit` payments of a merchant's month.
///
/// The stream is seeded from (seed, month, merchant id), so a smaller limit
/// yields a prefix of a larger one.
pub fn merchant_payments(
    merchant: &Merchant,
    month: usize,
    price_cents: Cents,
    seed: u64,
    params: &RailParams,
    limit: u64,
) -> Result<Vec<PaymentRequest>> {
    if price_cents <= 0 {
        return Err(RailError::NonPositivePrice(price_cents));
    }
    params.ticket.validate()?;
    let n = tx_count(merchant, &params.ticket).min(limit);
    if n == 0 {
        return Ok(Vec::new());
    }
    if params.payer_nodes.is_empty() {
        return Err(RailError::NoPayers);
    }
    let mut rng =
        seed::rng(seed::derive(&[seed, seed::tag::PAYMENTS, month as u64, seed::fnv1a(merchant.id.as_bytes())]));
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let payer = params.payer_nodes[rng.random_range(0..params.payer_nodes.len())].clone();
        let fiat = params.ticket.sample(&mut rng);
        out.push(PaymentRequest {
            payer,
            merchant_id: merchant.id.clone(),
            merchant_node: merchant.node.clone(),
            fiat_cents: fiat,
            amount_msat: cents_to_msat_ceil(fiat, price_cents),
        });
    }
    Ok(out)
}

/// Every payment of the month across active merchants, in roster order.
pub fn gen_monthly_payments(
    merchants: &[Merchant],
    month: usize,
    price_cents: Cents,
    seed: u64,
    params: &RailParams,
) -> Result<Vec<PaymentRequest>> {
    if price_cents <= 0 {
        return Err(RailError::NonPositivePrice(price_cents));
    }
    let mut all = Vec::new();
    for m in merchants.iter().filter(|m| m.active) {
        all.extend(merchant_payments(m, month, price_cents, seed, params, u64::MAX)?);
    }
    Ok(all)
}
