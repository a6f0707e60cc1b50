use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{to_price_cents, MarketError, PricePath, Result};
use crate::seed;
use crate::units::Cents;
use crate::Real;

/// One month in years.
pub const MONTH_FRACTION: f64 = 1.0 / 12.0;

/// Annualised geometric Brownian motion parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbmParams<F> {
    pub mu: F,
    pub sigma: F,
    pub horizon_months: usize,
}

impl<F: Real> GbmParams<F> {
    pub fn validate(&self) -> Result<()> {
        if self.horizon_months == 0 {
            return Err(MarketError::ZeroHorizon);
        }
        if !self.mu.is_finite() {
            return Err(MarketError::InvalidDrift(self.mu.as_f64()));
        }
        if !self.sigma.is_finite() || self.sigma < F::zero() {
            return Err(MarketError::InvalidVolatility(self.sigma.as_f64()));
        }
        Ok(())
    }
}

/// Simulates a monthly GBM path.
///
/// The log-price evolves exactly,
/// `ln S(t+1) = ln S(t) + (mu - sigma^2/2)/12 + sigma * sqrt(1/12) * Z_t`,
/// with `Z_t` drawn from a `ChaCha8Rng` seeded with `seed` (see [`crate::seed`]).
/// The continuous state is kept unrounded; each emitted price is rounded to
/// whole cents and floored at one cent.
pub fn gen_gbm_path<F: Real>(params: &GbmParams<F>, start_price: Cents, seed: u64) -> Result<PricePath> {
    if start_price <= 0 {
        return Err(MarketError::NonPositiveStartPrice(start_price));
    }
    params.validate()?;

    let dt = F::of(MONTH_FRACTION);
    let half = F::of(0.5);
    let drift = (params.mu - half * params.sigma * params.sigma) * dt;
    let diffusion = params.sigma * dt.sqrt();

    let mut rng = seed::rng(seed);
    let mut log_price = F::of(start_price as f64).ln();
    let mut prices = Vec::with_capacity(params.horizon_months + 1);
    prices.push(start_price);
    for _ in 0..params.horizon_months {
        let z: f64 = StandardNormal.sample(&mut rng);
        log_price = log_price + drift + diffusion * F::of(z);
        prices.push(to_price_cents(log_price.exp()));
    }
    Ok(PricePath { start_price, prices })
}
