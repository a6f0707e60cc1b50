use serde::{Deserialize, Serialize};

use super::{to_price_cents, MarketError, PricePath, Result};
use crate::units::Cents;
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum StressKind {
    /// Price level falls by the same number of cents each month.
    #[default]
    Linear,
    /// Price falls by the same percentage each month.
    Exponential,
}

/// Deterministic bear-market shape ending `total_drawdown` below the start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressShape<F> {
    pub kind: StressKind,
    pub total_drawdown: F,
    pub horizon_months: usize,
}

pub fn gen_stress_path<F: Real>(shape: &StressShape<F>, start_price: Cents) -> Result<PricePath> {
    if start_price <= 0 {
        return Err(MarketError::NonPositiveStartPrice(start_price));
    }
    let d = shape.total_drawdown;
    if !(d >= F::zero() && d < F::one()) {
        return Err(MarketError::InvalidDrawdown(d.as_f64()));
    }
    if shape.horizon_months == 0 {
        return Err(MarketError::ZeroHorizon);
    }

    let h = shape.horizon_months;
    let start = F::of(start_price as f64);
    let horizon = F::of(h as f64);
    let keep = F::one() - d;
    let factor = keep.powf(horizon.recip());

    let mut prices = Vec::with_capacity(h + 1);
    prices.push(start_price);
    for t in 1..=h {
        let tf = F::of(t as f64);
        let level = match shape.kind {
            StressKind::Linear => start * (F::one() - d * tf / horizon),
            StressKind::Exponential => start * factor.powf(tf),
        };
        prices.push(to_price_cents(level));
    }
    // Pin the endpoint so both shapes land on the same rounded trough.
    prices[h] = to_price_cents(start * keep);
    Ok(PricePath { start_price, prices })
}
