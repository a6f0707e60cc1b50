use serde::{Deserialize, Serialize};

use super::{MarketError, Result};
use crate::Real;

/// Whether correlation is measured on price levels or on simple returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationBasis {
    #[default]
    Levels,
    Returns,
}

/// Pearson product-moment correlation.
///
/// Single pass over the data with running means and co-moments, which stays
/// stable for long series of large price levels. Clamped to `[-1, 1]`.
pub fn pearson_corr<F: Real>(xs: &[F], ys: &[F]) -> Result<F> {
    if xs.len() != ys.len() {
        return Err(MarketError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(MarketError::TooShort { needed: 2, got: xs.len() });
    }
    let (mut mean_x, mut mean_y) = (F::zero(), F::zero());
    let (mut m2_x, mut m2_y, mut c_xy) = (F::zero(), F::zero(), F::zero());
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        let n = F::of((i + 1) as f64);
        let dx = x - mean_x;
        mean_x = mean_x + dx / n;
        let dy = y - mean_y;
        mean_y = mean_y + dy / n;
        m2_x = m2_x + dx * (x - mean_x);
        m2_y = m2_y + dy * (y - mean_y);
        c_xy = c_xy + dx * (y - mean_y);
    }
    if m2_x <= F::zero() || m2_y <= F::zero() {
        return Err(MarketError::ZeroVariance);
    }
    let r = c_xy / (m2_x.sqrt() * m2_y.sqrt());
    Ok(r.max(-F::one()).min(F::one()))
}

/// Simple returns `p[t] / p[t-1] - 1`.
pub fn to_returns<F: Real>(prices: &[F]) -> Result<Vec<F>> {
    if prices.len() < 2 {
        return Err(MarketError::TooShort { needed: 2, got: prices.len() });
    }
    Ok(prices.windows(2).map(|w| w[1] / w[0] - F::one()).collect())
}

pub fn correlate<F: Real>(xs: &[F], ys: &[F], basis: CorrelationBasis) -> Result<F> {
    match basis {
        CorrelationBasis::Levels => pearson_corr(xs, ys),
        CorrelationBasis::Returns => pearson_corr(&to_returns(xs)?, &to_returns(ys)?),
    }
}
