use std::io::Read;
use std::path::Path;

use serde::Serialize;

use super::{Result, TreasuryError};
use crate::units::Cents;
use crate::Real;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoldingsRow {
    pub ticker: String,
    pub btc_held: f64,
    pub mkt_cap_cents: Cents,
    pub shares_outstanding: Option<u64>,
}

/// Market cap over the market value of BTC held. Other balance-sheet items
/// are ignored.
pub fn mnav<F: Real>(mkt_cap_cents: F, btc_held: F, price_cents_per_btc: F) -> Result<F> {
    if btc_held.is_nan() || btc_held <= F::zero() {
        return Err(TreasuryError::NonPositiveHoldings);
    }
    if price_cents_per_btc.is_nan() || price_cents_per_btc <= F::zero() {
        return Err(TreasuryError::NonPositivePrice);
    }
    Ok(mkt_cap_cents / (btc_held * price_cents_per_btc))
}

pub fn btc_per_share<F: Real>(btc_held: F, shares_outstanding: F) -> Result<F> {
    if shares_outstanding.is_nan() || shares_outstanding <= F::zero() {
        return Err(TreasuryError::ZeroShares);
    }
    Ok(btc_held / shares_outstanding)
}

impl HoldingsRow {
    pub fn mnav(&self, price_cents_per_btc: Cents) -> Result<f64> {
        mnav(self.mkt_cap_cents as f64, self.btc_held, price_cents_per_btc as f64)
    }

    pub fn btc_per_share(&self) -> Option<Result<f64>> {
        self.shares_outstanding.map(|s| btc_per_share(self.btc_held, s as f64))
    }
}

pub fn load_holdings_csv(path: impl AsRef<Path>) -> Result<Vec<HoldingsRow>> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| TreasuryError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_holdings_csv(file)
}

/// Parses `ticker,btc_held,mkt_cap_usd,shares_outstanding`. USD amounts are
/// converted to cents exactly; the shares column may be empty.
pub fn parse_holdings_csv<R: Read>(reader: R) -> Result<Vec<HoldingsRow>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| TreasuryError::Io(e.to_string()))?.clone();
    let names: Vec<&str> = header.iter().map(|h| h.trim_start_matches('\u{feff}')).collect();
    if names != ["ticker", "btc_held", "mkt_cap_usd", "shares_outstanding"] {
        return Err(TreasuryError::BadHeader(names.join(",")));
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| TreasuryError::MalformedRow {
            row: e.position().map(|p| p.line() as usize).unwrap_or(0),
            reason: e.to_string(),
        })?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let bad = |reason: String| TreasuryError::MalformedRow { row, reason };
        if record.len() != 4 {
            return Err(bad(format!("expected 4 fields, got {}", record.len())));
        }
        let ticker = record[0].to_string();
        if ticker.is_empty() {
            return Err(bad("empty ticker".into()));
        }
        let btc_held: f64 = record[1].parse().map_err(|_| bad(format!("bad btc_held `{}`", &record[1])))?;
        if !(btc_held.is_finite() && btc_held > 0.0) {
            return Err(bad(format!("btc_held must be positive, got `{}`", &record[1])));
        }
        let mkt_cap_cents = usd_to_cents(&record[2]).ok_or_else(|| bad(format!("bad mkt_cap_usd `{}`", &record[2])))?;
        let shares_outstanding = match &record[3] {
            "" => None,
            s => match s.parse::<u64>() {
                Ok(n) if n > 0 => Some(n),
                _ => return Err(bad(format!("shares_outstanding must be a positive integer, got `{s}`"))),
            },
        };
        rows.push(HoldingsRow { ticker, btc_held, mkt_cap_cents, shares_outstanding });
    }
    Ok(rows)
}

/// Non-negative decimal dollars with at most two fractional digits.
fn usd_to_cents(s: &str) -> Option<Cents> {
    let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
    if whole.is_empty() || frac.len() > 2 || !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let frac_cents: Cents = format!("{frac:0<2}").parse().ok()?;
    whole.parse::<Cents>().ok()?.checked_mul(100)?.checked_add(frac_cents)
}
