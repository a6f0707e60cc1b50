//! Unit conventions and conversions between cents, sats and msat.
//!
//! Prices are integer US cents per whole BTC. Channel amounts are msat.
//! Every conversion uses a 128-bit intermediate so no product can overflow.

/// US cents, signed so that transient shortfalls can be represented.
pub type Cents = i64;
/// Millisatoshi, the channel accounting unit.
pub type Msat = u64;
/// Satoshi.
pub type Sats = u64;

pub const SATS_PER_BTC: u64 = 100_000_000;
pub const MSAT_PER_SAT: u64 = 1_000;
pub const MSAT_PER_BTC: u64 = SATS_PER_BTC * MSAT_PER_SAT;

/// Fiat value of `amount_msat` at `price_cents` per BTC, floored to whole cents.
pub fn msat_to_cents_floor(amount_msat: Msat, price_cents: Cents) -> Cents {
    debug_assert!(price_cents > 0);
    let v = amount_msat as u128 * price_cents as u128 / MSAT_PER_BTC as u128;
    v as Cents
}

/// Fiat value of `amount_msat`, rounded up. Used for costs.
pub fn msat_to_cents_ceil(amount_msat: Msat, price_cents: Cents) -> Cents {
    debug_assert!(price_cents > 0);
    (amount_msat as u128 * price_cents as u128).div_ceil(MSAT_PER_BTC as u128) as Cents
}

/// Smallest msat amount whose floored fiat value is at least `cents`.
///
/// For any positive price below 10^11 cents, `msat_to_cents_floor` of the
/// result gives back exactly `cents`.
pub fn cents_to_msat_ceil(cents: Cents, price_cents: Cents) -> Msat {
    debug_assert!(cents >= 0 && price_cents > 0);
    let num = cents as u128 * MSAT_PER_BTC as u128;
    num.div_ceil(price_cents as u128) as Msat
}

/// Sats needed to raise `shortfall_cents` at `price_cents`, rounded up.
pub fn sats_to_cover(shortfall_cents: Cents, price_cents: Cents) -> Sats {
    debug_assert!(shortfall_cents >= 0 && price_cents > 0);
    let num = shortfall_cents as u128 * SATS_PER_BTC as u128;
    num.div_ceil(price_cents as u128) as Sats
}

/// Fiat value of `sats` at `price_cents`, floored.
pub fn sats_to_cents_floor(sats: Sats, price_cents: Cents) -> Cents {
    (sats as u128 * price_cents as u128 / SATS_PER_BTC as u128) as Cents
}

/// `floor(amount * bps / 10_000)` for non-negative inputs.
pub fn apply_bps_floor(amount: Cents, bps: u64) -> Cents {
    debug_assert!(amount >= 0);
    (amount as i128 * bps as i128 / 10_000) as Cents
}
