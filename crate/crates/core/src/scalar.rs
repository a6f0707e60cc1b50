//! Scalar abstraction for the real-valued analytics.
//!
//! Money never goes through this trait: balances, fees and cash are integer
//! cents or millisatoshis. `Real` covers the statistics, price-path math and
//! risk ratios, which work for both `f32` and `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar usable by the analytics: `f32` or `f64`.
pub trait Real: Float + FromPrimitive + ToPrimitive + Debug + Display + FromStr + Sum + Send + Sync + 'static {
    /// Lossy conversion from an `f64` literal or intermediate.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("f64 is representable in every Real")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real always converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
