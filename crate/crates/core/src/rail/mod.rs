//! Payments-rail business layer: merchants, payment generation, fee
//! economics, churn and the monthly net cash inflow the treasury receives.

mod churn;
mod economics;
mod merchant;
mod payments;

pub use churn::{apply_churn, ChurnOutcome, ChurnParams};
pub use economics::{
    acquiring_fee, hedge_settlement, month_rail_cashflow, sats_back_outlay, HedgeSettlement, RailMonthComponents,
    RailMonthRecord,
};
pub use merchant::{load_roster, parse_roster, validate_roster, Merchant, SettleMode};
pub use payments::{gen_monthly_payments, merchant_payments, tx_count, PaymentRequest, TicketModel};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lightning::NodeId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RailError {
    #[error("price must be positive, got {0} cents")]
    NonPositivePrice(i64),
    #[error("payment success rate must lie in [0, 1], got {0}")]
    InvalidSuccessRate(f64),
    #[error("cash-flow component `{0}` is negative")]
    NegativeComponent(&'static str),
    #[error("ticket model: {0}")]
    InvalidTicketModel(String),
    #[error("no payer nodes configured")]
    NoPayers,
    #[error("merchant roster: {0}")]
    Roster(String),
}

pub type Result<T> = std::result::Result<T, RailError>;

/// How sats-back rewards are booked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SatsBackBooking {
    /// Rewards pass through the rail and are booked as a rail cost.
    #[default]
    RailCost,
    /// The merchant reimburses rewards in full; nothing is booked.
    MerchantFunded,
}

/// Rail parameters shared by every merchant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RailParams {
    pub ticket: TicketModel,
    /// Spread kept when converting sats settlements to fiat.
    pub spread_bps: u64,
    /// Processing cost as bps of settled GMV.
    pub variable_cost_bps: u64,
    pub churn: ChurnParams,
    pub sats_back_booking: SatsBackBooking,
    /// Customer wallet nodes that originate payments.
    pub payer_nodes: Vec<NodeId>,
    /// Monthly GMV growth of active merchants, in bps. Zero by default.
    pub gmv_growth_bps_monthly: i64,
}

impl Default for RailParams {
    fn default() -> Self {
        Self {
            ticket: TicketModel::default(),
            spread_bps: 5,
            variable_cost_bps: 5,
            churn: ChurnParams::default(),
            sats_back_booking: SatsBackBooking::RailCost,
            payer_nodes: Vec::new(),
            gmv_growth_bps_monthly: 0,
        }
    }
}

/// Card acceptance cost used as a reference point in reports.
pub const CARD_ACCEPTANCE_BPS_RANGE: (u64, u64) = (200, 300);
