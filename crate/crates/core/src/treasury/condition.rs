use serde::Serialize;

use super::{Result, SurvivalMode, TreasuryError};
use crate::units::Cents;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SurvivalVerdict {
    pub survives: bool,
    /// First month (1-based) in which the test fails.
    pub breach_month: Option<usize>,
    /// Lowest running cash after any month.
    pub min_cash_cents: Cents,
    pub terminal_cash_cents: Cents,
}

/// The no-forced-sale test over a horizon of `inflows.len()` months.
///
/// Terminal mode checks `cash0 + sum(inflows) >= sum(outflows)`, the
/// inequality over the whole horizon. Pathwise mode requires the same
/// inequality for every prefix, so interim shortfalls count as breaches.
/// Equality passes in both modes.
pub fn no_forced_sale(
    cash0: Cents,
    inflows: &[Cents],
    outflows: &[Cents],
    mode: SurvivalMode,
) -> Result<SurvivalVerdict> {
    if inflows.len() != outflows.len() {
        return Err(TreasuryError::LengthMismatch(inflows.len(), outflows.len()));
    }
    if inflows.is_empty() {
        return Err(TreasuryError::EmptyHorizon);
    }
    let mut running = cash0 as i128;
    let mut min_cash = i128::MAX;
    let mut first_breach = None;
    for (k, (i, o)) in inflows.iter().zip(outflows).enumerate() {
        running += *i as i128 - *o as i128;
        min_cash = min_cash.min(running);
        if running < 0 && first_breach.is_none() {
            first_breach = Some(k + 1);
        }
    }
    let horizon = inflows.len();
    let (survives, breach_month) = match mode {
        SurvivalMode::Pathwise => (first_breach.is_none(), first_breach),
        SurvivalMode::Terminal if running >= 0 => (true, None),
        SurvivalMode::Terminal => (false, Some(horizon)),
    };
    Ok(SurvivalVerdict {
        survives,
        breach_month,
        min_cash_cents: clamp_cents(min_cash),
        terminal_cash_cents: clamp_cents(running),
    })
}

fn clamp_cents(v: i128) -> Cents {
    v.clamp(Cents::MIN as i128, Cents::MAX as i128) as Cents
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    use SurvivalMode::{Pathwise, Terminal};

    #[test]
    fn equality_survives() {
        for mode in [Terminal, Pathwise] {
            let v = no_forced_sale(0, &[5, 7, 9], &[5, 7, 9], mode).unwrap();
            assert!(v.survives);
            assert_eq!(v.terminal_cash_cents, 0);
        }
    }

    #[test]
    fn modes_disagree_on_interim_shortfall() {
        let t = no_forced_sale(100, &[0, 200], &[150, 0], Terminal).unwrap();
        assert!(t.survives);
        assert_eq!(t.terminal_cash_cents, 150);
        let p = no_forced_sale(100, &[0, 200], &[150, 0], Pathwise).unwrap();
        assert!(!p.survives);
        assert_eq!(p.breach_month, Some(1));
        assert_eq!(p.min_cash_cents, -50);
    }

    #[test]
    fn terminal_failure_reports_horizon() {
        let v = no_forced_sale(10, &[0, 0, 0], &[5, 5, 5], Terminal).unwrap();
        assert_eq!(v.breach_month, Some(3));
    }

    #[test]
    fn errors() {
        assert_eq!(no_forced_sale(0, &[1], &[1, 2], Pathwise), Err(TreasuryError::LengthMismatch(1, 2)));
        assert_eq!(no_forced_sale(0, &[], &[], Pathwise), Err(TreasuryError::EmptyHorizon));
    }

    fn flows() -> impl Strategy<Value = (Cents, Vec<Cents>, Vec<Cents>)> {
        (1usize..30).prop_flat_map(|h| {
            (0i64..1_000_000, prop::collection::vec(-10_000i64..100_000, h), prop::collection::vec(0i64..100_000, h))
        })
    }

    proptest! {
        #[test]
        fn pathwise_implies_terminal((cash0, ins, outs) in flows()) {
            let p = no_forced_sale(cash0, &ins, &outs, Pathwise).unwrap();
            let t = no_forced_sale(cash0, &ins, &outs, Terminal).unwrap();
            if p.survives {
                prop_assert!(t.survives);
            }
        }

        #[test]
        fn monotone_in_cash_and_inflows((cash0, ins, outs) in flows(), bump in 0i64..100_000, idx in any::<prop::sample::Index>()) {
            for mode in [Terminal, Pathwise] {
                let base = no_forced_sale(cash0, &ins, &outs, mode).unwrap();
                let richer = no_forced_sale(cash0 + bump, &ins, &outs, mode).unwrap();
                let mut more = ins.clone();
                more[idx.index(ins.len())] += bump;
                let more_in = no_forced_sale(cash0, &more, &outs, mode).unwrap();
                if base.survives {
                    prop_assert!(richer.survives && more_in.survives);
                }
            }
        }

        #[test]
        fn invariant_under_rescaling((cash0, ins, outs) in flows(), k in 1i64..1_000) {
            let scale = |v: &[Cents]| v.iter().map(|x| x * k).collect::<Vec<_>>();
            for mode in [Terminal, Pathwise] {
                let a = no_forced_sale(cash0, &ins, &outs, mode).unwrap();
                let b = no_forced_sale(cash0 * k, &scale(&ins), &scale(&outs), mode).unwrap();
                prop_assert_eq!(a.survives, b.survives);
                prop_assert_eq!(a.breach_month, b.breach_month);
                prop_assert_eq!(a.min_cash_cents * k, b.min_cash_cents);
            }
        }
    }
}
