//! Largest-remainder apportionment of an integer total.

/// Splits `total` across `weights` proportionally, handing leftover units to
/// the largest fractional remainders. Ties go to the lower index, so callers
/// control tie-breaks by ordering their inputs. The parts always sum to `total`.
///
/// Returns `None` when the weights are empty or sum to zero.
pub fn largest_remainder(total: u64, weights: &[u64]) -> Option<Vec<u64>> {
    let weight_sum: u128 = weights.iter().map(|&w| w as u128).sum();
    if weight_sum == 0 {
        return None;
    }
    let mut parts = Vec::with_capacity(weights.len());
    let mut remainders = Vec::with_capacity(weights.len());
    for (i, &w) in weights.iter().enumerate() {
        let scaled = total as u128 * w as u128;
        parts.push((scaled / weight_sum) as u64);
        remainders.push((scaled % weight_sum, i));
    }
    let assigned: u64 = parts.iter().sum();
    let mut leftover = total - assigned;
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, i) in &remainders {
        if leftover == 0 {
            break;
        }
        parts[i] += 1;
        leftover -= 1;
    }
    Some(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn equal_weights_odd_total() {
        assert_eq!(largest_remainder(1_000_001, &[1, 1]).unwrap(), vec![500_001, 500_000]);
    }

    #[test]
    fn three_one_one() {
        assert_eq!(largest_remainder(5_000_000, &[3, 1, 1]).unwrap(), vec![3_000_000, 1_000_000, 1_000_000]);
    }

    #[test]
    fn zero_weights_rejected() {
        assert!(largest_remainder(10, &[]).is_none());
        assert!(largest_remainder(10, &[0, 0]).is_none());
    }

    proptest! {
        #[test]
        fn parts_sum_to_total(total in 0u64..u64::MAX / 4, weights in prop::collection::vec(1u64..1_000_000, 1..12)) {
            let parts = largest_remainder(total, &weights).unwrap();
            prop_assert_eq!(parts.iter().sum::<u64>(), total);
        }
    }
}
