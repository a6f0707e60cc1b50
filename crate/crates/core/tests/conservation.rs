mod support;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{exercise, random_graph};

#[test]
fn thousands_of_operations_conserve_balance() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut ok, mut failed) = (0, 0);
    for _ in 0..20 {
        let n = rng.random_range(3..=10);
        let mut g = random_graph(&mut rng, n, 0.5);
        let tally = exercise(&mut g, &mut rng, 150);
        assert_eq!(tally.violations, Vec::<String>::new());
        ok += tally.settled;
        failed += tally.failed;
    }
    assert!(ok > 100 && failed > 100, "ok {ok} failed {failed}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn conservation_holds_for_any_seed(seed in any::<u64>(), n in 2usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = random_graph(&mut rng, n, 0.6);
        let tally = exercise(&mut g, &mut rng, 40);
        prop_assert_eq!(tally.violations, Vec::<String>::new());
    }
}
