mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vgimp_core::planner::{plan, satisfies, simulate};

use common::{bfs_min_length, random_domain};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn planner_matches_bfs(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_domain(&mut rng);
        let expected = bfs_min_length(&d.initial, &d.goals, &d.ops, 5);
        let got = plan(&d.initial, &d.goals, &d.ops, 5);
        prop_assert_eq!(got.as_ref().map(|p| p.cost().unwrap()), expected);
        if let Some(p) = got {
            let end = simulate(&d.initial, &p.actions().unwrap()).unwrap();
            prop_assert!(satisfies(&end, &p.goals));
            // every link survives every step ordered between its ends
            let order = p.linearize().unwrap();
            for l in &p.links {
                let from = order.iter().position(|s| *s == l.producer).map_or(0, |i| i + 1);
                let to = order.iter().position(|s| *s == l.consumer).unwrap_or(order.len());
                for s in &order[from..to] {
                    prop_assert!(!p.steps[s].del.contains(&l.condition));
                }
            }
        }
    }

    #[test]
    fn planner_is_deterministic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_domain(&mut rng);
        let a = plan(&d.initial, &d.goals, &d.ops, 4);
        let b = plan(&d.initial, &d.goals, &d.ops, 4);
        prop_assert_eq!(a, b);
    }
}
