use proptest::prelude::*;
use vgimp_core::acts::{apply_hearer_update, apply_speaker_update, ActInstance, INFORM, NO_ANSWER, QUESTION, YES_ANSWER};
use vgimp_core::belief::BeliefStore;
use vgimp_core::implicature::is_inefficient;
use vgimp_core::term::Term;

fn content() -> impl Strategy<Value = Term> {
    let leaf = prop::sample::select(vec!["p", "q", "r"]).prop_map(Term::atom);
    leaf.prop_recursive(2, 4, 2, |inner| {
        (prop::sample::select(vec!["f", "g"]), prop::collection::vec(inner, 1..=2)).prop_map(|(f, args)| Term::compound(f, args))
    })
}

proptest! {
    // unit costs scaled by any positive factor leave the verdict alone
    #[test]
    fn verdict_is_scale_free(r in 0usize..50, o in prop::option::of(0usize..50), k in 1usize..20) {
        prop_assert_eq!(is_inefficient(r, o), is_inefficient(r * k, o.map(|o| o * k)));
    }

    #[test]
    fn speaker_and_hearer_updates_commute(
        schema in prop::sample::select(vec![INFORM, QUESTION, YES_ANSWER, NO_ANSWER]),
        p in content(),
    ) {
        let act = ActInstance::new(schema, "a", "b", p);
        let mut store = BeliefStore::new();
        if let Some(e) = act.answered() {
            store = store.with_expectation(e);
        }
        let (s1, _) = apply_speaker_update(&store, &act).unwrap();
        let (sh, _) = apply_hearer_update(&s1, &act).unwrap();
        let (h1, _) = apply_hearer_update(&store, &act).unwrap();
        let (hs, _) = apply_speaker_update(&h1, &act).unwrap();
        prop_assert_eq!(sh, hs);
    }
}
