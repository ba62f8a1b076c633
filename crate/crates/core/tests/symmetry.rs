use std::sync::Arc;

use idealfree_core::induction::{Engine, SearchConfig};
use idealfree_core::memodb::MemoDb;
use idealfree_core::restrict::{all_restrictions, TreeOptions};
use idealfree_core::{build_positive_roots, LabelSet};
use proptest::prelude::*;

fn plain_engine(tag: &str) -> Engine {
    let system = build_positive_roots(tag.parse().unwrap()).unwrap();
    let tree = Arc::new(all_restrictions(&system, TreeOptions::default()).unwrap());
    let meta = idealfree_core::induction::db_meta(&tree);
    Engine::new(tree, Arc::new(MemoDb::new(meta)), SearchConfig::plain()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Conjugate arrangements get the same verdict when searched from scratch.
    #[test]
    fn verdicts_are_invariant_under_automorphisms(tag in prop::sample::select(vec!["A3", "B3", "D4"]), bits in any::<u128>(), pick in any::<usize>()) {
        let engine = plain_engine(tag);
        let root = engine.tree().root();
        let set = LabelSet::from_bits(bits & root.system.all_labels().bits());
        let elements = root.aut.elements().unwrap();
        let g = &elements[pick % elements.len()];
        let a = engine.decide(0, set).unwrap().verdict;
        let b = engine.decide(0, g.apply(set)).unwrap().verdict;
        prop_assert!(a.same_outcome(&b), "{set:?}: {a} vs {b}");
    }
}

#[test]
fn generic_planes_are_not_free() {
    // three simple roots and the highest root of A3: any three are independent
    let engine = plain_engine("A3");
    let system = &engine.tree().root().system;
    let set: LabelSet = [0, 1, 2, system.len() - 1].into_iter().collect();
    let out = engine.decide(0, set).unwrap();
    assert!(!out.verdict.is_free(), "{}", out.verdict);
    // its conjugates agree
    for g in engine.tree().root().aut.elements().unwrap() {
        assert!(!engine.decide(0, g.apply(set)).unwrap().verdict.is_free());
    }
}
