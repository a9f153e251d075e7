mod common;

use proptest::prelude::*;

use xpathsat::dtd::{delta, is_mdf_dc, subsequence_preserves, RuleClass};
use xpathsat::oracle::{conforms, enumerate_trees, oracle_satisfiable, satisfies, Bounds, DocTree};
use xpathsat::regex::{ContentModel, Word};
use xpathsat::sat::{eval1, eval2, Checker};
use xpathsat::schema_graph::SchemaGraph;

fn alphabet() -> Vec<xpathsat::label::Label> {
    common::labels(&["a", "b", "c", "d"])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn models_print_and_parse_back(seed in any::<u64>()) {
        let e = common::mrw_model(&mut common::rng(seed), &alphabet(), 10);
        let back = ContentModel::parse_compact(&e.to_string()).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn matching_agrees_with_enumeration(seed in any::<u64>(), word in proptest::collection::vec(0usize..4, 0..5)) {
        let e = common::mrw_model(&mut common::rng(seed), &alphabet(), 10);
        let words = e.enumerate_words(4);
        prop_assert!(words.iter().all(|w| e.matches(w)));
        let w = Word::new(word.iter().map(|&i| alphabet()[i].clone()).collect());
        prop_assert_eq!(e.matches(&w), words.contains(&w));
    }

    #[test]
    fn delta_preserves_satisfiability_behavior(seed in any::<u64>()) {
        let e = common::mrw_model(&mut common::rng(seed), &alphabet(), 10);
        let d = delta(&e);
        prop_assert!(is_mdf_dc(&d), "delta({}) = {}", e, d);
        prop_assert!(subsequence_preserves(&e, &d, 5), "delta({}) = {}", e, d);
        prop_assert_eq!(delta(&d), d);
    }

    #[test]
    fn class_implications(seed in any::<u64>()) {
        let e = common::mrw_model(&mut common::rng(seed), &alphabet(), 10);
        let c = RuleClass::of(&e);
        prop_assert!(c.mrw);
        prop_assert!(!c.mdf_dc || c.mrw);
        prop_assert!(!c.mrw || c.rw);
        prop_assert!(!c.dc || c.dc_qph);
        prop_assert!(!c.dc_qph || c.rw);
        prop_assert!(!c.df || c.rw);
        prop_assert_eq!(c.mdf_dc, c.mrw && !e.contains_opt_plus_or_hash());
    }

    #[test]
    fn both_procedures_agree_on_step_sequences(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let d = common::non_recursive_dtd(&mut rng, false, 6);
        let p = common::sibling_query(&mut rng, &d, 5);
        let g = SchemaGraph::build(&d).unwrap();
        let one = eval1(&p.flatten_steps().unwrap(), &g, false).failure.is_none();
        let two = eval2(&p, &g, false).accepting().next().is_some();
        prop_assert_eq!(one, two, "{} under {}", p.to_arrow_string(), d);
    }

    #[test]
    fn satisfiable_iff_oracle_finds_witness(seed in any::<u64>(), qualifiers in any::<bool>()) {
        let mut rng = common::rng(seed);
        let d = common::non_recursive_dtd(&mut rng, true, 6);
        let p = if qualifiers { common::eval2_query(&mut rng, &d, 5) } else { common::eval1_query(&mut rng, &d, 5) };
        let sat = Checker::new(&d).unwrap().check(&p).unwrap().satisfiable;
        let found = oracle_satisfiable(&p, &d, Bounds::for_query(&p));
        if let Some(w) = found.witness() {
            prop_assert!(conforms(w, &d) && satisfies(w, &p));
        }
        prop_assert_eq!(sat, found.is_sat(), "{} under {}", p.to_arrow_string(), d);
    }

    #[test]
    fn enumerated_trees_conform_and_print_back(seed in any::<u64>()) {
        let d = common::non_recursive_dtd(&mut common::rng(seed), true, 5);
        for t in enumerate_trees(&d, 3, 1).iter().take(200) {
            prop_assert!(conforms(t, &d));
            prop_assert_eq!(DocTree::parse(&t.to_string()).unwrap().to_string(), t.to_string());
        }
    }
}
