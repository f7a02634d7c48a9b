mod common;

use std::collections::BTreeSet;

use coomforge_core::solver::{brute_force_enumerate, raw_candidate_count, SolveOptions, Solver};
use coomforge_core::{check_model, instantiate, parse_model};
use proptest::prelude::*;

/// Random models small enough to compare against the oracle.
const ORACLE_LIMIT: u128 = 20_000;

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn models_are_valid_and_match_oracle(bytes in prop::collection::vec(any::<u8>(), 64)) {
        let src = common::gen::random_model(&bytes);
        let ast = parse_model(&src).expect("generated model parses");
        let space = instantiate(&ast, 2).expect("generated model instantiates");
        let solver = Solver::new(&space, &SolveOptions::default());
        let (models, _) = solver.enumerate(&[], None, 500);
        for m in &models {
            let failures = check_model(&space, m);
            prop_assert!(failures.is_empty(), "{failures:?}\n{src}");
            let structural = common::structural_violations(&space, m);
            prop_assert!(structural.is_empty(), "{structural:?}\n{src}");
        }
        if raw_candidate_count(&space) <= ORACLE_LIMIT {
            let oracle: BTreeSet<_> = brute_force_enumerate(&space, ORACLE_LIMIT).unwrap().into_iter().collect();
            let all: BTreeSet<_> = solver.enumerate(&[], None, 0).0.into_iter().collect();
            prop_assert_eq!(all, oracle, "{}", src);
        }
    }

    #[test]
    fn cursor_resumes_where_it_stopped(bytes in prop::collection::vec(any::<u8>(), 64)) {
        let src = common::gen::random_model(&bytes);
        let space = instantiate(&parse_model(&src).unwrap(), 1).unwrap();
        let solver = Solver::new(&space, &SolveOptions::default());
        let (all, _) = solver.enumerate(&[], None, 40);
        let mut stepped = Vec::new();
        let mut cursor = None;
        while stepped.len() < all.len() {
            let (batch, next) = solver.enumerate(&[], cursor.as_ref(), 3);
            prop_assert!(!batch.is_empty());
            stepped.extend(batch);
            cursor = next;
            if cursor.is_none() {
                break;
            }
        }
        stepped.truncate(all.len());
        prop_assert_eq!(stepped, all);
    }
}
