mod common;

use std::collections::BTreeSet;

use coomforge_core::solver::{brute_force_enumerate, raw_candidate_count};
use coomforge_core::{check_model, enumerate};

const CAP: u128 = 1_000_000;

/// Fixture, bound for `0..*` features.
const FIXTURES: &[(&str, u32)] = &[
    ("kids-bike.coom", 1),
    ("travel-bike-scaled.coom", 1),
    ("cargo-bike-scaled.coom", 3),
    ("kids-bike-optional.coom", 1),
    ("nested-shelf.coom", 1),
    ("restaurant.coom", 1),
];

#[test]
fn solver_matches_oracle_on_fixtures() {
    for &(name, bound) in FIXTURES {
        let space = common::space(name, bound);
        let raw = raw_candidate_count(&space);
        assert!(raw <= CAP, "{name}: {raw} candidates");
        let oracle: BTreeSet<_> = brute_force_enumerate(&space, CAP).unwrap().into_iter().collect();
        let found = enumerate(&space, &[], 0);
        for m in &found {
            assert!(check_model(&space, m).is_empty(), "{name}: invalid model");
        }
        let solver: BTreeSet<_> = found.iter().cloned().collect();
        assert_eq!(solver.len(), found.len(), "{name}: duplicate models");
        assert_eq!(solver, oracle, "{name}: model sets differ");
        println!("{name}: {raw} candidates, {} models", oracle.len());
    }
}
