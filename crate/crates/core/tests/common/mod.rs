#![allow(dead_code)]

use std::path::PathBuf;

use coomforge_core::{instantiate, parse_model, ConfigurationSpace};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn space(name: &str, max_bound: u32) -> ConfigurationSpace {
    let ast = parse_model(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    instantiate(&ast, max_bound).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub mod gen;

use coomforge_core::Model;

/// Structural invariants every model must satisfy, independent of the
/// constraints: definedness, closed subtrees and prefix-ordered sets.
pub fn structural_violations(space: &ConfigurationSpace, m: &Model) -> Vec<String> {
    let mut out = Vec::new();
    for (v, var) in space.variables.iter().enumerate() {
        let has_domain = space.domain(v).is_some();
        if m.included[v] && has_domain && m.values[v].is_none() {
            out.push(format!("{} included without a value", var.id));
        }
        if !m.included[v] && m.values[v].is_some() {
            out.push(format!("{} excluded but has a value", var.id));
        }
        if let Some(p) = var.parent {
            if m.included[v] && !m.included[p] {
                out.push(format!("{} included under an excluded parent", var.id));
            }
        }
    }
    // Aggregate sets may span several parents; only cardinality sets are ordered.
    for set in space.sets.iter().filter(|s| s.lower_bound.is_some()) {
        let flags: Vec<bool> = set.members.iter().map(|&v| m.included[v]).collect();
        if flags.windows(2).any(|w| !w[0] && w[1]) {
            out.push(format!("set {} is not a prefix: {flags:?}", set.id));
        }
    }
    out
}

/// Every model fixture with the bound used for its `*` features.
pub const MODEL_FIXTURES: &[(&str, u32)] = &[
    ("kids-bike.coom", 1),
    ("kids-bike-optional.coom", 1),
    ("travel-bike-simplified.coom", 1),
    ("travel-bike-scaled.coom", 1),
    ("travel-bike.coom", 1),
    ("cargo-bike.coom", 3),
    ("cargo-bike-scaled.coom", 3),
    ("nested-shelf.coom", 1),
    ("restaurant.coom", 1),
];
