//! Shared inputs for the benchmarks.

use std::path::PathBuf;

use coomforge_core::{instantiate, parse_model, ConfigurationSpace};

pub fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn space(name: &str, bound: u32) -> ConfigurationSpace {
    instantiate(&parse_model(&fixture(name)).expect("fixture parses"), bound).expect("fixture instantiates")
}
