//! Rendering of models for `solve`.

use std::collections::BTreeMap;
use std::fmt::Write;

use clap::ValueEnum;
use coomforge_core::space::solution_to_coom;
use coomforge_core::{ConfigurationSpace, Model};
use serde_json::{json, Value as Json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Coom,
    Json,
    Facts,
}

pub fn model_coom(space: &ConfigurationSpace, m: &Model) -> String {
    solution_to_coom(space, m).unwrap_or_else(|failures| {
        // The solver only returns checked models; this is a bug if reached.
        panic!("solver returned a model that fails its check: {failures:?}")
    })
}

pub fn model_json(space: &ConfigurationSpace, m: &Model) -> Json {
    let mut included = Vec::new();
    let mut values = BTreeMap::new();
    for (i, var) in space.variables.iter().enumerate() {
        if !m.included[i] {
            continue;
        }
        match &m.values[i] {
            Some(v) => {
                values.insert(var.id.clone(), serde_json::to_value(v).expect("values serialize"));
            }
            None => included.push(var.id.clone()),
        }
    }
    json!({ "included": included, "values": values })
}

/// `include("<id>").` per included part and `value("<id>",<v>).` per
/// included attribute, sorted.
pub fn model_facts(space: &ConfigurationSpace, m: &Model) -> String {
    let mut lines = Vec::new();
    for (i, var) in space.variables.iter().enumerate() {
        if !m.included[i] {
            continue;
        }
        let id = serde_json::to_string(&var.id).expect("strings serialize");
        match &m.values[i] {
            Some(v) => lines.push(format!("value({id},{}).", serde_json::to_string(v).expect("values serialize"))),
            None => lines.push(format!("include({id}).")),
        }
    }
    lines.sort();
    lines.iter().fold(String::new(), |mut out, l| {
        let _ = writeln!(out, "{l}");
        out
    })
}
