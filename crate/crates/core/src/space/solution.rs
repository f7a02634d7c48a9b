use std::fmt::Write;

use super::*;
use crate::solver::{check_model, Failure, Model};

/// Renders a model as a user-input file: `add` for included parts, `set`
/// for included attributes, in tree order. Enumeration attribute values are
/// implied by their option and left out.
pub fn solution_to_coom(space: &ConfigurationSpace, model: &Model) -> Result<String, Vec<Failure>> {
    let failures = check_model(space, model);
    if !failures.is_empty() {
        return Err(failures);
    }
    let mut out = String::from("add root\n");
    for (i, var) in space.variables.iter().enumerate().skip(1) {
        if !model.included[i] || var.derived {
            continue;
        }
        let path = var.id.strip_prefix("root.").unwrap_or(&var.id);
        match &model.values[i] {
            Some(v) => {
                let _ = writeln!(out, "set {path} = {v}");
            }
            None => {
                let _ = writeln!(out, "add {path}");
            }
        }
    }
    Ok(out)
}
