use std::collections::HashSet;

use serde::Serialize;

use crate::solver::{Assumption, SolveOptions, Solver};
use crate::space::{ConfigurationSpace, ConstraintDef, ExplanationMap};

use super::InteractiveError;

/// A conflict: user assumptions and Boolean constraints that cannot hold
/// together, minimal with respect to removing any one of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MusReport {
    pub assumption_ids: Vec<u64>,
    pub constraint_ids: Vec<String>,
    /// One text per constraint, from the explanation map or else the
    /// behavior as written.
    pub messages: Vec<String>,
}

#[derive(Clone, Copy)]
enum Element<'a> {
    Assumption(usize),
    Constraint(&'a str),
}

/// Deletion-based minimization over `assumptions` (id, assumption) and the
/// `guarded` constraints. Assumptions are tried newest first so that blame
/// leans on recent choices, then constraints in the order given.
pub fn minimal_unsat_subset(
    space: &ConfigurationSpace,
    assumptions: &[(u64, Assumption)],
    guarded: &[String],
    explanations: &ExplanationMap,
) -> Result<MusReport, InteractiveError> {
    let guarded_set: HashSet<&str> = guarded.iter().map(String::as_str).collect();
    let unsat = |kept: &[Element]| -> bool {
        let mut disabled: HashSet<String> = guarded_set.iter().map(|s| s.to_string()).collect();
        let mut active = Vec::new();
        for e in kept {
            match e {
                Element::Assumption(i) => active.push(assumptions[*i].1.clone()),
                Element::Constraint(c) => {
                    disabled.remove(*c);
                }
            }
        }
        !Solver::new(space, &SolveOptions { disabled }).is_sat(&active)
    };

    let mut kept: Vec<Element> = (0..assumptions.len())
        .rev()
        .map(Element::Assumption)
        .chain(guarded.iter().map(|c| Element::Constraint(c)))
        .collect();
    if !unsat(&kept) {
        return Err(InteractiveError::Satisfiable);
    }
    let mut i = 0;
    while i < kept.len() {
        let mut trial = kept.clone();
        trial.remove(i);
        if unsat(&trial) {
            kept = trial;
        } else {
            i += 1;
        }
    }

    let mut report = MusReport {
        assumption_ids: Vec::new(),
        constraint_ids: Vec::new(),
        messages: Vec::new(),
    };
    for e in kept {
        match e {
            Element::Assumption(i) => report.assumption_ids.push(assumptions[i].0),
            Element::Constraint(c) => {
                let text = explanations
                    .get(c)
                    .map(str::to_string)
                    .or_else(|| match space.constraint(c) {
                        Some(ConstraintDef::Boolean { source, .. }) => Some(source.clone()),
                        _ => None,
                    })
                    .unwrap_or_else(|| c.to_string());
                report.constraint_ids.push(c.to_string());
                report.messages.push(text);
            }
        }
    }
    Ok(report)
}
