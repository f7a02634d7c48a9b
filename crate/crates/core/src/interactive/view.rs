use std::collections::HashSet;

use serde::Serialize;

use crate::solver::{Assumption, Model, SolveOptions, Solver};
use crate::space::{ConfigurationSpace, Domain, ExplanationMap, Value, VarIdx, Warning};

use super::mus::{minimal_unsat_subset, MusReport};
use super::session::AssumptionEntry;

/// Everything a client needs to render the current state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionView {
    pub satisfiable: bool,
    pub attributes: Vec<AttributeView>,
    pub parts: Vec<PartView>,
    pub assumptions: Vec<AssumptionView>,
    pub mus: Option<MusReport>,
    /// True when `shown` also reflects a browsed model.
    pub browsing: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttributeView {
    pub id: String,
    pub feature: String,
    pub integer: bool,
    /// Value of an enumeration attribute, implied by the option chosen for
    /// the parent variable.
    pub derived: bool,
    pub shown: bool,
    pub selected: Option<Value>,
    pub inferred: Option<Value>,
    /// In the browsed model, if any.
    pub current: Option<Value>,
    pub valid: Vec<Value>,
    pub invalid: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartView {
    pub id: String,
    pub type_name: String,
    pub parent: Option<String>,
    /// In the browsed model, if any.
    pub included: bool,
    pub forced: bool,
    pub addable: bool,
    pub removable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssumptionView {
    pub id: u64,
    pub action: &'static str,
    pub target: String,
    pub value: Option<Value>,
}

impl AssumptionView {
    fn new(space: &ConfigurationSpace, e: &AssumptionEntry) -> Self {
        let (action, v, value) = match &e.assumption {
            Assumption::Include(v) => ("include", *v, None),
            Assumption::Exclude(v) => ("exclude", *v, None),
            Assumption::Fix(v, d) => ("fix", *v, Some(d.clone())),
            Assumption::ExcludeValue(v, d) => ("excludeValue", *v, Some(d.clone())),
        };
        AssumptionView {
            id: e.id,
            action,
            target: space.variables[v].id.clone(),
            value,
        }
    }
}

/// Answers satisfiability queries under a fixed base, reusing every model
/// found so far as a witness.
struct Queries<'s> {
    solver: Solver<'s>,
    base: Vec<Assumption>,
    witnesses: Vec<Model>,
}

impl<'s> Queries<'s> {
    fn new(space: &'s ConfigurationSpace, base: Vec<Assumption>) -> Self {
        Queries {
            solver: Solver::new(space, &SolveOptions::default()),
            base,
            witnesses: Vec::new(),
        }
    }

    fn sat(&mut self) -> bool {
        if !self.witnesses.is_empty() {
            return true;
        }
        match self.solver.solve(&self.base).model() {
            Some(m) => {
                self.witnesses.push(m);
                true
            }
            None => false,
        }
    }

    fn sat_with(&mut self, extra: Assumption) -> bool {
        if self.witnesses.iter().any(|m| extra.holds(m)) {
            return true;
        }
        let mut all = self.base.clone();
        all.push(extra);
        match self.solver.solve(&all).model() {
            Some(m) => {
                self.witnesses.push(m);
                true
            }
            None => false,
        }
    }
}

pub(super) fn compute_view(
    space: &ConfigurationSpace,
    entries: &[AssumptionEntry],
    explanations: &ExplanationMap,
    browsed: Option<&Model>,
    warnings: &[Warning],
) -> SessionView {
    let pairs: Vec<(u64, Assumption)> = entries.iter().map(|e| (e.id, e.assumption.clone())).collect();
    let mut q = Queries::new(space, pairs.iter().map(|(_, a)| a.clone()).collect());
    let satisfiable = q.sat();

    // On a conflict, report it and show the state without the assumptions
    // involved, peeling further conflicts until something is satisfiable.
    let mut mus = None;
    let mut dropped: HashSet<u64> = HashSet::new();
    if !satisfiable {
        let guarded = space.boolean_constraint_ids();
        loop {
            let rest: Vec<(u64, Assumption)> =
                pairs.iter().filter(|(id, _)| !dropped.contains(id)).cloned().collect();
            let Ok(report) = minimal_unsat_subset(space, &rest, &guarded, explanations) else {
                break;
            };
            let progress = !report.assumption_ids.is_empty();
            dropped.extend(report.assumption_ids.iter().copied());
            mus.get_or_insert(report);
            if !progress {
                break;
            }
        }
        let rest = pairs.iter().filter(|(id, _)| !dropped.contains(id)).map(|(_, a)| a.clone());
        q = Queries::new(space, rest.collect());
    }
    let browsed = browsed.filter(|_| satisfiable);
    let any_model = q.sat();

    let selected = |v: VarIdx| {
        entries.iter().rev().find_map(|e| match &e.assumption {
            Assumption::Fix(w, d) if *w == v => Some(d.clone()),
            _ => None,
        })
    };
    let user_included = |v: VarIdx| {
        entries
            .iter()
            .any(|e| matches!(e.assumption, Assumption::Include(w) if w == v))
    };

    let mut attributes = Vec::new();
    let mut parts = Vec::new();
    for (v, var) in space.variables.iter().enumerate() {
        let in_all = any_model && !q.sat_with(Assumption::Exclude(v));
        let in_browsed = browsed.is_some_and(|m| m.included[v]);
        match space.domain(v) {
            Some(domain) => {
                let shown = in_all || in_browsed;
                let (mut valid, mut invalid) = (Vec::new(), Vec::new());
                if shown {
                    for d in domain.values() {
                        if q.sat_with(Assumption::Fix(v, d.clone())) {
                            valid.push(d);
                        } else {
                            invalid.push(d);
                        }
                    }
                }
                let selected = selected(v);
                let inferred = match (&selected, valid.as_slice()) {
                    (None, [only]) if in_all => Some(only.clone()),
                    _ => None,
                };
                attributes.push(AttributeView {
                    id: var.id.clone(),
                    feature: var.feature.clone(),
                    integer: matches!(domain, Domain::Integer(..)),
                    derived: var.derived,
                    shown,
                    selected,
                    inferred,
                    current: browsed.and_then(|m| m.values[v].clone()),
                    valid,
                    invalid,
                });
            }
            None if v == ConfigurationSpace::ROOT => {}
            None => {
                let addable = any_model && !in_all && q.sat_with(Assumption::Include(v));
                // The user's own include can always be retracted.
                let removable = any_model && (user_included(v) || (!in_all && in_browsed));
                parts.push(PartView {
                    id: var.id.clone(),
                    type_name: var.type_name.clone(),
                    parent: var.parent.map(|p| space.variables[p].id.clone()),
                    included: in_browsed,
                    forced: in_all,
                    addable,
                    removable,
                });
            }
        }
    }

    SessionView {
        satisfiable,
        attributes,
        parts,
        assumptions: entries.iter().map(|e| AssumptionView::new(space, e)).collect(),
        mus,
        browsing: browsed.is_some(),
        warnings: warnings.iter().map(ToString::to_string).collect(),
    }
}
