//! Native finite-domain solver over a [`ConfigurationSpace`], plus the
//! model checker and an exhaustive oracle that shares no code with search.

mod check;
mod domain;
mod engine;
mod oracle;
mod propagate;

use serde::Serialize;

use crate::space::{ConfigurationSpace, Value, VarIdx};

pub use check::{check_model, eval_formula, Failure, Truth};
pub use engine::{Cursor, SolveOptions, Solver};
pub use oracle::{brute_force_enumerate, raw_candidate_count, CapExceeded};

/// One solution: which variables are included and the value of every
/// included attribute variable. Both vectors are indexed by [`VarIdx`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Model {
    pub included: Vec<bool>,
    pub values: Vec<Option<Value>>,
}

impl Model {
    /// Model of `space` with only the root included.
    pub fn root_only(space: &ConfigurationSpace) -> Self {
        let n = space.variables.len();
        let mut included = vec![false; n];
        included[ConfigurationSpace::ROOT] = true;
        Model {
            included,
            values: vec![None; n],
        }
    }

    pub fn value(&self, v: VarIdx) -> Option<&Value> {
        self.values[v].as_ref()
    }

    pub fn included_count(&self) -> usize {
        self.included.iter().filter(|&&b| b).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Assumption {
    Include(VarIdx),
    Exclude(VarIdx),
    Fix(VarIdx, Value),
    ExcludeValue(VarIdx, Value),
}

impl Assumption {
    pub fn target(&self) -> VarIdx {
        match self {
            Assumption::Include(v)
            | Assumption::Exclude(v)
            | Assumption::Fix(v, _)
            | Assumption::ExcludeValue(v, _) => *v,
        }
    }

    /// True when `model` honors this assumption.
    pub fn holds(&self, model: &Model) -> bool {
        match self {
            Assumption::Include(v) => model.included[*v],
            Assumption::Exclude(v) => !model.included[*v],
            Assumption::Fix(v, d) => model.included[*v] && model.values[*v].as_ref() == Some(d),
            Assumption::ExcludeValue(v, d) => model.values[*v].as_ref() != Some(d),
        }
    }

    pub fn describe(&self, space: &ConfigurationSpace) -> String {
        let id = |v: &VarIdx| space.variables[*v].id.clone();
        match self {
            Assumption::Include(v) => format!("include {}", id(v)),
            Assumption::Exclude(v) => format!("exclude {}", id(v)),
            Assumption::Fix(v, d) => format!("{} = {d}", id(v)),
            Assumption::ExcludeValue(v, d) => format!("{} != {d}", id(v)),
        }
    }
}

/// Converts user-input directives into solver assumptions.
pub fn user_assumptions(input: &crate::space::UserAssumptions) -> Vec<Assumption> {
    input
        .includes
        .iter()
        .map(|&v| Assumption::Include(v))
        .chain(input.values.iter().map(|(v, d)| Assumption::Fix(*v, d.clone())))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SolveResult {
    Sat(Model),
    Unsat,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn model(self) -> Option<Model> {
        match self {
            SolveResult::Sat(m) => Some(m),
            SolveResult::Unsat => None,
        }
    }
}

/// One-shot solve with every constraint active.
pub fn solve(space: &ConfigurationSpace, assumptions: &[Assumption]) -> SolveResult {
    Solver::new(space, &SolveOptions::default()).solve(assumptions)
}

/// All models (or the first `limit` when `limit > 0`) in search order.
pub fn enumerate(space: &ConfigurationSpace, assumptions: &[Assumption], limit: usize) -> Vec<Model> {
    Solver::new(space, &SolveOptions::default())
        .enumerate(assumptions, None, limit)
        .0
}
