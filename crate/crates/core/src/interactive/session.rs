use std::sync::Arc;

use serde::Serialize;

use crate::parser::UserInputAst;
use crate::solver::{Assumption, Cursor, Model, SolveOptions, Solver};
use crate::space::{apply_user_input, solution_to_coom, ConfigurationSpace, Domain, ExplanationMap, Value, VarIdx, Warning};

use super::view::{compute_view, SessionView};
use super::InteractiveError;

/// One user choice, with an id that stays fixed while others come and go.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssumptionEntry {
    pub id: u64,
    pub assumption: Assumption,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Next,
    Reset,
}

#[derive(Debug, Clone)]
enum Browse {
    Idle,
    At { model: Model, cursor: Option<Cursor> },
    Exhausted { last: Model },
}

/// Interactive configuration of one space. Every change to the assumption
/// list drops the cached view and restarts browsing.
#[derive(Debug, Clone)]
pub struct SessionState {
    space: Arc<ConfigurationSpace>,
    explanations: ExplanationMap,
    assumptions: Vec<AssumptionEntry>,
    next_id: u64,
    warnings: Vec<Warning>,
    browse: Browse,
    cached_view: Option<SessionView>,
}

impl SessionState {
    pub fn new(space: Arc<ConfigurationSpace>, explanations: ExplanationMap) -> Self {
        SessionState {
            space,
            explanations,
            assumptions: Vec::new(),
            next_id: 1,
            warnings: Vec::new(),
            browse: Browse::Idle,
            cached_view: None,
        }
    }

    /// Starts from a user-input file; its directives become ordinary
    /// assumptions and its warnings are kept for display.
    pub fn with_user_input(
        space: Arc<ConfigurationSpace>,
        explanations: ExplanationMap,
        input: &UserInputAst,
    ) -> Self {
        let user = apply_user_input(&space, input);
        let mut s = SessionState::new(space, explanations);
        for a in crate::solver::user_assumptions(&user) {
            s.push(a);
        }
        s.warnings = user.warnings;
        s
    }

    pub fn space(&self) -> &ConfigurationSpace {
        &self.space
    }

    pub fn explanations(&self) -> &ExplanationMap {
        &self.explanations
    }

    pub fn assumptions(&self) -> &[AssumptionEntry] {
        &self.assumptions
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    fn active(&self) -> Vec<Assumption> {
        self.assumptions.iter().map(|e| e.assumption.clone()).collect()
    }

    fn changed(&mut self) {
        self.cached_view = None;
        self.browse = Browse::Idle;
    }

    fn push(&mut self, a: Assumption) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        self.assumptions.push(AssumptionEntry { id, assumption: a });
        self.changed();
        id
    }

    fn lookup(&self, target: &str) -> Result<VarIdx, InteractiveError> {
        self.space
            .var(target)
            .ok_or_else(|| InteractiveError::UnknownTarget(target.to_string()))
    }

    /// Selects `value` for an attribute, replacing an earlier selection for
    /// the same attribute.
    pub fn fix(&mut self, target: &str, value: Value) -> Result<u64, InteractiveError> {
        let v = self.lookup(target)?;
        let domain = self
            .space
            .domain(v)
            .ok_or_else(|| InteractiveError::NotAnAttribute(target.to_string()))?;
        // Clients may send numbers as strings.
        let value = match (&value, domain) {
            (Value::Sym(s), Domain::Integer(..)) => s.parse().map(Value::Int).unwrap_or(value),
            _ => value,
        };
        if !domain.contains(&value) {
            return Err(InteractiveError::ValueOutOfDomain {
                target: target.to_string(),
                value,
            });
        }
        self.assumptions
            .retain(|e| !matches!(&e.assumption, Assumption::Fix(w, _) if *w == v));
        Ok(self.push(Assumption::Fix(v, value)))
    }

    /// Drops every selection on `target`; returns how many were removed.
    pub fn unfix(&mut self, target: &str) -> Result<usize, InteractiveError> {
        let v = self.lookup(target)?;
        let before = self.assumptions.len();
        self.assumptions.retain(|e| {
            !matches!(&e.assumption, Assumption::Fix(w, _) | Assumption::ExcludeValue(w, _) if *w == v)
        });
        let removed = before - self.assumptions.len();
        if removed > 0 {
            self.changed();
        }
        Ok(removed)
    }

    /// Demands (`true`) or forbids (`false`) a part, replacing any earlier
    /// demand on it.
    pub fn set_included(&mut self, target: &str, include: bool) -> Result<u64, InteractiveError> {
        let v = self.lookup(target)?;
        if v == ConfigurationSpace::ROOT || self.space.domain(v).is_some() {
            return Err(InteractiveError::NotAPart(target.to_string()));
        }
        self.assumptions.retain(|e| {
            !matches!(&e.assumption, Assumption::Include(w) | Assumption::Exclude(w) if *w == v)
        });
        let a = if include {
            Assumption::Include(v)
        } else {
            Assumption::Exclude(v)
        };
        Ok(self.push(a))
    }

    pub fn retract(&mut self, id: u64) -> Result<(), InteractiveError> {
        let pos = self
            .assumptions
            .iter()
            .position(|e| e.id == id)
            .ok_or(InteractiveError::UnknownAssumption(id))?;
        self.assumptions.remove(pos);
        self.changed();
        Ok(())
    }

    /// The view for the current assumptions, computed once per change.
    pub fn view(&mut self) -> &SessionView {
        if self.cached_view.is_none() {
            let browsed = match &self.browse {
                Browse::At { model, .. } => Some(model),
                Browse::Exhausted { last } => Some(last),
                Browse::Idle => None,
            };
            let view = compute_view(
                &self.space,
                &self.assumptions,
                &self.explanations,
                browsed,
                &self.warnings,
            );
            self.cached_view = Some(view);
        }
        self.cached_view.as_ref().expect("view was just computed")
    }

    /// Steps through the models in enumeration order. `Reset` returns the
    /// first one again.
    pub fn browse(&mut self, direction: Direction) -> Result<Model, InteractiveError> {
        let solver = Solver::new(&self.space, &SolveOptions::default());
        let assumptions = self.active();
        let from = match (direction, &self.browse) {
            (Direction::Reset, _) | (Direction::Next, Browse::Idle) => None,
            (Direction::Next, Browse::At { cursor: Some(c), .. }) => Some(c.clone()),
            (Direction::Next, Browse::At { cursor: None, model }) => {
                self.browse = Browse::Exhausted { last: model.clone() };
                self.cached_view = None;
                return Err(InteractiveError::Exhausted);
            }
            (Direction::Next, Browse::Exhausted { .. }) => return Err(InteractiveError::Exhausted),
        };
        let (models, cursor) = solver.enumerate(&assumptions, from.as_ref(), 1);
        let Some(model) = models.into_iter().next() else {
            if let (Some(_), Browse::At { model, .. }) = (&from, &self.browse) {
                self.browse = Browse::Exhausted { last: model.clone() };
                self.cached_view = None;
                return Err(InteractiveError::Exhausted);
            }
            return Err(InteractiveError::Unsatisfiable);
        };
        self.browse = Browse::At {
            model: model.clone(),
            cursor,
        };
        self.cached_view = None;
        Ok(model)
    }

    /// The browsed model, or the first model when nothing was browsed yet.
    pub fn current_model(&self) -> Result<Model, InteractiveError> {
        match &self.browse {
            Browse::At { model, .. } => Ok(model.clone()),
            Browse::Exhausted { last } => Ok(last.clone()),
            Browse::Idle => crate::solver::solve(&self.space, &self.active())
                .model()
                .ok_or(InteractiveError::Unsatisfiable),
        }
    }

    /// The current model as a user-input file.
    pub fn solution_text(&self) -> Result<String, InteractiveError> {
        let model = self.current_model()?;
        solution_to_coom(&self.space, &model).map_err(|f| InteractiveError::Internal(format!("{f:?}")))
    }
}
