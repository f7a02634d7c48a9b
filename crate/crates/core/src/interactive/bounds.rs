use crate::parser::{CoomAst, UserInputAst};
use crate::solver::{self, Model};
use crate::space::{apply_user_input, instantiate, ConfigurationSpace, SpaceError, Warning};

/// Loop parameters for models with `*` cardinalities: try bound `start`,
/// then `start + step`, and so on up to `cap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IncrementalBounds {
    pub start: u32,
    pub step: u32,
    pub cap: u32,
}

impl Default for IncrementalBounds {
    fn default() -> Self {
        IncrementalBounds {
            start: 1,
            step: 1,
            cap: 64,
        }
    }
}

#[derive(Debug)]
pub struct BoundedSolution {
    pub model: Model,
    pub bound: u32,
    pub space: ConfigurationSpace,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, thiserror::Error)]
pub enum BoundsError {
    #[error("bound start and step must both be at least 1")]
    BadParameters,
    #[error("no model found up to the bound cap of {cap}")]
    BoundCapExceeded { cap: u32 },
    #[error("unsatisfiable, and the model has no open cardinality to raise")]
    UnsatBounded,
    #[error(transparent)]
    Space(#[from] SpaceError),
}

impl IncrementalBounds {
    /// Solves with increasing bounds. `on_attempt(bound, sat)` is called
    /// after each bound is tried.
    pub fn solve(
        &self,
        ast: &CoomAst,
        input: Option<&UserInputAst>,
        mut on_attempt: impl FnMut(u32, bool),
    ) -> Result<BoundedSolution, BoundsError> {
        if self.start == 0 || self.step == 0 {
            return Err(BoundsError::BadParameters);
        }
        let open = ast.has_unbounded();
        let mut bound = self.start;
        while bound <= self.cap {
            let space = instantiate(ast, bound)?;
            let user = input.map(|i| apply_user_input(&space, i)).unwrap_or_default();
            let result = solver::solve(&space, &solver::user_assumptions(&user));
            on_attempt(bound, result.is_sat());
            if let Some(model) = result.model() {
                return Ok(BoundedSolution {
                    model,
                    bound,
                    space,
                    warnings: user.warnings,
                });
            }
            if !open {
                return Err(BoundsError::UnsatBounded);
            }
            bound = match bound.checked_add(self.step) {
                Some(b) => b,
                None => break,
            };
        }
        Err(BoundsError::BoundCapExceeded { cap: self.cap })
    }
}

/// [`IncrementalBounds::solve`] without progress reporting.
pub fn incremental_solve(
    ast: &CoomAst,
    input: Option<&UserInputAst>,
    params: IncrementalBounds,
) -> Result<BoundedSolution, BoundsError> {
    params.solve(ast, input, |_, _| {})
}
