//! Depth-first search over attribute values and inclusion flags, with full
//! propagation after every decision.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::domain::{DomKind, State, Tri};
use super::propagate::{Compiled, Propagator};
use super::{Assumption, Model, SolveResult};
use crate::space::{ConfigurationSpace, VarIdx};

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// Boolean or table constraint ids to leave out.
    pub disabled: HashSet<String>,
}

/// Position of an enumeration: the next untried choice at every depth of
/// the search path that produced the last returned model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cursor(pub Vec<usize>);

/// A compiled space, reusable for many queries.
pub struct Solver<'s> {
    space: &'s ConfigurationSpace,
    c: Compiled,
    /// Some constraints are left out, so models need not pass `check_model`.
    partial: bool,
}

enum Choices {
    Incl,
    Vals(Vec<i64>),
    Range(i64, i64),
}

impl Choices {
    fn len(&self) -> usize {
        match self {
            Choices::Incl => 2,
            Choices::Vals(v) => v.len(),
            Choices::Range(lo, hi) => (hi - lo + 1) as usize,
        }
    }
}

struct Frame {
    state: State,
    var: VarIdx,
    choices: Choices,
    next: usize,
    /// The value of `var` cannot affect any constraint, so once one choice
    /// has failed to produce a model every other choice will fail too.
    settled: bool,
    /// Models found before the latest choice was entered.
    mark: usize,
}

impl<'s> Solver<'s> {
    pub fn new(space: &'s ConfigurationSpace, opts: &SolveOptions) -> Self {
        Solver {
            space,
            c: Compiled::new(space, &opts.disabled),
            partial: !opts.disabled.is_empty(),
        }
    }

    pub fn space(&self) -> &'s ConfigurationSpace {
        self.space
    }

    pub fn solve(&self, assumptions: &[Assumption]) -> SolveResult {
        match self.enumerate(assumptions, None, 1).0.into_iter().next() {
            Some(m) => SolveResult::Sat(m),
            None => SolveResult::Unsat,
        }
    }

    pub fn is_sat(&self, assumptions: &[Assumption]) -> bool {
        self.solve(assumptions).is_sat()
    }

    /// Up to `limit` models (all when `limit == 0`) starting after `cursor`.
    /// The returned cursor resumes after the last model; `None` means the
    /// enumeration is exhausted.
    pub fn enumerate(
        &self,
        assumptions: &[Assumption],
        cursor: Option<&Cursor>,
        limit: usize,
    ) -> (Vec<Model>, Option<Cursor>) {
        let mut out = Vec::new();
        let Some(init) = self.initial(assumptions) else {
            return (out, None);
        };
        let mut stack: Vec<Frame> = Vec::new();
        match cursor {
            None => match self.decision(&init) {
                None => {
                    out.push(self.extract(&init));
                    let more = (limit == 1).then(|| Cursor(Vec::new()));
                    return (out, more);
                }
                Some(var) => stack.push(self.frame(init, var, 0)),
            },
            Some(Cursor(nexts)) => {
                let mut st = init;
                for (depth, &next) in nexts.iter().enumerate() {
                    let Some(var) = self.decision(&st) else {
                        return (out, None);
                    };
                    let choices = self.choices(&st, var);
                    let child = if depth + 1 < nexts.len() {
                        if next == 0 {
                            return (out, None);
                        }
                        match self.apply(&st, var, &choices, next - 1) {
                            Some(child) => Some(child),
                            None => return (out, None),
                        }
                    } else {
                        None
                    };
                    stack.push(Frame {
                        state: st,
                        var,
                        choices,
                        next,
                        settled: false,
                        mark: 0,
                    });
                    match child {
                        Some(c) => st = c,
                        None => break,
                    }
                }
            }
        }
        while let Some(top) = stack.last_mut() {
            let fruitless = top.next > 0 && top.settled && out.len() == top.mark;
            if top.next >= top.choices.len() || fruitless {
                stack.pop();
                continue;
            }
            let k = top.next;
            top.next += 1;
            if let Choices::Range(lo, _) = top.choices {
                if !top.state.contains(top.var, &self.c.kinds[top.var], lo + k as i64) {
                    continue;
                }
            }
            top.mark = out.len();
            let Some(st) = self.apply(&top.state, top.var, &top.choices, k) else {
                continue;
            };
            match self.decision(&st) {
                None => {
                    out.push(self.extract(&st));
                    if limit > 0 && out.len() >= limit {
                        return (out, Some(Cursor(stack.iter().map(|f| f.next).collect())));
                    }
                }
                Some(var) => {
                    let mark = out.len();
                    stack.push(self.frame(st, var, mark));
                }
            }
        }
        (out, None)
    }

    fn initial(&self, assumptions: &[Assumption]) -> Option<State> {
        let c = &self.c;
        let mut st = State::new(&c.kinds);
        let mut p = Propagator::new(c);
        p.set_incl(&mut st, ConfigurationSpace::ROOT, true).ok()?;
        for a in assumptions {
            match a {
                Assumption::Include(v) => p.set_incl(&mut st, *v, true).ok()?,
                Assumption::Exclude(v) => p.set_incl(&mut st, *v, false).ok()?,
                Assumption::Fix(v, d) => {
                    let x = c.code_for(*v, d)?;
                    if !st.contains(*v, &c.kinds[*v], x) {
                        return None;
                    }
                    p.fix(&mut st, *v, x).ok()?;
                    p.set_incl(&mut st, *v, true).ok()?;
                }
                Assumption::ExcludeValue(v, d) => {
                    if let Some(x) = c.code_for(*v, d) {
                        p.remove(&mut st, *v, x).ok()?;
                    }
                }
            }
        }
        p.enqueue_all();
        p.run(&mut st).ok()?;
        Some(st)
    }

    /// Next variable to branch on, or `None` when the state is a model.
    /// Values of included attributes come first since they usually fail
    /// fastest; inclusion flags follow in tree order.
    fn decision(&self, st: &State) -> Option<VarIdx> {
        let open_value = (0..st.incl.len()).find(|&v| {
            st.incl[v] == Tri::True
                && !matches!(self.c.kinds[v], DomKind::Part)
                && st.singleton(v, &self.c.kinds[v]).is_none()
        });
        open_value.or_else(|| st.incl.iter().position(|&t| t == Tri::Unknown))
    }

    fn frame(&self, state: State, var: VarIdx, mark: usize) -> Frame {
        let choices = self.choices(&state, var);
        let settled = !matches!(choices, Choices::Incl) && Propagator::new(&self.c).settled(&state, var);
        Frame {
            state,
            var,
            choices,
            next: 0,
            settled,
            mark,
        }
    }

    fn choices(&self, st: &State, v: VarIdx) -> Choices {
        if st.incl[v] == Tri::Unknown {
            return Choices::Incl;
        }
        match &self.c.kinds[v] {
            DomKind::Range { .. } => Choices::Range(st.lo[v], st.hi[v]),
            k => Choices::Vals(st.values(v, k)),
        }
    }

    fn apply(&self, st: &State, v: VarIdx, choices: &Choices, k: usize) -> Option<State> {
        let kind = &self.c.kinds[v];
        let mut st = st.clone();
        let mut p = Propagator::new(&self.c);
        match choices {
            Choices::Incl => p.set_incl(&mut st, v, k == 1).ok()?,
            Choices::Vals(vals) => p.fix(&mut st, v, vals[k]).ok()?,
            Choices::Range(lo, _) => {
                let x = lo + k as i64;
                if !st.contains(v, kind, x) {
                    return None;
                }
                p.fix(&mut st, v, x).ok()?;
            }
        }
        p.run(&mut st).ok()?;
        Some(st)
    }

    fn extract(&self, st: &State) -> Model {
        let n = st.incl.len();
        let mut m = Model {
            included: vec![false; n],
            values: vec![None; n],
        };
        for v in 0..n {
            if st.incl[v] == Tri::True {
                m.included[v] = true;
                if let Some(x) = st.singleton(v, &self.c.kinds[v]) {
                    m.values[v] = Some(self.c.decode(v, x));
                }
            }
        }
        debug_assert!(
            self.partial || super::check_model(self.space, &m).is_empty(),
            "{:?}",
            super::check_model(self.space, &m)
        );
        m
    }
}
