use serde::Serialize;

use super::Model;
use crate::space::*;

/// Three-valued truth of a formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Truth {
    True,
    False,
    Undefined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    /// Constraint id, set id, variable id or `model` for shape errors.
    pub constraint: String,
    pub message: String,
}

/// Evaluates `f`. A formula is undefined when any variable it mentions
/// outside an aggregate is excluded; aggregates are always defined.
pub fn eval_formula(space: &ConfigurationSpace, model: &Model, f: NodeId) -> Truth {
    if space.formula_vars(f).iter().any(|&v| !model.included[v]) {
        return Truth::Undefined;
    }
    match truth(space, model, f) {
        Some(true) => Truth::True,
        Some(false) => Truth::False,
        None => Truth::Undefined,
    }
}

fn truth(space: &ConfigurationSpace, m: &Model, n: NodeId) -> Option<bool> {
    Some(match &space.formulas[n] {
        FormulaNode::Or(a, b) => truth(space, m, *a)? || truth(space, m, *b)?,
        FormulaNode::And(a, b) => truth(space, m, *a)? && truth(space, m, *b)?,
        FormulaNode::Not(a) => !truth(space, m, *a)?,
        FormulaNode::Cmp(op, a, b) => {
            let (a, b) = (term(space, m, *a)?, term(space, m, *b)?);
            match (&a, &b) {
                (Value::Int(x), Value::Int(y)) => op.holds(x, y),
                (Value::Sym(x), Value::Sym(y)) => match op {
                    CmpOp::Eq => x == y,
                    CmpOp::Ne => x != y,
                    _ => return None,
                },
                _ => return None,
            }
        }
        _ => return None,
    })
}

fn term(space: &ConfigurationSpace, m: &Model, n: NodeId) -> Option<Value> {
    match &space.formulas[n] {
        FormulaNode::Var(v) => m.values[*v].clone(),
        FormulaNode::Const(c) => Some(c.clone()),
        FormulaNode::Arith(op, a, b) => {
            let a = term(space, m, *a)?.as_int()?;
            let b = term(space, m, *b)?.as_int()?;
            Some(Value::Int(match op {
                ArithOp::Add => a + b,
                ArithOp::Sub => a - b,
                ArithOp::Mul => a * b,
            }))
        }
        FormulaNode::Fn(f) => {
            let f = &space.functions[*f];
            let members = space.sets[f.set].members.iter().filter(|&&v| m.included[v]);
            Some(Value::Int(match f.kind {
                FunctionKind::Count => members.count() as i64,
                FunctionKind::Sum => {
                    let mut total = 0;
                    for &v in members {
                        total += m.values[v].as_ref()?.as_int()?;
                    }
                    total
                }
            }))
        }
        _ => None,
    }
}

/// Lists every way `model` violates the space; empty means valid.
pub fn check_model(space: &ConfigurationSpace, model: &Model) -> Vec<Failure> {
    let mut out = Vec::new();
    let mut fail = |constraint: &str, message: String| {
        out.push(Failure {
            constraint: constraint.to_string(),
            message,
        })
    };
    let n = space.variables.len();
    if model.included.len() != n || model.values.len() != n {
        fail("model", format!("model has the wrong size for a space of {n} variables"));
        return out;
    }
    if !model.included[ConfigurationSpace::ROOT] {
        fail("root", "the root variable is excluded".to_string());
    }
    for (i, var) in space.variables.iter().enumerate() {
        if let Some(p) = var.parent {
            if model.included[i] && !model.included[p] {
                fail(&var.id, format!("included but its parent {} is not", space.variables[p].id));
            }
        }
        match (model.included[i], &model.values[i], space.domain(i)) {
            (true, None, Some(_)) => fail(&var.id, "included attribute has no value".to_string()),
            (true, Some(v), Some(d)) if !d.contains(v) => {
                fail(&var.id, format!("value {v} is outside the domain"))
            }
            (false, Some(_), _) => fail(&var.id, "excluded variable carries a value".to_string()),
            (_, Some(_), None) => fail(&var.id, "part carries a value".to_string()),
            _ => {}
        }
    }
    for c in &space.constraints {
        match c {
            ConstraintDef::LowerBound { set, lo } => {
                let s = &space.sets[*set];
                let included: Vec<bool> = s.members.iter().map(|&v| model.included[v]).collect();
                if included.windows(2).any(|w| !w[0] && w[1]) {
                    fail(&s.id, "included members do not form a prefix".to_string());
                }
                let parent_in = s
                    .members
                    .first()
                    .and_then(|&v| space.variables[v].parent)
                    .is_none_or(|p| model.included[p]);
                let count = included.iter().filter(|&&b| b).count();
                if parent_in && (count as u32) < *lo {
                    fail(&s.id, format!("{count} member(s) included, at least {lo} required"));
                }
            }
            ConstraintDef::Boolean { id, root, .. } => {
                if eval_formula(space, model, *root) == Truth::False {
                    fail(id, format!("violated: {}", space.formula_text(*root)));
                }
            }
            ConstraintDef::Table { id, columns, rows, .. } => {
                if columns.iter().any(|&v| !model.included[v]) {
                    continue;
                }
                let ok = rows.iter().any(|row| {
                    row.iter()
                        .zip(columns)
                        .all(|(entry, &v)| model.values[v].as_ref().is_some_and(|x| entry.contains(x)))
                });
                if !ok {
                    fail(id, "no allowed row matches".to_string());
                }
            }
        }
    }
    out
}
