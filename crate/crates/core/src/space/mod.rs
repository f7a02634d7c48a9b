//! The instantiated configuration tree: variables, sets, constraints and
//! aggregate functions, plus the text formats built on top of it.

mod explain;
mod facts;
mod input;
mod instantiate;
mod solution;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::parser::{SemanticError, Pos};

pub use explain::{load_explanations, ExplanationError, ExplanationMap};
pub use facts::{serialize_facts, serialize_facts_with, space_to_json, GROUPS as JSON_GROUPS};
pub use input::{apply_user_input, UserAssumptions, Warning, WarningKind};
pub use instantiate::instantiate;
pub use solution::solution_to_coom;

/// Index of a variable inside its space.
pub type VarIdx = usize;

/// Value of an attribute variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Sym(String),
}

impl Value {
    pub fn sym(s: &str) -> Self {
        Value::Sym(s.to_string())
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(v) => Some(*v),
            Value::Sym(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Sym(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Domain {
    /// Finite list of values in declaration order.
    Discrete(Vec<Value>),
    /// Inclusive integer range.
    Integer(i64, i64),
}

impl Domain {
    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (Domain::Discrete(vals), _) => vals.contains(v),
            (Domain::Integer(lo, hi), Value::Int(x)) => lo <= x && x <= hi,
            _ => false,
        }
    }

    pub fn size(&self) -> u64 {
        match self {
            Domain::Discrete(v) => v.len() as u64,
            Domain::Integer(lo, hi) => (hi - lo + 1) as u64,
        }
    }

    /// All values in order. Only sensible for small integer ranges.
    pub fn values(&self) -> Vec<Value> {
        match self {
            Domain::Discrete(v) => v.clone(),
            Domain::Integer(lo, hi) => (*lo..=*hi).map(Value::Int).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttributeDef {
    pub name: String,
    pub domain: Domain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VarKind {
    Part,
    DiscreteAttr,
    IntegerAttr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Variable {
    pub id: String,
    pub type_name: String,
    pub index: u32,
    pub parent: Option<VarIdx>,
    pub kind: VarKind,
    /// Feature (or enumeration attribute) name this variable instantiates.
    pub feature: String,
    /// Attribute definition for attribute variables.
    pub attr: Option<usize>,
    /// Set this variable belongs to (`None` only for the root).
    pub set: Option<usize>,
    /// True for the per-option attribute values derived from an enumeration.
    pub derived: bool,
}

impl Variable {
    pub fn is_attribute(&self) -> bool {
        self.kind != VarKind::Part
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariableSet {
    pub id: String,
    pub members: Vec<VarIdx>,
    /// Lower bound for cardinality sets; `None` for sets that only exist as
    /// aggregate operands.
    pub lower_bound: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds<T: Ord>(self, a: T, b: T) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }

    pub fn negate(self) -> Self {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }
}

/// Index of a node in [`ConfigurationSpace::formulas`].
pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FormulaNode {
    Or(NodeId, NodeId),
    And(NodeId, NodeId),
    Not(NodeId),
    Cmp(CmpOp, NodeId, NodeId),
    Arith(ArithOp, NodeId, NodeId),
    Var(VarIdx),
    Const(Value),
    /// Aggregate; indexes [`ConfigurationSpace::functions`].
    Fn(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FunctionKind {
    Count,
    Sum,
}

impl FunctionKind {
    pub fn name(self) -> &'static str {
        match self {
            FunctionKind::Count => "count",
            FunctionKind::Sum => "sum",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctionDef {
    /// Formula node that refers to this function; doubles as its id.
    pub node: NodeId,
    pub kind: FunctionKind,
    pub set: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ConstraintDef {
    Boolean {
        id: String,
        root: NodeId,
        /// The behavior as written, used when no explanation text exists.
        source: String,
    },
    Table {
        id: String,
        columns: Vec<VarIdx>,
        /// `rows[r][c]` is the set of values allowed in column `c`.
        rows: Vec<Vec<Vec<Value>>>,
        /// Generated option/attribute compatibility table.
        internal: bool,
    },
    LowerBound {
        set: usize,
        lo: u32,
    },
}

impl ConstraintDef {
    /// Constraint id; lower bounds are named after their set.
    pub fn id<'a>(&'a self, space: &'a ConfigurationSpace) -> &'a str {
        match self {
            ConstraintDef::Boolean { id, .. } | ConstraintDef::Table { id, .. } => id,
            ConstraintDef::LowerBound { set, .. } => &space.sets[*set].id,
        }
    }
}

/// Constraint id prefix used for a behavior item: `c3` for product scope,
/// `c3@root.carrier[0]` when instantiated under a structure instance.
pub fn base_constraint_id(id: &str) -> &str {
    id.split('@').next().unwrap_or(id)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigurationSpace {
    pub variables: Vec<Variable>,
    pub attributes: Vec<AttributeDef>,
    /// Part type names (`product` first).
    pub parts: Vec<String>,
    pub sets: Vec<VariableSet>,
    pub constraints: Vec<ConstraintDef>,
    pub formulas: Vec<FormulaNode>,
    pub functions: Vec<FunctionDef>,
    pub max_bound: u32,
    #[serde(skip)]
    by_id: HashMap<String, VarIdx>,
    #[serde(skip)]
    children: Vec<Vec<VarIdx>>,
}

impl ConfigurationSpace {
    pub const ROOT: VarIdx = 0;

    pub fn var(&self, id: &str) -> Option<VarIdx> {
        self.by_id.get(id).copied()
    }

    pub fn domain(&self, v: VarIdx) -> Option<&Domain> {
        self.variables[v].attr.map(|a| &self.attributes[a].domain)
    }

    /// Children of `v` in tree order.
    pub fn children(&self, v: VarIdx) -> &[VarIdx] {
        &self.children[v]
    }

    pub fn constraint(&self, id: &str) -> Option<&ConstraintDef> {
        self.constraints.iter().find(|c| c.id(self) == id)
    }

    /// Ids of all Boolean constraints, in declaration order.
    pub fn boolean_constraint_ids(&self) -> Vec<String> {
        self.constraints
            .iter()
            .filter_map(|c| match c {
                ConstraintDef::Boolean { id, .. } => Some(id.clone()),
                _ => None,
            })
            .collect()
    }

    /// VarTerm leaves of a formula, excluding variables under aggregates.
    pub fn formula_vars(&self, root: NodeId) -> Vec<VarIdx> {
        let mut out = Vec::new();
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            match &self.formulas[n] {
                FormulaNode::Or(a, b)
                | FormulaNode::And(a, b)
                | FormulaNode::Cmp(_, a, b)
                | FormulaNode::Arith(_, a, b) => {
                    stack.push(*b);
                    stack.push(*a);
                }
                FormulaNode::Not(a) => stack.push(*a),
                FormulaNode::Var(v) => out.push(*v),
                FormulaNode::Const(_) | FormulaNode::Fn(_) => {}
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Renders a formula node as COOM-like text.
    pub fn formula_text(&self, n: NodeId) -> String {
        match &self.formulas[n] {
            FormulaNode::Or(a, b) => format!("({} || {})", self.formula_text(*a), self.formula_text(*b)),
            FormulaNode::And(a, b) => format!("({} && {})", self.formula_text(*a), self.formula_text(*b)),
            FormulaNode::Not(a) => format!("!{}", self.formula_text(*a)),
            FormulaNode::Cmp(op, a, b) => format!(
                "{} {} {}",
                self.formula_text(*a),
                op.symbol(),
                self.formula_text(*b)
            ),
            FormulaNode::Arith(op, a, b) => format!(
                "({} {} {})",
                self.formula_text(*a),
                op.symbol(),
                self.formula_text(*b)
            ),
            FormulaNode::Var(v) => self.variables[*v].id.clone(),
            FormulaNode::Const(c) => c.to_string(),
            FormulaNode::Fn(f) => {
                let f = &self.functions[*f];
                format!("{}({})", f.kind.name(), self.sets[f.set].id)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpaceError {
    #[error("model is invalid: {} error(s)", .0.len())]
    Invalid(Vec<SemanticError>),
    #[error("maximum bound must be at least 1")]
    ZeroBound,
    #[error("{pos}: feature `{feature}` needs at least {lo} instance(s) but the maximum bound is {max_bound}")]
    BoundBelowLower {
        feature: String,
        lo: u32,
        max_bound: u32,
        pos: Pos,
    },
    #[error("{pos}: path `{path}` resolves to no variables")]
    EmptyPath { path: String, pos: Pos },
    #[error("configuration tree exceeds {limit} variables")]
    TooLarge { limit: usize },
}
