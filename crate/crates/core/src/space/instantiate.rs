use std::collections::HashMap;

use crate::parser::*;

use super::*;

const MAX_VARIABLES: usize = 1_000_000;

/// Builds the configuration tree for `ast`, compiling open upper bounds to
/// `max_bound` instances.
pub fn instantiate(ast: &CoomAst, max_bound: u32) -> Result<ConfigurationSpace, SpaceError> {
    let errors = validate_ast(ast);
    if !errors.is_empty() {
        return Err(SpaceError::Invalid(errors));
    }
    if max_bound == 0 {
        return Err(SpaceError::ZeroBound);
    }
    let mut b = Builder {
        ast,
        max_bound,
        space: ConfigurationSpace {
            variables: Vec::new(),
            attributes: Vec::new(),
            parts: vec!["product".to_string()],
            sets: Vec::new(),
            constraints: Vec::new(),
            formulas: Vec::new(),
            functions: Vec::new(),
            max_bound,
            by_id: HashMap::new(),
            children: Vec::new(),
        },
        attr_ids: HashMap::new(),
        child_sets: HashMap::new(),
        set_ids: HashMap::new(),
        set_by_members: HashMap::new(),
    };
    b.push_var(Variable {
        id: "root".to_string(),
        type_name: "product".to_string(),
        index: 0,
        parent: None,
        kind: VarKind::Part,
        feature: String::new(),
        attr: None,
        set: None,
        derived: false,
    })?;
    b.expand(ConfigurationSpace::ROOT, None)?;
    for (k, behavior) in ast.behaviors.iter().enumerate() {
        b.behavior(k, behavior)?;
    }
    Ok(b.space)
}

struct Builder<'a> {
    ast: &'a CoomAst,
    max_bound: u32,
    space: ConfigurationSpace,
    attr_ids: HashMap<String, usize>,
    /// (parent, feature name) -> cardinality set.
    child_sets: HashMap<(VarIdx, String), usize>,
    set_ids: HashMap<String, usize>,
    set_by_members: HashMap<Vec<VarIdx>, usize>,
}

impl Builder<'_> {
    fn push_var(&mut self, var: Variable) -> Result<VarIdx, SpaceError> {
        if self.space.variables.len() >= MAX_VARIABLES {
            return Err(SpaceError::TooLarge {
                limit: MAX_VARIABLES,
            });
        }
        let idx = self.space.variables.len();
        self.space.by_id.insert(var.id.clone(), idx);
        if let Some(p) = var.parent {
            self.space.children[p].push(idx);
        }
        if let Some(s) = var.set {
            self.space.sets[s].members.push(idx);
        }
        self.space.variables.push(var);
        self.space.children.push(Vec::new());
        Ok(idx)
    }

    fn attribute(&mut self, name: String, domain: Domain) -> usize {
        if let Some(&a) = self.attr_ids.get(&name) {
            return a;
        }
        let a = self.space.attributes.len();
        self.attr_ids.insert(name.clone(), a);
        self.space.attributes.push(AttributeDef { name, domain });
        a
    }

    fn part_type(&mut self, name: &str) {
        if !self.space.parts.iter().any(|p| p == name) {
            self.space.parts.push(name.to_string());
        }
    }

    fn new_set(&mut self, id: String, lower_bound: Option<u32>) -> usize {
        let s = self.space.sets.len();
        self.set_ids.insert(id.clone(), s);
        self.space.sets.push(VariableSet {
            id,
            members: Vec::new(),
            lower_bound,
        });
        if let Some(lo) = lower_bound {
            self.space
                .constraints
                .push(ConstraintDef::LowerBound { set: s, lo });
        }
        s
    }

    fn cardinality_set(&mut self, parent: VarIdx, feature: &str, lo: u32) -> usize {
        let id = format!("{}.{feature}", self.space.variables[parent].id);
        let s = self.new_set(id, Some(lo));
        self.child_sets.insert((parent, feature.to_string()), s);
        s
    }

    /// Creates the variables for every feature of `owner` under `parent`.
    fn expand(&mut self, parent: VarIdx, owner: Option<&str>) -> Result<(), SpaceError> {
        let ast = self.ast;
        let features = ast.features_of(owner).unwrap_or_default();
        for f in features {
            let lo = f.cardinality.lo;
            let hi = match f.cardinality.hi {
                Some(hi) => hi,
                None if self.max_bound < lo => {
                    return Err(SpaceError::BoundBelowLower {
                        feature: f.name.clone(),
                        lo,
                        max_bound: self.max_bound,
                        pos: f.pos,
                    })
                }
                None => self.max_bound,
            };
            let set = self.cardinality_set(parent, &f.name, lo);
            for i in 0..hi {
                let id = format!("{}.{}[{i}]", self.space.variables[parent].id, f.name);
                self.feature_var(parent, owner, f, id, i, set)?;
            }
        }
        Ok(())
    }

    fn feature_var(
        &mut self,
        parent: VarIdx,
        owner: Option<&str>,
        f: &FeatureDecl,
        id: String,
        index: u32,
        set: usize,
    ) -> Result<(), SpaceError> {
        let ast = self.ast;
        let mut var = Variable {
            id,
            type_name: f.type_name.clone(),
            index,
            parent: Some(parent),
            kind: VarKind::Part,
            feature: f.name.clone(),
            attr: None,
            set: Some(set),
            derived: false,
        };
        if let Some((lo, hi)) = f.num_range {
            let name = match owner {
                Some(s) => format!("{s}.{}", f.name),
                None => f.name.clone(),
            };
            var.type_name = name.clone();
            var.kind = VarKind::IntegerAttr;
            var.attr = Some(self.attribute(name, Domain::Integer(lo, hi)));
            self.push_var(var)?;
        } else if f.type_name == "Bool" {
            var.kind = VarKind::DiscreteAttr;
            var.attr = Some(self.attribute(
                "Bool".to_string(),
                Domain::Discrete(vec![Value::sym("true"), Value::sym("false")]),
            ));
            self.push_var(var)?;
        } else if let Some(e) = ast.enumeration(&f.type_name) {
            var.kind = VarKind::DiscreteAttr;
            let options = e.options.iter().map(|o| Value::sym(&o.name)).collect();
            var.attr = Some(self.attribute(e.name.clone(), Domain::Discrete(options)));
            let v = self.push_var(var)?;
            self.enum_attributes(v, e)?;
        } else {
            self.part_type(&f.type_name);
            let v = self.push_var(var)?;
            self.expand(v, Some(&f.type_name))?;
        }
        Ok(())
    }

    /// Adds `<v>.<attr>[0]` children and the compatibility table for an
    /// enumeration-typed variable.
    fn enum_attributes(&mut self, v: VarIdx, e: &EnumerationDef) -> Result<(), SpaceError> {
        if e.attributes.is_empty() {
            return Ok(());
        }
        let vid = self.space.variables[v].id.clone();
        let mut columns = vec![v];
        for (k, a) in e.attributes.iter().enumerate() {
            let mut values: Vec<Value> = Vec::new();
            for o in &e.options {
                let val = Value::Int(o.values[k]);
                if !values.contains(&val) {
                    values.push(val);
                }
            }
            let def = format!("{}.{}", e.name, a.name);
            let attr = self.attribute(def.clone(), Domain::Discrete(values));
            let set = self.cardinality_set(v, &a.name, 1);
            let child = self.push_var(Variable {
                id: format!("{vid}.{}[0]", a.name),
                type_name: def,
                index: 0,
                parent: Some(v),
                kind: VarKind::IntegerAttr,
                feature: a.name.clone(),
                attr: Some(attr),
                set: Some(set),
                derived: true,
            })?;
            columns.push(child);
        }
        let rows = e
            .options
            .iter()
            .map(|o| {
                std::iter::once(vec![Value::sym(&o.name)])
                    .chain(o.values.iter().map(|x| vec![Value::Int(*x)]))
                    .collect()
            })
            .collect();
        self.space.constraints.push(ConstraintDef::Table {
            id: format!("t_{vid}"),
            columns,
            rows,
            internal: true,
        });
        Ok(())
    }

    fn behavior(&mut self, k: usize, b: &BehaviorDef) -> Result<(), SpaceError> {
        let bases: Vec<VarIdx> = match &b.context {
            None => vec![ConfigurationSpace::ROOT],
            Some(s) => (0..self.space.variables.len())
                .filter(|&v| {
                    let var = &self.space.variables[v];
                    var.kind == VarKind::Part && &var.type_name == s
                })
                .collect(),
        };
        for base in bases {
            let id = if b.context.is_some() {
                format!("c{k}@{}", self.space.variables[base].id)
            } else {
                format!("c{k}")
            };
            match &b.kind {
                BehaviorKind::ConditionalRequire {
                    condition,
                    requirement,
                } => {
                    let c = self.formula(base, condition)?;
                    let r = self.formula(base, requirement)?;
                    let not_c = self.node(FormulaNode::Not(c));
                    let root = self.node(FormulaNode::Or(not_c, r));
                    let source = format!(
                        "condition {} require {}",
                        expr_to_string(condition),
                        expr_to_string(requirement)
                    );
                    self.space
                        .constraints
                        .push(ConstraintDef::Boolean { id, root, source });
                }
                BehaviorKind::Require(e) => {
                    let root = self.formula(base, e)?;
                    let source = format!("require {}", expr_to_string(e));
                    self.space
                        .constraints
                        .push(ConstraintDef::Boolean { id, root, source });
                }
                BehaviorKind::Combinations { columns, rows } => {
                    let columns = columns
                        .iter()
                        .map(|p| self.single(base, p))
                        .collect::<Result<Vec<_>, _>>()?;
                    let rows = rows
                        .iter()
                        .map(|row| {
                            row.entries
                                .iter()
                                .map(|entry| entry.iter().map(literal_value).collect())
                                .collect()
                        })
                        .collect();
                    self.space.constraints.push(ConstraintDef::Table {
                        id,
                        columns,
                        rows,
                        internal: false,
                    });
                }
            }
        }
        Ok(())
    }

    fn node(&mut self, n: FormulaNode) -> NodeId {
        self.space.formulas.push(n);
        self.space.formulas.len() - 1
    }

    fn resolve(&self, base: VarIdx, path: &PathExpr) -> Vec<VarIdx> {
        let mut current = vec![base];
        for seg in &path.segments {
            let mut next = Vec::new();
            for v in current {
                if let Some(&s) = self.child_sets.get(&(v, seg.clone())) {
                    next.extend_from_slice(&self.space.sets[s].members);
                }
            }
            current = next;
        }
        current
    }

    fn single(&self, base: VarIdx, path: &PathExpr) -> Result<VarIdx, SpaceError> {
        self.resolve(base, path)
            .first()
            .copied()
            .ok_or_else(|| SpaceError::EmptyPath {
                path: path.to_string(),
                pos: path.pos,
            })
    }

    /// Lowers an expression used as a condition.
    fn formula(&mut self, base: VarIdx, e: &Expr) -> Result<NodeId, SpaceError> {
        Ok(match e {
            Expr::Binary(op, l, r) if op.is_logical() => {
                let l = self.formula(base, l)?;
                let r = self.formula(base, r)?;
                self.node(if *op == BinaryOp::Or {
                    FormulaNode::Or(l, r)
                } else {
                    FormulaNode::And(l, r)
                })
            }
            Expr::Binary(op, l, r) => {
                let cmp = match op {
                    BinaryOp::Eq => CmpOp::Eq,
                    BinaryOp::Ne => CmpOp::Ne,
                    BinaryOp::Lt => CmpOp::Lt,
                    BinaryOp::Le => CmpOp::Le,
                    BinaryOp::Gt => CmpOp::Gt,
                    _ => CmpOp::Ge,
                };
                let l = self.term(base, l)?;
                let r = self.term(base, r)?;
                self.node(FormulaNode::Cmp(cmp, l, r))
            }
            Expr::Unary(UnaryOp::Not, inner) => {
                let inner = self.formula(base, inner)?;
                self.node(FormulaNode::Not(inner))
            }
            Expr::Const(Literal::Bool(b), _) => {
                // Constant truth value as `0 = 0` / `0 != 0`.
                let l = self.node(FormulaNode::Const(Value::Int(0)));
                let r = self.node(FormulaNode::Const(Value::Int(0)));
                let op = if *b { CmpOp::Eq } else { CmpOp::Ne };
                self.node(FormulaNode::Cmp(op, l, r))
            }
            // A Bool-typed path used as a condition.
            _ => {
                let v = self.term(base, e)?;
                let t = self.node(FormulaNode::Const(Value::sym("true")));
                self.node(FormulaNode::Cmp(CmpOp::Eq, v, t))
            }
        })
    }

    /// Lowers an expression used as a value.
    fn term(&mut self, base: VarIdx, e: &Expr) -> Result<NodeId, SpaceError> {
        Ok(match e {
            Expr::Path(p) => {
                let v = self.single(base, p)?;
                self.node(FormulaNode::Var(v))
            }
            Expr::Const(lit, _) => self.node(FormulaNode::Const(literal_value(lit))),
            Expr::Unary(_, inner) => {
                let zero = self.node(FormulaNode::Const(Value::Int(0)));
                let inner = self.term(base, inner)?;
                self.node(FormulaNode::Arith(ArithOp::Sub, zero, inner))
            }
            Expr::Binary(op, l, r) => {
                let op = match op {
                    BinaryOp::Add => ArithOp::Add,
                    BinaryOp::Sub => ArithOp::Sub,
                    _ => ArithOp::Mul,
                };
                let l = self.term(base, l)?;
                let r = self.term(base, r)?;
                self.node(FormulaNode::Arith(op, l, r))
            }
            Expr::Aggregate(f, p) => {
                let members = self.resolve(base, p);
                if members.is_empty() {
                    return Err(SpaceError::EmptyPath {
                        path: p.to_string(),
                        pos: p.pos,
                    });
                }
                let set = self.aggregate_set(base, p, members);
                let node = self.space.formulas.len();
                let func = self.space.functions.len();
                self.space.functions.push(FunctionDef {
                    node,
                    kind: match f {
                        AggregateFn::Count => FunctionKind::Count,
                        AggregateFn::Sum => FunctionKind::Sum,
                    },
                    set,
                });
                self.node(FormulaNode::Fn(func))
            }
        })
    }

    /// Reuses a cardinality set with exactly these members, otherwise
    /// creates an operand-only set named after the path.
    fn aggregate_set(&mut self, base: VarIdx, p: &PathExpr, members: Vec<VarIdx>) -> usize {
        if let Some(&s) = self.set_by_members.get(&members) {
            return s;
        }
        if let Some(s) = self
            .space
            .sets
            .iter()
            .position(|s| s.lower_bound.is_some() && s.members == members)
        {
            self.set_by_members.insert(members, s);
            return s;
        }
        let id = format!("{}.{p}", self.space.variables[base].id);
        let s = match self.set_ids.get(&id) {
            Some(&s) => s,
            None => {
                let s = self.new_set(id, None);
                self.space.sets[s].members = members.clone();
                s
            }
        };
        self.set_by_members.insert(members, s);
        s
    }
}

pub(crate) fn literal_value(lit: &Literal) -> Value {
    match lit {
        Literal::Int(v) => Value::Int(*v),
        Literal::Sym(s) => Value::Sym(s.clone()),
        Literal::Bool(b) => Value::Sym(b.to_string()),
    }
}
