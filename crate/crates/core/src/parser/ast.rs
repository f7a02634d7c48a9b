//! Syntax tree for COOM model and user-input files.

use std::fmt;

use serde::Serialize;

/// Line/column of a token (both 1-based).
///
/// Positions never take part in equality: two trees that differ only in where
/// their nodes came from compare equal, which is what round-trip tests need.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(line: u32, col: u32) -> Self {
        Self { line, col }
    }
}

impl PartialEq for Pos {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Eq for Pos {}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoomAst {
    pub product: ProductDef,
    pub enumerations: Vec<EnumerationDef>,
    pub structures: Vec<StructureDef>,
    /// One entry per `condition`/`require`/`combinations` item, in source order.
    pub behaviors: Vec<BehaviorDef>,
}

impl CoomAst {
    pub fn enumeration(&self, name: &str) -> Option<&EnumerationDef> {
        self.enumerations.iter().find(|e| e.name == name)
    }

    pub fn structure(&self, name: &str) -> Option<&StructureDef> {
        self.structures.iter().find(|s| s.name == name)
    }

    /// Features of the product (`None`) or of a named structure.
    pub fn features_of(&self, owner: Option<&str>) -> Option<&[FeatureDecl]> {
        match owner {
            None => Some(&self.product.features),
            Some(name) => self.structure(name).map(|s| s.features.as_slice()),
        }
    }

    /// True when any feature reachable in the model has an open upper bound.
    pub fn has_unbounded(&self) -> bool {
        self.product
            .features
            .iter()
            .chain(self.structures.iter().flat_map(|s| s.features.iter()))
            .any(|f| f.cardinality.hi.is_none())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ProductDef {
    pub features: Vec<FeatureDecl>,
    pub pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Cardinality {
    pub lo: u32,
    /// `None` stands for `*`.
    pub hi: Option<u32>,
}

impl Cardinality {
    pub const ONE: Cardinality = Cardinality { lo: 1, hi: Some(1) };

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(hi) => write!(f, "{}..{}", self.lo, hi),
            None => write!(f, "{}..*", self.lo),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeatureDecl {
    /// Enumeration or structure name, `Bool`, or `num`.
    pub type_name: String,
    pub name: String,
    pub cardinality: Cardinality,
    /// Present iff `type_name == "num"`.
    pub num_range: Option<(i64, i64)>,
    pub pos: Pos,
}

impl FeatureDecl {
    pub fn is_num(&self) -> bool {
        self.type_name == "num"
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttributeDecl {
    pub name: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OptionDef {
    pub name: String,
    pub values: Vec<i64>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerationDef {
    pub name: String,
    pub attributes: Vec<AttributeDecl>,
    pub options: Vec<OptionDef>,
    pub pos: Pos,
}

impl EnumerationDef {
    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureDef {
    pub name: String,
    pub features: Vec<FeatureDecl>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BehaviorDef {
    /// Structure the behavior is scoped to; `None` means the product.
    pub context: Option<String>,
    pub kind: BehaviorKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum BehaviorKind {
    ConditionalRequire { condition: Expr, requirement: Expr },
    Require(Expr),
    Combinations { columns: Vec<PathExpr>, rows: Vec<AllowRow> },
}

/// One `allow` line: a nonempty literal set per column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AllowRow {
    pub entries: Vec<Vec<Literal>>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathExpr {
    pub segments: Vec<String>,
    pub pos: Pos,
}

impl fmt::Display for PathExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.segments.join("."))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Literal {
    Int(i64),
    Sym(String),
    Bool(bool),
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(v) => write!(f, "{v}"),
            Literal::Sym(s) => f.write_str(s),
            Literal::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BinaryOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Or => "||",
            BinaryOp::And => "&&",
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq
            | BinaryOp::Ne
            | BinaryOp::Lt
            | BinaryOp::Le
            | BinaryOp::Gt
            | BinaryOp::Ge => 3,
            BinaryOp::Add | BinaryOp::Sub => 4,
            BinaryOp::Mul => 5,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 3
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul)
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinaryOp::Or | BinaryOp::And)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AggregateFn {
    Count,
    Sum,
}

impl AggregateFn {
    pub fn name(self) -> &'static str {
        match self {
            AggregateFn::Count => "count",
            AggregateFn::Sum => "sum",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Expr {
    Path(PathExpr),
    Const(Literal, Pos),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Aggregate(AggregateFn, PathExpr),
}

impl Expr {
    pub fn pos(&self) -> Pos {
        match self {
            Expr::Path(p) | Expr::Aggregate(_, p) => p.pos,
            Expr::Const(_, pos) => *pos,
            Expr::Unary(_, e) => e.pos(),
            Expr::Binary(_, l, _) => l.pos(),
        }
    }

    /// True when the expression mentions no path (constant-foldable).
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Path(_) | Expr::Aggregate(..) => false,
            Expr::Const(..) => true,
            Expr::Unary(_, e) => e.is_constant(),
            Expr::Binary(_, l, r) => l.is_constant() && r.is_constant(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UserInputAst {
    pub directives: Vec<Directive>,
}

/// `name[index]` step of an instance path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceStep {
    pub name: String,
    pub index: u32,
}

/// Instance path such as `root.carrier[0].bag[1]`; `root` is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstancePath {
    pub steps: Vec<InstanceStep>,
}

impl InstancePath {
    /// Canonical variable id, always starting with `root`.
    pub fn variable_id(&self) -> String {
        let mut id = String::from("root");
        for step in &self.steps {
            id.push('.');
            id.push_str(&step.name);
            id.push('[');
            id.push_str(&step.index.to_string());
            id.push(']');
        }
        id
    }
}

impl fmt::Display for InstancePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.variable_id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Directive {
    Add { target: InstancePath, pos: Pos },
    Set { target: InstancePath, value: Literal, pos: Pos },
}

impl Directive {
    pub fn target(&self) -> &InstancePath {
        match self {
            Directive::Add { target, .. } | Directive::Set { target, .. } => target,
        }
    }
}

impl fmt::Display for Directive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Directive::Add { target, .. } => write!(f, "add {target}"),
            Directive::Set { target, value, .. } => write!(f, "set {target} = {value}"),
        }
    }
}
