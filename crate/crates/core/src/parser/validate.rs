//! Semantic checks on a parsed model: name resolution, arities, typing of
//! behavior expressions, and finiteness of the structure graph.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::ast::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SemanticErrorKind {
    UnresolvedType,
    ArityMismatch,
    DuplicateName,
    EmptyEnumeration,
    InvalidRange,
    InvalidCardinality,
    CyclicStructure,
    UnresolvedPath,
    SetValuedPath,
    TypeMismatch,
    Nonlinear,
    InvalidTableEntry,
    UnknownContext,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct SemanticError {
    pub kind: SemanticErrorKind,
    /// The offending name (type, feature, path or literal).
    pub name: String,
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl SemanticError {
    fn new(kind: SemanticErrorKind, pos: Pos, name: impl Into<String>, message: String) -> Self {
        Self {
            kind,
            name: name.into(),
            line: pos.line,
            col: pos.col,
            message,
        }
    }
}

/// What a path expression denotes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathTarget {
    Part(String),
    Enum(String),
    Bool,
    Num(i64, i64),
    EnumAttr { enumeration: String, attribute: usize },
}

#[derive(Debug, Clone)]
pub struct ResolvedPath {
    pub target: PathTarget,
    /// True when some feature along the path may have more than one instance.
    pub set_valued: bool,
}

/// Resolves `path` starting at the features of `context` (`None` = product).
pub fn resolve_path(
    ast: &CoomAst,
    context: Option<&str>,
    path: &PathExpr,
) -> Result<ResolvedPath, SemanticError> {
    let unresolved = |msg: String| {
        SemanticError::new(SemanticErrorKind::UnresolvedPath, path.pos, path.to_string(), msg)
    };
    let mut owner = context.map(str::to_string);
    let mut set_valued = false;
    let mut segs = path.segments.iter().peekable();
    while let Some(seg) = segs.next() {
        let features = ast
            .features_of(owner.as_deref())
            .ok_or_else(|| unresolved(format!("unknown structure in path `{path}`")))?;
        let feature = features.iter().find(|f| &f.name == seg).ok_or_else(|| {
            let owner_name = owner.as_deref().unwrap_or("product");
            unresolved(format!("`{owner_name}` has no feature `{seg}`"))
        })?;
        if feature.cardinality.hi.is_none_or(|hi| hi > 1) {
            set_valued = true;
        }
        let last = segs.peek().is_none();
        if let Some((lo, hi)) = feature.num_range {
            if !last {
                return Err(unresolved(format!("numeric feature `{seg}` has no sub-features")));
            }
            return Ok(ResolvedPath {
                target: PathTarget::Num(lo, hi),
                set_valued,
            });
        }
        if feature.type_name == "Bool" {
            if !last {
                return Err(unresolved(format!("Bool feature `{seg}` has no sub-features")));
            }
            return Ok(ResolvedPath {
                target: PathTarget::Bool,
                set_valued,
            });
        }
        if let Some(e) = ast.enumeration(&feature.type_name) {
            if last {
                return Ok(ResolvedPath {
                    target: PathTarget::Enum(e.name.clone()),
                    set_valued,
                });
            }
            let attr_name = segs.next().unwrap();
            let attribute = e.attribute_index(attr_name).ok_or_else(|| {
                unresolved(format!("enumeration `{}` has no attribute `{attr_name}`", e.name))
            })?;
            if segs.peek().is_some() {
                return Err(unresolved(format!(
                    "attribute `{attr_name}` must end the path"
                )));
            }
            return Ok(ResolvedPath {
                target: PathTarget::EnumAttr {
                    enumeration: e.name.clone(),
                    attribute,
                },
                set_valued,
            });
        }
        if ast.structure(&feature.type_name).is_none() {
            return Err(unresolved(format!("unknown type `{}`", feature.type_name)));
        }
        if last {
            return Ok(ResolvedPath {
                target: PathTarget::Part(feature.type_name.clone()),
                set_valued,
            });
        }
        owner = Some(feature.type_name.clone());
    }
    Err(unresolved("empty path".to_string()))
}

/// Static type of an expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprType {
    Formula,
    Int,
    /// Value of an enumeration (or of `Bool`) typed path.
    Sym(String),
    /// Bare option name, not yet tied to an enumeration.
    SymConst(String),
    /// `true` / `false`: usable as a formula or as a `Bool` value.
    BoolLit,
}

impl ExprType {
    fn is_formula(&self) -> bool {
        match self {
            ExprType::Formula | ExprType::BoolLit => true,
            ExprType::Sym(e) => e == "Bool",
            _ => false,
        }
    }
}

/// Returns every semantic violation in `ast`; empty means valid.
pub fn validate_ast(ast: &CoomAst) -> Vec<SemanticError> {
    let mut v = Validator {
        ast,
        errors: Vec::new(),
    };
    v.declarations();
    v.acyclic();
    for b in &ast.behaviors {
        v.behavior(b);
    }
    v.errors
}

struct Validator<'a> {
    ast: &'a CoomAst,
    errors: Vec<SemanticError>,
}

impl Validator<'_> {
    fn err(&mut self, kind: SemanticErrorKind, pos: Pos, name: impl Into<String>, message: String) {
        self.errors.push(SemanticError::new(kind, pos, name, message));
    }

    fn declarations(&mut self) {
        let ast = self.ast;
        let mut type_names = HashSet::new();
        for (name, pos) in ast
            .enumerations
            .iter()
            .map(|e| (&e.name, e.pos))
            .chain(ast.structures.iter().map(|s| (&s.name, s.pos)))
        {
            if name == "Bool" || !type_names.insert(name.clone()) {
                self.err(
                    SemanticErrorKind::DuplicateName,
                    pos,
                    name.clone(),
                    format!("type `{name}` is defined more than once"),
                );
            }
        }

        for e in &ast.enumerations {
            if e.options.is_empty() {
                self.err(
                    SemanticErrorKind::EmptyEnumeration,
                    e.pos,
                    e.name.clone(),
                    format!("enumeration `{}` has no options", e.name),
                );
            }
            let mut seen = HashSet::new();
            for a in &e.attributes {
                if !seen.insert(&a.name) {
                    self.err(
                        SemanticErrorKind::DuplicateName,
                        a.pos,
                        a.name.clone(),
                        format!("attribute `{}` declared twice in `{}`", a.name, e.name),
                    );
                }
            }
            let mut seen = HashSet::new();
            for o in &e.options {
                if !seen.insert(&o.name) {
                    self.err(
                        SemanticErrorKind::DuplicateName,
                        o.pos,
                        o.name.clone(),
                        format!("option `{}` declared twice in `{}`", o.name, e.name),
                    );
                }
                if o.values.len() != e.attributes.len() {
                    self.err(
                        SemanticErrorKind::ArityMismatch,
                        o.pos,
                        o.name.clone(),
                        format!(
                            "option `{}` has {} value(s) but `{}` declares {} attribute(s)",
                            o.name,
                            o.values.len(),
                            e.name,
                            e.attributes.len()
                        ),
                    );
                }
            }
        }

        let owners = std::iter::once(("product", &ast.product.features)).chain(
            ast.structures
                .iter()
                .map(|s| (s.name.as_str(), &s.features)),
        );
        for (owner, features) in owners {
            let mut seen = HashSet::new();
            for f in features {
                if !seen.insert(&f.name) {
                    self.err(
                        SemanticErrorKind::DuplicateName,
                        f.pos,
                        f.name.clone(),
                        format!("feature `{}` declared twice in `{owner}`", f.name),
                    );
                }
                self.feature(f);
            }
        }
    }

    fn feature(&mut self, f: &FeatureDecl) {
        let known = f.is_num()
            || f.type_name == "Bool"
            || self.ast.enumeration(&f.type_name).is_some()
            || self.ast.structure(&f.type_name).is_some();
        if !known {
            self.err(
                SemanticErrorKind::UnresolvedType,
                f.pos,
                f.type_name.clone(),
                format!("unknown type `{}` for feature `{}`", f.type_name, f.name),
            );
        }
        if let Some((lo, hi)) = f.num_range {
            if lo > hi {
                self.err(
                    SemanticErrorKind::InvalidRange,
                    f.pos,
                    f.name.clone(),
                    format!("range {lo}..{hi} of `{}` is empty", f.name),
                );
            }
        }
        if let Some(hi) = f.cardinality.hi {
            if f.cardinality.lo > hi {
                self.err(
                    SemanticErrorKind::InvalidCardinality,
                    f.pos,
                    f.name.clone(),
                    format!("cardinality {} of `{}` is empty", f.cardinality, f.name),
                );
            }
        }
    }

    /// Structure types reachable from the product must not contain themselves.
    fn acyclic(&mut self) {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        fn visit(
            v: &mut Validator<'_>,
            name: &str,
            marks: &mut HashMap<String, Mark>,
        ) {
            marks.insert(name.to_string(), Mark::Active);
            let Some(s) = v.ast.structure(name) else {
                return;
            };
            for f in &s.features {
                if v.ast.structure(&f.type_name).is_none() {
                    continue;
                }
                match marks.get(&f.type_name) {
                    Some(Mark::Active) => v.err(
                        SemanticErrorKind::CyclicStructure,
                        f.pos,
                        f.type_name.clone(),
                        format!(
                            "structure `{}` contains itself through feature `{}`",
                            f.type_name, f.name
                        ),
                    ),
                    Some(Mark::Done) => {}
                    None => visit(v, &f.type_name.clone(), marks),
                }
            }
            marks.insert(name.to_string(), Mark::Done);
        }
        let mut marks = HashMap::new();
        for f in &self.ast.product.features {
            if self.ast.structure(&f.type_name).is_some() && !marks.contains_key(&f.type_name) {
                visit(self, &f.type_name.clone(), &mut marks);
            }
        }
    }

    fn behavior(&mut self, b: &BehaviorDef) {
        if let Some(ctx) = &b.context {
            if self.ast.structure(ctx).is_none() {
                self.err(
                    SemanticErrorKind::UnknownContext,
                    b.pos,
                    ctx.clone(),
                    format!("behavior scoped to unknown structure `{ctx}`"),
                );
                return;
            }
        }
        let ctx = b.context.as_deref();
        match &b.kind {
            BehaviorKind::ConditionalRequire {
                condition,
                requirement,
            } => {
                self.formula(ctx, condition);
                self.formula(ctx, requirement);
            }
            BehaviorKind::Require(e) => self.formula(ctx, e),
            BehaviorKind::Combinations { columns, rows } => self.table(ctx, columns, rows),
        }
    }

    fn formula(&mut self, ctx: Option<&str>, e: &Expr) {
        if let Some(t) = self.expr(ctx, e) {
            if !t.is_formula() {
                self.err(
                    SemanticErrorKind::TypeMismatch,
                    e.pos(),
                    super::print::expr_to_string(e),
                    "expected a condition, found a value".to_string(),
                );
            }
        }
    }

    fn value_path(&mut self, ctx: Option<&str>, p: &PathExpr) -> Option<PathTarget> {
        match resolve_path(self.ast, ctx, p) {
            Err(e) => {
                self.errors.push(e);
                None
            }
            Ok(r) if r.set_valued => {
                self.err(
                    SemanticErrorKind::SetValuedPath,
                    p.pos,
                    p.to_string(),
                    format!("path `{p}` denotes a set of variables; use count or sum"),
                );
                None
            }
            Ok(r) => Some(r.target),
        }
    }

    fn mismatch(&mut self, e: &Expr, message: String) -> Option<ExprType> {
        self.err(
            SemanticErrorKind::TypeMismatch,
            e.pos(),
            super::print::expr_to_string(e),
            message,
        );
        None
    }

    fn expr(&mut self, ctx: Option<&str>, e: &Expr) -> Option<ExprType> {
        match e {
            Expr::Path(p) => match self.value_path(ctx, p)? {
                PathTarget::Part(t) => {
                    self.mismatch(e, format!("path `{p}` denotes a `{t}` part, not a value"))
                }
                PathTarget::Enum(name) => Some(ExprType::Sym(name)),
                PathTarget::Bool => Some(ExprType::Sym("Bool".to_string())),
                PathTarget::Num(..) | PathTarget::EnumAttr { .. } => Some(ExprType::Int),
            },
            Expr::Const(Literal::Int(_), _) => Some(ExprType::Int),
            Expr::Const(Literal::Sym(s), _) => Some(ExprType::SymConst(s.clone())),
            Expr::Const(Literal::Bool(_), _) => Some(ExprType::BoolLit),
            Expr::Aggregate(f, p) => {
                let r = match resolve_path(self.ast, ctx, p) {
                    Ok(r) => r,
                    Err(err) => {
                        self.errors.push(err);
                        return None;
                    }
                };
                if *f == AggregateFn::Sum
                    && !matches!(r.target, PathTarget::Num(..) | PathTarget::EnumAttr { .. })
                {
                    return self.mismatch(e, format!("sum({p}) needs a numeric path"));
                }
                Some(ExprType::Int)
            }
            Expr::Unary(UnaryOp::Not, inner) => {
                let t = self.expr(ctx, inner)?;
                if t.is_formula() {
                    Some(ExprType::Formula)
                } else {
                    self.mismatch(e, "`!` needs a condition".to_string())
                }
            }
            Expr::Unary(UnaryOp::Neg, inner) => {
                let t = self.expr(ctx, inner)?;
                if t == ExprType::Int {
                    Some(ExprType::Int)
                } else {
                    self.mismatch(e, "unary `-` needs a number".to_string())
                }
            }
            Expr::Binary(op, l, r) => {
                let lt = self.expr(ctx, l);
                let rt = self.expr(ctx, r);
                let (lt, rt) = (lt?, rt?);
                self.binary(e, *op, l, r, lt, rt)
            }
        }
    }

    fn binary(
        &mut self,
        e: &Expr,
        op: BinaryOp,
        l: &Expr,
        r: &Expr,
        lt: ExprType,
        rt: ExprType,
    ) -> Option<ExprType> {
        use ExprType::*;
        if op.is_logical() {
            return if lt.is_formula() && rt.is_formula() {
                Some(Formula)
            } else {
                self.mismatch(e, format!("`{}` needs conditions on both sides", op.symbol()))
            };
        }
        if op.is_arithmetic() {
            if lt != Int || rt != Int {
                return self.mismatch(e, format!("`{}` needs numbers", op.symbol()));
            }
            if op == BinaryOp::Mul && !l.is_constant() && !r.is_constant() {
                self.err(
                    SemanticErrorKind::Nonlinear,
                    e.pos(),
                    super::print::expr_to_string(e),
                    "multiplication needs a constant operand".to_string(),
                );
                return None;
            }
            return Some(Int);
        }
        if !matches!(op, BinaryOp::Eq | BinaryOp::Ne) {
            return if lt == Int && rt == Int {
                Some(Formula)
            } else {
                self.mismatch(e, format!("`{}` compares numbers only", op.symbol()))
            };
        }
        let ok = match (&lt, &rt) {
            (Int, Int) => true,
            (Sym(a), Sym(b)) => a == b,
            (Sym(en), SymConst(s)) | (SymConst(s), Sym(en)) => {
                if en == "Bool" {
                    false
                } else {
                    let known = self
                        .ast
                        .enumeration(en)
                        .is_some_and(|x| x.options.iter().any(|o| &o.name == s));
                    if !known {
                        return self.mismatch(e, format!("`{s}` is not an option of `{en}`"));
                    }
                    true
                }
            }
            (Sym(en), BoolLit) | (BoolLit, Sym(en)) => en == "Bool",
            (SymConst(_), SymConst(_)) | (BoolLit, BoolLit) => true,
            _ => false,
        };
        if ok {
            Some(Formula)
        } else {
            self.mismatch(
                e,
                format!("cannot compare {lt:?} with {rt:?} using `{}`", op.symbol()),
            )
        }
    }

    fn table(&mut self, ctx: Option<&str>, columns: &[PathExpr], rows: &[AllowRow]) {
        let mut targets = Vec::new();
        for c in columns {
            let t = self.value_path(ctx, c);
            if let Some(PathTarget::Part(t)) = &t {
                self.err(
                    SemanticErrorKind::TypeMismatch,
                    c.pos,
                    c.to_string(),
                    format!("table column `{c}` denotes a `{t}` part"),
                );
                targets.push(None);
            } else {
                targets.push(t);
            }
        }
        for row in rows {
            if row.entries.len() != columns.len() {
                self.err(
                    SemanticErrorKind::ArityMismatch,
                    row.pos,
                    "allow",
                    format!(
                        "allow row has {} entries for {} columns",
                        row.entries.len(),
                        columns.len()
                    ),
                );
                continue;
            }
            for (entry, target) in row.entries.iter().zip(&targets) {
                let Some(target) = target else { continue };
                for lit in entry {
                    if !self.literal_fits(target, lit) {
                        self.err(
                            SemanticErrorKind::InvalidTableEntry,
                            row.pos,
                            lit.to_string(),
                            format!("`{lit}` is not in the domain of its column"),
                        );
                    }
                }
            }
        }
    }

    fn literal_fits(&self, target: &PathTarget, lit: &Literal) -> bool {
        match (target, lit) {
            (PathTarget::Enum(e), Literal::Sym(s)) => self
                .ast
                .enumeration(e)
                .is_some_and(|e| e.options.iter().any(|o| &o.name == s)),
            (PathTarget::Bool, Literal::Bool(_)) => true,
            (PathTarget::Num(lo, hi), Literal::Int(v)) => lo <= v && v <= hi,
            (
                PathTarget::EnumAttr {
                    enumeration,
                    attribute,
                },
                Literal::Int(v),
            ) => self.ast.enumeration(enumeration).is_some_and(|e| {
                e.options
                    .iter()
                    .any(|o| o.values.get(*attribute) == Some(v))
            }),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_model;

    fn errors(src: &str) -> Vec<SemanticError> {
        validate_ast(&parse_model(src).unwrap())
    }

    fn kinds(src: &str) -> Vec<SemanticErrorKind> {
        errors(src).into_iter().map(|e| e.kind).collect()
    }

    #[test]
    fn unknown_type() {
        let errs = errors("product {\n  Colour color\n}");
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].kind, SemanticErrorKind::UnresolvedType);
        assert_eq!(errs[0].name, "Colour");
        assert_eq!((errs[0].line, errs[0].col), (2, 3));
    }

    #[test]
    fn option_arity() {
        let src = "product { Wheel w } enumeration Wheel { attribute num size attribute num price W16 (16) }";
        assert_eq!(kinds(src), vec![SemanticErrorKind::ArityMismatch]);
    }

    #[test]
    fn cycles_are_rejected() {
        let src = "product { A a } structure A { B b 0..1 } structure B { A a 0..1 }";
        assert_eq!(kinds(src), vec![SemanticErrorKind::CyclicStructure]);
    }

    #[test]
    fn path_resolution() {
        let base = "product { Wheel w Frame frame } structure Frame { Wheel w 0..2 }
                    enumeration Wheel { attribute num size W1 (1) W2 (2) }";
        assert!(kinds(&format!("{base} behavior {{ require w.size > 1 }}")).is_empty());
        assert_eq!(
            kinds(&format!("{base} behavior {{ require w.weight > 1 }}")),
            vec![SemanticErrorKind::UnresolvedPath]
        );
        assert_eq!(
            kinds(&format!("{base} behavior {{ require frame.w.size > 1 }}")),
            vec![SemanticErrorKind::SetValuedPath]
        );
        assert!(kinds(&format!("{base} behavior {{ require sum(frame.w.size) > 1 }}")).is_empty());
        assert!(kinds(&format!("{base} behavior Frame {{ require count(w) > 1 }}")).is_empty());
        assert_eq!(
            kinds(&format!("{base} behavior Nope {{ require w = W1 }}")),
            vec![SemanticErrorKind::UnknownContext]
        );
    }

    #[test]
    fn typing() {
        let base = "product { Color c Bool b num n 0..9 } enumeration Color { Red Blue }";
        let ok = [
            "require c = Red",
            "require b",
            "require !b || b = false",
            "require n * 2 + 1 <= 9",
            "condition c != Blue require n > 3",
        ];
        for item in ok {
            assert!(kinds(&format!("{base} behavior {{ {item} }}")).is_empty(), "{item}");
        }
        let bad = [
            ("require c < Red", SemanticErrorKind::TypeMismatch),
            ("require c = Green", SemanticErrorKind::TypeMismatch),
            ("require n", SemanticErrorKind::TypeMismatch),
            ("require n * n = 4", SemanticErrorKind::Nonlinear),
            ("require c = n", SemanticErrorKind::TypeMismatch),
            ("require sum(c) = 1", SemanticErrorKind::TypeMismatch),
        ];
        for (item, kind) in bad {
            assert_eq!(kinds(&format!("{base} behavior {{ {item} }}")), vec![kind], "{item}");
        }
    }

    #[test]
    fn table_entries_checked() {
        let base = "product { Color c Bool b } enumeration Color { Red Blue }";
        assert!(kinds(&format!(
            "{base} behavior {{ combinations (c, b) allow (Red, true) allow ([Red, Blue], false) }}"
        ))
        .is_empty());
        assert_eq!(
            kinds(&format!("{base} behavior {{ combinations (c, b) allow (Green, true) }}")),
            vec![SemanticErrorKind::InvalidTableEntry]
        );
        assert_eq!(
            kinds(&format!("{base} behavior {{ combinations (c, b) allow (Red) }}")),
            vec![SemanticErrorKind::ArityMismatch]
        );
    }
}
