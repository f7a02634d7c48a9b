//! Recursive-descent parser over the token stream.

use super::ast::*;
use super::lexer::{Tok, Token};
use super::{ParseError, ParseErrorKind};

type PResult<T> = Result<T, ParseError>;

pub(super) struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

fn is_upper(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

fn is_lower(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_lowercase())
}

impl Parser {
    pub(super) fn new(tokens: Vec<Token>) -> Self {
        Self { tokens, at: 0 }
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.at + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn pos(&self) -> Pos {
        self.peek().pos
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        let expected: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        ParseError::new(
            ParseErrorKind::Syntax,
            t.pos,
            expected.clone(),
            format!("expected {}, found {}", expected.join(" or "), t.tok),
        )
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, desc: &str) -> PResult<Pos> {
        if self.peek().tok == tok {
            Ok(self.bump().pos)
        } else {
            Err(self.error(&[desc]))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<Pos> {
        if self.at_keyword(kw) {
            Ok(self.bump().pos)
        } else {
            Err(self.error(&[&format!("`{kw}`")]))
        }
    }

    fn upper_ident(&mut self) -> PResult<(String, Pos)> {
        match &self.peek().tok {
            Tok::Ident(s) if is_upper(s) => {
                let s = s.clone();
                Ok((s, self.bump().pos))
            }
            _ => Err(self.error(&["type name"])),
        }
    }

    fn lower_ident(&mut self) -> PResult<(String, Pos)> {
        match &self.peek().tok {
            Tok::Ident(s) if is_lower(s) => {
                let s = s.clone();
                Ok((s, self.bump().pos))
            }
            _ => Err(self.error(&["feature name"])),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        let negative = self.eat(&Tok::Minus);
        match self.peek().tok {
            Tok::Int(v) => {
                self.bump();
                Ok(if negative { -v } else { v })
            }
            _ => Err(self.error(&["integer"])),
        }
    }

    fn nonneg_int(&mut self) -> PResult<u32> {
        match self.peek().tok {
            Tok::Int(v) if v <= u32::MAX as i64 => {
                self.bump();
                Ok(v as u32)
            }
            _ => Err(self.error(&["non-negative integer"])),
        }
    }

    // ---- model -------------------------------------------------------

    pub(super) fn model(&mut self) -> Result<CoomAst, Vec<ParseError>> {
        let mut product: Option<ProductDef> = None;
        let mut errors = Vec::new();
        let mut ast = CoomAst {
            product: ProductDef::default(),
            enumerations: Vec::new(),
            structures: Vec::new(),
            behaviors: Vec::new(),
        };
        loop {
            let pos = self.pos();
            let tok = self.peek().tok.clone();
            let step = match &tok {
                Tok::Eof => break,
                Tok::Ident(kw) => match kw.as_str() {
                    "product" => self.product().map(|p| {
                        if product.is_some() {
                            errors.push(ParseError::new(
                                ParseErrorKind::MultipleProducts,
                                pos,
                                Vec::new(),
                                "only one product allowed".to_string(),
                            ));
                        } else {
                            product = Some(p);
                        }
                    }),
                    "enumeration" => self.enumeration().map(|e| ast.enumerations.push(e)),
                    "structure" => self.structure().map(|s| ast.structures.push(s)),
                    "behavior" => self.behavior(&mut ast.behaviors),
                    _ => Err(self.error(&[
                        "`product`",
                        "`enumeration`",
                        "`structure`",
                        "`behavior`",
                    ])),
                },
                _ => Err(self.error(&[
                    "`product`",
                    "`enumeration`",
                    "`structure`",
                    "`behavior`",
                ])),
            };
            if let Err(e) = step {
                errors.push(e);
                return Err(errors);
            }
        }
        match product {
            Some(p) if errors.is_empty() => {
                ast.product = p;
                Ok(ast)
            }
            Some(_) => Err(errors),
            None => {
                errors.push(ParseError::new(
                    ParseErrorKind::MissingProduct,
                    self.pos(),
                    vec!["`product`".to_string()],
                    "model defines no product".to_string(),
                ));
                Err(errors)
            }
        }
    }

    fn product(&mut self) -> PResult<ProductDef> {
        let pos = self.expect_keyword("product")?;
        self.expect(Tok::LBrace, "`{`")?;
        let features = self.features()?;
        Ok(ProductDef { features, pos })
    }

    fn structure(&mut self) -> PResult<StructureDef> {
        let pos = self.expect_keyword("structure")?;
        let (name, _) = self.upper_ident()?;
        self.expect(Tok::LBrace, "`{`")?;
        let features = self.features()?;
        Ok(StructureDef {
            name,
            features,
            pos,
        })
    }

    /// Features up to and including the closing brace.
    fn features(&mut self) -> PResult<Vec<FeatureDecl>> {
        let mut out = Vec::new();
        while !self.eat(&Tok::RBrace) {
            out.push(self.feature()?);
        }
        Ok(out)
    }

    fn feature(&mut self) -> PResult<FeatureDecl> {
        let pos = self.pos();
        if self.at_keyword("num") {
            self.bump();
            let (name, _) = self.lower_ident()?;
            let lo = self.int()?;
            self.expect(Tok::DotDot, "`..`")?;
            let hi = self.int()?;
            let cardinality = self.cardinality()?;
            return Ok(FeatureDecl {
                type_name: "num".to_string(),
                name,
                cardinality,
                num_range: Some((lo, hi)),
                pos,
            });
        }
        let (type_name, _) = match &self.peek().tok {
            Tok::Ident(s) if is_upper(s) => self.upper_ident()?,
            _ => return Err(self.error(&["`num`", "type name", "`}`"])),
        };
        let (name, _) = self.lower_ident()?;
        let cardinality = self.cardinality()?;
        Ok(FeatureDecl {
            type_name,
            name,
            cardinality,
            num_range: None,
            pos,
        })
    }

    fn cardinality(&mut self) -> PResult<Cardinality> {
        if !matches!(self.peek().tok, Tok::Int(_)) {
            return Ok(Cardinality::ONE);
        }
        let lo = self.nonneg_int()?;
        self.expect(Tok::DotDot, "`..`")?;
        if self.eat(&Tok::Star) {
            return Ok(Cardinality { lo, hi: None });
        }
        let hi = match self.peek().tok {
            Tok::Int(_) => self.nonneg_int()?,
            _ => return Err(self.error(&["non-negative integer", "`*`"])),
        };
        Ok(Cardinality { lo, hi: Some(hi) })
    }

    fn enumeration(&mut self) -> PResult<EnumerationDef> {
        let pos = self.expect_keyword("enumeration")?;
        let (name, _) = self.upper_ident()?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut attributes = Vec::new();
        while self.at_keyword("attribute") {
            let apos = self.bump().pos;
            self.expect_keyword("num")?;
            let (aname, _) = self.lower_ident()?;
            attributes.push(AttributeDecl {
                name: aname,
                pos: apos,
            });
        }
        let mut options = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let (oname, opos) = match &self.peek().tok {
                Tok::Ident(s) if is_upper(s) => self.upper_ident()?,
                _ => return Err(self.error(&["option name", "`}`"])),
            };
            let mut values = Vec::new();
            if self.eat(&Tok::LParen) {
                values.push(self.int()?);
                while self.eat(&Tok::Comma) {
                    values.push(self.int()?);
                }
                self.expect(Tok::RParen, "`)`")?;
            }
            options.push(OptionDef {
                name: oname,
                values,
                pos: opos,
            });
        }
        Ok(EnumerationDef {
            name,
            attributes,
            options,
            pos,
        })
    }

    fn behavior(&mut self, out: &mut Vec<BehaviorDef>) -> PResult<()> {
        self.expect_keyword("behavior")?;
        let context = match &self.peek().tok {
            Tok::Ident(s) if is_upper(s) => Some(self.upper_ident()?.0),
            _ => None,
        };
        self.expect(Tok::LBrace, "`{`")?;
        loop {
            let pos = self.pos();
            let kind = if self.eat(&Tok::RBrace) {
                return Ok(());
            } else if self.at_keyword("condition") {
                self.bump();
                let condition = self.expr()?;
                self.expect_keyword("require")?;
                let requirement = self.expr()?;
                BehaviorKind::ConditionalRequire {
                    condition,
                    requirement,
                }
            } else if self.at_keyword("require") {
                self.bump();
                BehaviorKind::Require(self.expr()?)
            } else if self.at_keyword("combinations") {
                self.bump();
                self.table()?
            } else {
                return Err(self.error(&[
                    "`condition`",
                    "`require`",
                    "`combinations`",
                    "`}`",
                ]));
            };
            out.push(BehaviorDef {
                context: context.clone(),
                kind,
                pos,
            });
        }
    }

    fn table(&mut self) -> PResult<BehaviorKind> {
        self.expect(Tok::LParen, "`(`")?;
        let mut columns = vec![self.path()?];
        while self.eat(&Tok::Comma) {
            columns.push(self.path()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        let mut rows = Vec::new();
        while self.at_keyword("allow") {
            let pos = self.bump().pos;
            self.expect(Tok::LParen, "`(`")?;
            let mut entries = vec![self.entry()?];
            while self.eat(&Tok::Comma) {
                entries.push(self.entry()?);
            }
            self.expect(Tok::RParen, "`)`")?;
            rows.push(AllowRow { entries, pos });
        }
        if rows.is_empty() {
            return Err(self.error(&["`allow`"]));
        }
        Ok(BehaviorKind::Combinations { columns, rows })
    }

    fn entry(&mut self) -> PResult<Vec<Literal>> {
        if self.eat(&Tok::LBracket) {
            let mut lits = vec![self.literal()?];
            while self.eat(&Tok::Comma) {
                lits.push(self.literal()?);
            }
            self.expect(Tok::RBracket, "`]`")?;
            Ok(lits)
        } else {
            Ok(vec![self.literal()?])
        }
    }

    fn literal(&mut self) -> PResult<Literal> {
        match &self.peek().tok {
            Tok::Ident(s) if s == "true" || s == "false" => {
                let b = s == "true";
                self.bump();
                Ok(Literal::Bool(b))
            }
            Tok::Ident(s) if is_upper(s) => Ok(Literal::Sym(self.upper_ident()?.0)),
            Tok::Int(_) | Tok::Minus => Ok(Literal::Int(self.int()?)),
            _ => Err(self.error(&["option name", "integer", "`true`", "`false`"])),
        }
    }

    fn path(&mut self) -> PResult<PathExpr> {
        let (first, pos) = self.lower_ident()?;
        let mut segments = vec![first];
        while self.peek().tok == Tok::Dot {
            self.bump();
            segments.push(self.lower_ident()?.0);
        }
        Ok(PathExpr { segments, pos })
    }

    // ---- expressions ---------------------------------------------------

    pub(super) fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinaryOp> {
        Some(match self.peek().tok {
            Tok::OrOr => BinaryOp::Or,
            Tok::AndAnd => BinaryOp::And,
            Tok::Eq => BinaryOp::Eq,
            Tok::Ne => BinaryOp::Ne,
            Tok::Lt => BinaryOp::Lt,
            Tok::Le => BinaryOp::Le,
            Tok::Gt => BinaryOp::Gt,
            Tok::Ge => BinaryOp::Ge,
            Tok::Plus => BinaryOp::Add,
            Tok::Minus => BinaryOp::Sub,
            Tok::Star => BinaryOp::Mul,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op() {
            if op.precedence() < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        match self.peek().tok {
            Tok::Bang => {
                self.bump();
                Ok(Expr::Unary(UnaryOp::Not, Box::new(self.unary()?)))
            }
            Tok::Minus => {
                let pos = self.pos();
                if let Tok::Int(v) = *self.peek_at(1) {
                    self.bump();
                    self.bump();
                    return Ok(Expr::Const(Literal::Int(-v), pos));
                }
                self.bump();
                Ok(Expr::Unary(UnaryOp::Neg, Box::new(self.unary()?)))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        match self.peek().tok.clone() {
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Const(Literal::Int(v), pos))
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Expr::Const(Literal::Bool(s == "true"), pos))
            }
            Tok::Ident(s) if (s == "count" || s == "sum") && *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let path = self.path()?;
                self.expect(Tok::RParen, "`)`")?;
                let f = if s == "count" {
                    AggregateFn::Count
                } else {
                    AggregateFn::Sum
                };
                Ok(Expr::Aggregate(f, path))
            }
            Tok::Ident(s) if is_upper(&s) => {
                self.bump();
                Ok(Expr::Const(Literal::Sym(s), pos))
            }
            Tok::Ident(s) if is_lower(&s) => Ok(Expr::Path(self.path()?)),
            _ => Err(self.error(&["expression"])),
        }
    }

    // ---- user input ----------------------------------------------------

    pub(super) fn user_input(&mut self) -> PResult<UserInputAst> {
        let mut directives = Vec::new();
        loop {
            let pos = self.pos();
            if self.peek().tok == Tok::Eof {
                return Ok(UserInputAst { directives });
            } else if self.at_keyword("add") {
                self.bump();
                let target = self.instance_path()?;
                directives.push(Directive::Add { target, pos });
            } else if self.at_keyword("set") {
                self.bump();
                let target = self.instance_path()?;
                self.expect(Tok::Eq, "`=`")?;
                let value = self.literal()?;
                directives.push(Directive::Set { target, value, pos });
            } else {
                return Err(self.error(&["`add`", "`set`"]));
            }
        }
    }

    fn instance_path(&mut self) -> PResult<InstancePath> {
        let mut steps = Vec::new();
        if self.at_keyword("root") {
            self.bump();
            while self.eat(&Tok::Dot) {
                steps.push(self.instance_step()?);
            }
        } else {
            steps.push(self.instance_step()?);
            while self.eat(&Tok::Dot) {
                steps.push(self.instance_step()?);
            }
        }
        Ok(InstancePath { steps })
    }

    fn instance_step(&mut self) -> PResult<InstanceStep> {
        let (name, _) = self.lower_ident()?;
        self.expect(Tok::LBracket, "`[`")?;
        let index = self.nonneg_int()?;
        self.expect(Tok::RBracket, "`]`")?;
        Ok(InstanceStep { name, index })
    }
}
