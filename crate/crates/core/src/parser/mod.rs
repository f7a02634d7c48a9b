//! COOM model and user-input parsing.
//!
//! The concrete syntax accepted here:
//!
//! ```text
//! model        := (product | enumeration | structure | behavior)* ;
//! product      := "product" "{" feature* "}" ;
//! structure    := "structure" IDENT_UC "{" feature* "}" ;
//! feature      := "num" IDENT_LC range cardinality? | IDENT_UC IDENT_LC cardinality? ;
//! range        := INT ".." INT ;
//! cardinality  := INT ".." (INT | "*") ;
//! enumeration  := "enumeration" IDENT_UC "{" attrdecl* option* "}" ;
//! attrdecl     := "attribute" "num" IDENT_LC ;
//! option       := IDENT_UC ("(" INT ("," INT)* ")")? ;
//! behavior     := "behavior" IDENT_UC? "{" (conditional | requirement | table)* "}" ;
//! conditional  := "condition" expr "require" expr ;
//! requirement  := "require" expr ;
//! table        := "combinations" "(" path ("," path)* ")" allowrow+ ;
//! allowrow     := "allow" "(" entry ("," entry)* ")" ;
//! entry        := literal | "[" literal ("," literal)* "]" ;
//! literal      := IDENT_UC | INT | "true" | "false" ;
//! path         := IDENT_LC ("." IDENT_LC)* ;
//! aggregate    := ("count" | "sum") "(" path ")" ;
//! userinput    := directive* ;
//! directive    := "add" ipath | "set" ipath "=" literal ;
//! ipath        := "root" ("." IDENT_LC "[" INT "]")* | IDENT_LC "[" INT "]" ("." IDENT_LC "[" INT "]")* ;
//! ```
//!
//! Expression precedence, loosest first: `||`, `&&`, comparisons, `+ -`,
//! `*`, then prefix `!` and `-`. All binary operators associate to the left.
//! The optional type name after `behavior` scopes the block to every
//! instance of that structure.

pub mod ast;
mod grammar;
mod lexer;
mod print;
mod validate;

use std::fmt;

use serde::Serialize;

pub use ast::*;
pub use print::{expr_to_string, pretty_print};
pub use validate::{resolve_path, validate_ast, ExprType, PathTarget, ResolvedPath, SemanticError, SemanticErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ParseErrorKind {
    Lexical,
    Syntax,
    MultipleProducts,
    MissingProduct,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: u32,
    pub col: u32,
    pub expected: Vec<String>,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(kind: ParseErrorKind, pos: Pos, expected: Vec<String>, message: String) -> Self {
        Self {
            kind,
            line: pos.line,
            col: pos.col,
            expected,
            message,
        }
    }
}

/// Errors from one parse, in source order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseErrorList(pub Vec<ParseError>);

impl fmt::Display for ParseErrorList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseErrorList {}

/// Parses a COOM model file.
pub fn parse_model(source: &str) -> Result<CoomAst, ParseErrorList> {
    let (tokens, lex_errors) = lexer::tokenize(source);
    if !lex_errors.is_empty() {
        return Err(ParseErrorList(lex_errors));
    }
    grammar::Parser::new(tokens).model().map_err(ParseErrorList)
}

/// Parses a COOM user-input file (`add` / `set` directives).
pub fn parse_user_input(source: &str) -> Result<UserInputAst, ParseErrorList> {
    let (tokens, lex_errors) = lexer::tokenize(source);
    if !lex_errors.is_empty() {
        return Err(ParseErrorList(lex_errors));
    }
    grammar::Parser::new(tokens)
        .user_input()
        .map_err(|e| ParseErrorList(vec![e]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_product() {
        let ast = parse_model("product { }").unwrap();
        assert!(ast.product.features.is_empty());
        assert!(ast.enumerations.is_empty());
    }

    #[test]
    fn second_product_is_rejected() {
        let err = parse_model("product { } product { }").unwrap_err();
        assert_eq!(err.0.len(), 1);
        assert_eq!(err.0[0].kind, ParseErrorKind::MultipleProducts);
        assert_eq!(err.0[0].message, "only one product allowed");
        assert_eq!((err.0[0].line, err.0[0].col), (1, 13));
    }

    #[test]
    fn missing_product() {
        let err = parse_model("enumeration Color { Red }").unwrap_err();
        assert_eq!(err.0[0].kind, ParseErrorKind::MissingProduct);
    }

    #[test]
    fn cardinality_defaults_to_one() {
        let ast = parse_model("product { Color color Bag bags 0..* num v 0..10 }").unwrap();
        let f = &ast.product.features;
        assert_eq!(f[0].cardinality, Cardinality::ONE);
        assert_eq!(f[1].cardinality, Cardinality { lo: 0, hi: None });
        assert_eq!(f[2].num_range, Some((0, 10)));
        assert_eq!(f[2].cardinality, Cardinality::ONE);
    }

    #[test]
    fn syntax_error_points_at_first_bad_token() {
        let err = parse_model("product {\n  Color 5\n}").unwrap_err();
        let e = &err.0[0];
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        assert_eq!((e.line, e.col), (2, 9));
        assert_eq!(e.expected, vec!["feature name".to_string()]);
    }

    #[test]
    fn precedence_climbs() {
        let ast = parse_model("product { } behavior { require a || b && c = 1 + 2 * 3 }").unwrap();
        let BehaviorKind::Require(e) = &ast.behaviors[0].kind else {
            panic!()
        };
        let Expr::Binary(BinaryOp::Or, _, rhs) = e else {
            panic!("{e:?}")
        };
        let Expr::Binary(BinaryOp::And, _, cmp) = rhs.as_ref() else {
            panic!()
        };
        let Expr::Binary(BinaryOp::Eq, _, sum) = cmp.as_ref() else {
            panic!()
        };
        let Expr::Binary(BinaryOp::Add, _, prod) = sum.as_ref() else {
            panic!()
        };
        assert!(matches!(prod.as_ref(), Expr::Binary(BinaryOp::Mul, _, _)));
    }

    #[test]
    fn subtraction_is_left_associative() {
        let ast = parse_model("product { } behavior { require a - b - c = 0 }").unwrap();
        let BehaviorKind::Require(Expr::Binary(BinaryOp::Eq, lhs, _)) = &ast.behaviors[0].kind
        else {
            panic!()
        };
        let Expr::Binary(BinaryOp::Sub, inner, _) = lhs.as_ref() else {
            panic!()
        };
        assert!(matches!(inner.as_ref(), Expr::Binary(BinaryOp::Sub, _, _)));
    }

    #[test]
    fn user_input_directives() {
        let ui = parse_user_input("set color[0] = Yellow\nadd root.carrier[0].bag[0]").unwrap();
        assert_eq!(ui.directives.len(), 2);
        match &ui.directives[0] {
            Directive::Set { target, value, .. } => {
                assert_eq!(target.variable_id(), "root.color[0]");
                assert_eq!(value, &Literal::Sym("Yellow".into()));
            }
            d => panic!("{d:?}"),
        }
        assert_eq!(
            ui.directives[1].target().variable_id(),
            "root.carrier[0].bag[0]"
        );
        assert!(parse_user_input("").unwrap().directives.is_empty());
    }

    #[test]
    fn user_input_syntax_error_has_position() {
        let err = parse_user_input("set color[0] Yellow").unwrap_err();
        assert_eq!((err.0[0].line, err.0[0].col), (1, 14));
    }
}
