use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "    ";

/// Renders an AST back to COOM source. The output reparses to an equal AST.
pub fn pretty_print(ast: &CoomAst) -> String {
    let mut out = String::new();
    out.push_str("product {\n");
    features(&mut out, &ast.product.features);
    out.push_str("}\n");

    for e in &ast.enumerations {
        let _ = writeln!(out, "\nenumeration {} {{", e.name);
        for a in &e.attributes {
            let _ = writeln!(out, "{INDENT}attribute num {}", a.name);
        }
        for o in &e.options {
            if o.values.is_empty() {
                let _ = writeln!(out, "{INDENT}{}", o.name);
            } else {
                let vals: Vec<String> = o.values.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "{INDENT}{} ({})", o.name, vals.join(", "));
            }
        }
        out.push_str("}\n");
    }

    for s in &ast.structures {
        let _ = writeln!(out, "\nstructure {} {{", s.name);
        features(&mut out, &s.features);
        out.push_str("}\n");
    }

    for b in &ast.behaviors {
        match &b.context {
            Some(ctx) => {
                let _ = writeln!(out, "\nbehavior {ctx} {{");
            }
            None => out.push_str("\nbehavior {\n"),
        }
        match &b.kind {
            BehaviorKind::ConditionalRequire {
                condition,
                requirement,
            } => {
                let _ = writeln!(out, "{INDENT}condition {}", expr_to_string(condition));
                let _ = writeln!(out, "{INDENT}require {}", expr_to_string(requirement));
            }
            BehaviorKind::Require(e) => {
                let _ = writeln!(out, "{INDENT}require {}", expr_to_string(e));
            }
            BehaviorKind::Combinations { columns, rows } => {
                let cols: Vec<String> = columns.iter().map(|c| c.to_string()).collect();
                let _ = writeln!(out, "{INDENT}combinations ({})", cols.join(", "));
                for row in rows {
                    let entries: Vec<String> = row.entries.iter().map(|e| entry(e)).collect();
                    let _ = writeln!(out, "{INDENT}allow ({})", entries.join(", "));
                }
            }
        }
        out.push_str("}\n");
    }
    out
}

fn features(out: &mut String, features: &[FeatureDecl]) {
    for f in features {
        out.push_str(INDENT);
        if let Some((lo, hi)) = f.num_range {
            let _ = write!(out, "num {} {lo}..{hi}", f.name);
        } else {
            let _ = write!(out, "{} {}", f.type_name, f.name);
        }
        if !f.cardinality.is_one() {
            let _ = write!(out, " {}", f.cardinality);
        }
        out.push('\n');
    }
}

fn entry(lits: &[Literal]) -> String {
    if lits.len() == 1 {
        lits[0].to_string()
    } else {
        let parts: Vec<String> = lits.iter().map(|l| l.to_string()).collect();
        format!("[{}]", parts.join(", "))
    }
}

/// Renders an expression with the minimal parentheses needed to reparse it.
pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 0);
    s
}

const UNARY_PREC: u8 = 6;

fn write_expr(out: &mut String, e: &Expr, min_prec: u8) {
    match e {
        Expr::Path(p) => out.push_str(&p.to_string()),
        Expr::Const(l, _) => out.push_str(&l.to_string()),
        Expr::Aggregate(f, p) => {
            let _ = write!(out, "{}({p})", f.name());
        }
        Expr::Unary(op, inner) => {
            out.push(match op {
                UnaryOp::Not => '!',
                UnaryOp::Neg => '-',
            });
            // `-5` would come back as a negative literal, and `--x` / `-(-5)`
            // as well; parenthesise anything that is not a plain atom.
            let bare = matches!(inner.as_ref(), Expr::Path(_) | Expr::Aggregate(..))
                || matches!(inner.as_ref(), Expr::Const(Literal::Sym(_) | Literal::Bool(_), _))
                || (*op == UnaryOp::Not && matches!(inner.as_ref(), Expr::Unary(UnaryOp::Not, _)));
            if bare {
                write_expr(out, inner, UNARY_PREC);
            } else {
                out.push('(');
                write_expr(out, inner, 0);
                out.push(')');
            }
        }
        Expr::Binary(op, l, r) => {
            let prec = op.precedence();
            let paren = prec < min_prec;
            if paren {
                out.push('(');
            }
            write_expr(out, l, prec);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, r, prec + 1);
            if paren {
                out.push(')');
            }
        }
    }
}
