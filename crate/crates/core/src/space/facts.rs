use std::collections::BTreeMap;

use serde_json::{json, Map, Value as Json};

use super::*;

/// One fact rendered both as a text line and as a JSON record.
struct Fact {
    /// JSON array the record goes into.
    group: &'static str,
    text: String,
    record: Json,
}

fn q(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn value_text(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Sym(s) => q(s),
    }
}

fn value_json(v: &Value) -> Json {
    match v {
        Value::Int(i) => json!(i),
        Value::Sym(s) => json!(s),
    }
}

fn fid(n: NodeId) -> String {
    format!("f{n}")
}

fn collect(space: &ConfigurationSpace, explanations: Option<&ExplanationMap>) -> Vec<Fact> {
    let mut facts = Vec::new();
    let mut push = |group, text: String, record: Json| facts.push(Fact { group, text, record });

    for p in &space.parts {
        push("part", format!("part({}).", q(p)), json!({ "type": p }));
    }
    for a in &space.attributes {
        match &a.domain {
            Domain::Discrete(values) => {
                push("discrete", format!("discrete({}).", q(&a.name)), json!({ "attribute": a.name }));
                for v in values {
                    push(
                        "domain",
                        format!("domain({},{}).", q(&a.name), value_text(v)),
                        json!({ "attribute": a.name, "value": value_json(v) }),
                    );
                }
            }
            Domain::Integer(lo, hi) => {
                push("integer", format!("integer({}).", q(&a.name)), json!({ "attribute": a.name }));
                push(
                    "range",
                    format!("range({},{lo},{hi}).", q(&a.name)),
                    json!({ "attribute": a.name, "lo": lo, "hi": hi }),
                );
            }
        }
    }
    for v in &space.variables {
        push("variable", format!("variable({}).", q(&v.id)), json!({ "id": v.id }));
        push(
            "type",
            format!("type({},{}).", q(&v.id), q(&v.type_name)),
            json!({ "id": v.id, "type": v.type_name }),
        );
        push(
            "index",
            format!("index({},{}).", q(&v.id), v.index),
            json!({ "id": v.id, "index": v.index }),
        );
        if let Some(p) = v.parent {
            let pid = &space.variables[p].id;
            push(
                "parent",
                format!("parent({},{}).", q(&v.id), q(pid)),
                json!({ "id": v.id, "parent": pid }),
            );
        }
    }
    for s in &space.sets {
        for &m in &s.members {
            let mid = &space.variables[m].id;
            push(
                "set",
                format!("set({},{}).", q(&s.id), q(mid)),
                json!({ "set": s.id, "member": mid }),
            );
        }
    }
    for c in &space.constraints {
        match c {
            ConstraintDef::LowerBound { set, lo } => {
                let sid = &space.sets[*set].id;
                push(
                    "lowerbound",
                    format!("constraint(({},{lo}),\"lowerbound\").", q(sid)),
                    json!({ "set": sid, "lo": lo }),
                );
            }
            ConstraintDef::Boolean { id, root, .. } => {
                push(
                    "constraint",
                    format!("constraint({},\"boolean\").", q(id)),
                    json!({ "id": id, "kind": "boolean" }),
                );
                push(
                    "formula",
                    format!("formula({},{}).", q(id), q(&fid(*root))),
                    json!({ "constraint": id, "formula": fid(*root) }),
                );
            }
            ConstraintDef::Table { id, columns, rows, .. } => {
                push(
                    "constraint",
                    format!("constraint({},\"table\").", q(id)),
                    json!({ "id": id, "kind": "table" }),
                );
                for (k, &col) in columns.iter().enumerate() {
                    let vid = &space.variables[col].id;
                    push(
                        "column",
                        format!("column({},{k},{}).", q(id), q(vid)),
                        json!({ "constraint": id, "column": k, "variable": vid }),
                    );
                }
                for (r, row) in rows.iter().enumerate() {
                    for (k, entry) in row.iter().enumerate() {
                        for v in entry {
                            push(
                                "allow",
                                format!("allow({},({r},{k}),{}).", q(id), value_text(v)),
                                json!({ "constraint": id, "row": r, "column": k, "value": value_json(v) }),
                            );
                        }
                    }
                }
            }
        }
    }
    for (n, node) in space.formulas.iter().enumerate() {
        let f = fid(n);
        let binary = |op: &str, a: NodeId, b: NodeId| {
            (
                format!("binary({},{},{},{}).", q(&f), q(&fid(a)), q(op), q(&fid(b))),
                json!({ "formula": f, "lhs": fid(a), "op": op, "rhs": fid(b) }),
            )
        };
        let (group, (text, record)) = match node {
            FormulaNode::Or(a, b) => ("binary", binary("||", *a, *b)),
            FormulaNode::And(a, b) => ("binary", binary("&&", *a, *b)),
            FormulaNode::Cmp(op, a, b) => ("binary", binary(op.symbol(), *a, *b)),
            FormulaNode::Arith(op, a, b) => ("binary", binary(op.symbol(), *a, *b)),
            FormulaNode::Not(a) => (
                "unary",
                (
                    format!("unary({},\"!\",{}).", q(&f), q(&fid(*a))),
                    json!({ "formula": f, "op": "!", "arg": fid(*a) }),
                ),
            ),
            FormulaNode::Var(v) => {
                let vid = &space.variables[*v].id;
                (
                    "term",
                    (
                        format!("term({},var,{}).", q(&f), q(vid)),
                        json!({ "formula": f, "kind": "var", "value": vid }),
                    ),
                )
            }
            FormulaNode::Const(c) => (
                "term",
                (
                    format!("term({},const,{}).", q(&f), value_text(c)),
                    json!({ "formula": f, "kind": "const", "value": value_json(c) }),
                ),
            ),
            FormulaNode::Fn(func) => {
                let func = &space.functions[*func];
                let sid = &space.sets[func.set].id;
                (
                    "function",
                    (
                        format!("function({},{},{}).", q(&f), q(func.kind.name()), q(sid)),
                        json!({ "formula": f, "kind": func.kind.name(), "set": sid }),
                    ),
                )
            }
        };
        push(group, text, record);
    }
    if let Some(map) = explanations {
        for (cid, text) in &map.0 {
            push(
                "configuration_explanation",
                format!("configuration_explanation({},{}).", q(cid), q(text)),
                json!({ "constraint": cid, "text": text }),
            );
        }
    }
    facts.sort_by(|a, b| a.text.cmp(&b.text));
    facts.dedup_by(|a, b| a.text == b.text);
    facts
}

/// Renders the space as sorted fact lines.
pub fn serialize_facts(space: &ConfigurationSpace) -> String {
    serialize_facts_with(space, None)
}

/// Like [`serialize_facts`], adding `configuration_explanation` facts.
pub fn serialize_facts_with(space: &ConfigurationSpace, explanations: Option<&ExplanationMap>) -> String {
    let mut out = String::new();
    for f in collect(space, explanations) {
        out.push_str(&f.text);
        out.push('\n');
    }
    out
}

/// JSON interchange form: one array of records per predicate, each array in
/// the same order as the corresponding fact lines.
pub fn space_to_json(space: &ConfigurationSpace, explanations: Option<&ExplanationMap>) -> Json {
    let mut groups: BTreeMap<&'static str, Vec<Json>> = BTreeMap::new();
    for g in GROUPS {
        groups.insert(g, Vec::new());
    }
    for f in collect(space, explanations) {
        groups.entry(f.group).or_default().push(f.record);
    }
    let mut obj = Map::new();
    for (g, records) in groups {
        obj.insert(g.to_string(), Json::Array(records));
    }
    Json::Object(obj)
}

/// Every array present in the JSON interchange document.
pub const GROUPS: [&str; 20] = [
    "allow",
    "binary",
    "column",
    "configuration_explanation",
    "constraint",
    "discrete",
    "domain",
    "formula",
    "function",
    "index",
    "integer",
    "lowerbound",
    "parent",
    "part",
    "range",
    "set",
    "term",
    "type",
    "unary",
    "variable",
];
