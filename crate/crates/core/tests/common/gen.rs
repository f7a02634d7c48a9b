//! Random small COOM models for property tests, driven by a byte string so
//! that proptest can shrink them.

use std::fmt::Write;

pub struct Chooser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Chooser<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Chooser { bytes, pos: 0 }
    }

    /// A number in `0..n`; zero once the bytes run out.
    pub fn pick(&mut self, n: usize) -> usize {
        let b = self.bytes.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        b as usize % n.max(1)
    }

    pub fn flip(&mut self) -> bool {
        self.pick(2) == 1
    }
}

struct Attr {
    name: String,
    /// Enumeration index, `None` for `num`, `Some(usize::MAX)` for Bool.
    ty: Option<usize>,
    optional: bool,
}

const BOOL: usize = usize::MAX;

/// Source text of a random model: up to three enumerations, structures
/// nested to depth three, cardinalities at most three, and a mix of
/// Boolean, aggregate, table and structure-scoped constraints.
pub fn random_model(bytes: &[u8]) -> String {
    let mut c = Chooser::new(bytes);
    let mut out = String::new();
    let enums = 1 + c.pick(3);
    let weighted: Vec<bool> = (0..enums).map(|_| c.flip()).collect();
    let options: Vec<usize> = (0..enums).map(|_| 2 + c.pick(2)).collect();
    let depth = c.pick(4);

    let mut attrs = Vec::new();
    out.push_str("product {\n");
    for j in 0..1 + c.pick(3) {
        let ty = match c.pick(4) {
            0 => None,
            1 => Some(BOOL),
            _ => Some(c.pick(enums)),
        };
        let optional = c.pick(3) == 0;
        let card = if optional { " 0..1" } else { "" };
        let ty_name = match ty {
            None => "num".to_string(),
            Some(BOOL) => "Bool".to_string(),
            Some(e) => format!("E{e}"),
        };
        let range = if ty.is_none() { " 0..3" } else { "" };
        let _ = writeln!(out, "    {ty_name} a{j}{range}{card}");
        attrs.push(Attr {
            name: format!("a{j}"),
            ty,
            optional,
        });
    }
    let s_card = if depth > 0 {
        let lo = c.pick(2);
        let hi = (lo + c.pick(3)).clamp(1, 3);
        let _ = writeln!(out, "    S0 s {lo}..{hi}");
        Some((lo, hi))
    } else {
        None
    };
    out.push_str("}\n\n");

    // Chain S0 -> S1 -> S2, one level per unit of depth.
    let inner_enum = c.pick(enums);
    for level in 0..depth {
        let _ = writeln!(out, "structure S{level} {{");
        let _ = writeln!(out, "    E{inner_enum} e {}..{}", c.pick(2), 1 + c.pick(2));
        if c.flip() {
            out.push_str("    num m 0..2\n");
        } else {
            out.push_str("    num m 1..1\n");
        }
        if level + 1 < depth {
            let _ = writeln!(out, "    S{} t 0..{}", level + 1, 1 + c.pick(2));
        }
        out.push_str("}\n\n");
    }

    for e in 0..enums {
        let _ = writeln!(out, "enumeration E{e} {{");
        if weighted[e] {
            out.push_str("    attribute num w\n");
        }
        for k in 0..options[e] {
            if weighted[e] {
                let _ = writeln!(out, "    O{e}x{k} ({})", c.pick(4));
            } else {
                let _ = writeln!(out, "    O{e}x{k}");
            }
        }
        out.push_str("}\n\n");
    }

    let option = |c: &mut Chooser, e: usize| format!("O{e}x{}", c.pick(options[e]));
    for _ in 0..c.pick(5) {
        let a = &attrs[c.pick(attrs.len())];
        let b = &attrs[c.pick(attrs.len())];
        let line = match c.pick(8) {
            0 => match a.ty {
                None => format!("require {} >= {}", a.name, c.pick(3)),
                Some(BOOL) => format!("require {}", a.name),
                Some(e) => format!("require {} != {}", a.name, option(&mut c, e)),
            },
            1 => match (a.ty, b.ty) {
                (Some(x), Some(y)) if x == y && x != BOOL => format!("require {} != {}", a.name, b.name),
                (None, None) => format!("require {} + {} <= {}", a.name, b.name, 1 + c.pick(4)),
                _ => continue,
            },
            2 => match (a.ty, b.ty) {
                (Some(e), None) if e != BOOL => format!(
                    "condition {} = {}\n    require {} > {}",
                    a.name,
                    option(&mut c, e),
                    b.name,
                    c.pick(3)
                ),
                (Some(BOOL), _) => format!("condition {}\n    require !{}", a.name, a.name),
                _ => continue,
            },
            3 => match (a.ty, b.ty) {
                (Some(x), Some(y)) if x != BOOL && y != BOOL && a.name != b.name => {
                    let mut t = format!("combinations ({}, {})", a.name, b.name);
                    for _ in 0..1 + c.pick(3) {
                        let _ = write!(t, "\n    allow ({}, [{}, {}])", option(&mut c, x), option(&mut c, y), option(&mut c, y));
                    }
                    t
                }
                (Some(BOOL), Some(y)) if y != BOOL => format!(
                    "combinations ({}, {})\n    allow (true, {})\n    allow (false, [{}, {}])",
                    a.name,
                    b.name,
                    option(&mut c, y),
                    option(&mut c, y),
                    option(&mut c, y)
                ),
                _ => continue,
            },
            4 if s_card.is_some() => format!("require count(s) {} {}", ["<=", ">=", "="][c.pick(3)], c.pick(3)),
            5 if s_card.is_some() => match a.ty {
                None => format!("require sum(s.m) >= {}", a.name),
                _ => format!("require sum(s.m) <= {}", 1 + c.pick(3)),
            },
            6 if s_card.is_some() && weighted[inner_enum] => {
                format!("require sum(s.e.w) {} {}", ["<=", ">="][c.pick(2)], c.pick(6))
            }
            7 if depth >= 2 => format!("require count(s.t) * 2 <= {}", 1 + c.pick(4)),
            _ => match a.ty {
                None if a.optional => format!("require count({}) = 1 || count(s) = 0", a.name),
                _ => continue,
            },
        };
        if line.contains("count(s)") && s_card.is_none() {
            continue;
        }
        let _ = writeln!(out, "behavior {{\n    {line}\n}}\n");
    }
    if depth > 0 && c.flip() {
        let line = match c.pick(3) {
            0 => "require count(e) <= m".to_string(),
            1 => "condition m = 2\n    require count(e) >= 1".to_string(),
            _ if weighted[inner_enum] => "require sum(e.w) >= m".to_string(),
            _ => "require m >= 0".to_string(),
        };
        let _ = writeln!(out, "behavior S0 {{\n    {line}\n}}\n");
    }
    out
}
