//! Compiled constraints and the propagation fixpoint.
//!
//! Every rule only narrows what a variable could be *if it is included*, so
//! domains of undecided variables may shrink freely; an attribute whose
//! domain empties can only be excluded.

use std::collections::{HashMap, HashSet, VecDeque};

use super::domain::{DomKind, State, Tri};
use crate::space::*;

#[derive(Debug)]
pub(super) struct Conflict;

type Res<T = ()> = Result<T, Conflict>;

#[derive(Debug, Clone, Copy)]
pub(super) enum Prop {
    Card(usize),
    Bool(usize),
    Table(usize),
}

#[derive(Debug)]
pub(super) struct CardSet {
    pub parent: Option<VarIdx>,
    pub members: Vec<VarIdx>,
    pub lo: usize,
}

#[derive(Debug)]
pub(super) struct BoolC {
    pub root: usize,
    /// Variables outside aggregates; the constraint is vacuous when one is excluded.
    pub leaves: Vec<VarIdx>,
}

#[derive(Debug)]
pub(super) struct TableC {
    pub columns: Vec<VarIdx>,
    pub rows: Vec<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone)]
pub(super) enum CNode {
    Or(usize, usize),
    And(usize, usize),
    Not(usize),
    Cmp(CmpOp, usize, usize),
    Arith(ArithOp, usize, usize),
    Var(VarIdx),
    Const(i64),
    Count(Vec<VarIdx>),
    Sum(Vec<VarIdx>),
}

#[derive(Debug)]
pub(super) struct Compiled {
    pub kinds: Vec<DomKind>,
    /// True for variables whose values are interned symbols.
    pub symbolic: Vec<bool>,
    pub syms: HashMap<String, i64>,
    pub sym_names: Vec<String>,
    pub cards: Vec<CardSet>,
    pub bools: Vec<BoolC>,
    pub tables: Vec<TableC>,
    pub nodes: Vec<CNode>,
    pub props: Vec<Prop>,
    pub watch: Vec<Vec<usize>>,
}

impl Compiled {
    pub fn new(space: &ConfigurationSpace, disabled: &HashSet<String>) -> Self {
        let mut c = Compiled {
            kinds: Vec::with_capacity(space.variables.len()),
            symbolic: Vec::with_capacity(space.variables.len()),
            syms: HashMap::new(),
            sym_names: Vec::new(),
            cards: Vec::new(),
            bools: Vec::new(),
            tables: Vec::new(),
            nodes: Vec::new(),
            props: Vec::new(),
            watch: vec![Vec::new(); space.variables.len()],
        };
        let mut off = 0;
        for v in 0..space.variables.len() {
            let (kind, symbolic) = match space.domain(v) {
                None => (DomKind::Part, false),
                Some(Domain::Integer(lo, hi)) => (DomKind::Range { lo: *lo, hi: *hi }, false),
                Some(Domain::Discrete(vals)) => {
                    let symbolic = matches!(vals.first(), Some(Value::Sym(_)));
                    let vals: Vec<i64> = vals.iter().map(|x| c.code(x)).collect();
                    let k = DomKind::Disc { off, vals };
                    if let DomKind::Disc { vals, .. } = &k {
                        off += vals.len();
                    }
                    (k, symbolic)
                }
            };
            c.kinds.push(kind);
            c.symbolic.push(symbolic);
        }

        for con in &space.constraints {
            match con {
                ConstraintDef::LowerBound { set, lo } => {
                    let s = &space.sets[*set];
                    let parent = s.members.first().and_then(|&m| space.variables[m].parent);
                    c.cards.push(CardSet {
                        parent,
                        members: s.members.clone(),
                        lo: *lo as usize,
                    });
                    let p = c.add_prop(Prop::Card(c.cards.len() - 1));
                    c.watch_all(p, parent.iter().chain(&s.members).copied());
                }
                ConstraintDef::Boolean { id, root, .. } => {
                    if disabled.contains(id) {
                        continue;
                    }
                    let mut watched = Vec::new();
                    let root = c.node(space, *root, &mut watched);
                    c.bools.push(BoolC {
                        root,
                        leaves: space.formula_vars(*root_of(con)),
                    });
                    let p = c.add_prop(Prop::Bool(c.bools.len() - 1));
                    c.watch_all(p, watched);
                }
                ConstraintDef::Table { id, columns, rows, .. } => {
                    if disabled.contains(id) {
                        continue;
                    }
                    let rows = rows
                        .iter()
                        .map(|r| r.iter().map(|e| e.iter().map(|x| c.code(x)).collect()).collect())
                        .collect();
                    c.tables.push(TableC {
                        columns: columns.clone(),
                        rows,
                    });
                    let p = c.add_prop(Prop::Table(c.tables.len() - 1));
                    c.watch_all(p, columns.iter().copied());
                }
            }
        }
        c
    }

    fn add_prop(&mut self, p: Prop) -> usize {
        self.props.push(p);
        self.props.len() - 1
    }

    fn watch_all(&mut self, p: usize, vars: impl IntoIterator<Item = VarIdx>) {
        for v in vars {
            if self.watch[v].last() != Some(&p) {
                self.watch[v].push(p);
            }
        }
    }

    pub fn code(&mut self, v: &Value) -> i64 {
        match v {
            Value::Int(i) => *i,
            Value::Sym(s) => {
                if let Some(&c) = self.syms.get(s) {
                    return c;
                }
                let c = self.sym_names.len() as i64;
                self.syms.insert(s.clone(), c);
                self.sym_names.push(s.clone());
                c
            }
        }
    }

    /// Code of `v` for variable `var`, or `None` if it cannot be in its domain.
    pub fn code_for(&self, var: VarIdx, v: &Value) -> Option<i64> {
        match (v, self.symbolic[var]) {
            (Value::Int(i), false) => Some(*i),
            (Value::Sym(s), true) => self.syms.get(s).copied(),
            _ => None,
        }
    }

    pub fn decode(&self, var: VarIdx, x: i64) -> Value {
        if self.symbolic[var] {
            Value::Sym(self.sym_names[x as usize].clone())
        } else {
            Value::Int(x)
        }
    }

    fn node(&mut self, space: &ConfigurationSpace, n: NodeId, watched: &mut Vec<VarIdx>) -> usize {
        let node = match &space.formulas[n] {
            FormulaNode::Or(a, b) => CNode::Or(self.node(space, *a, watched), self.node(space, *b, watched)),
            FormulaNode::And(a, b) => CNode::And(self.node(space, *a, watched), self.node(space, *b, watched)),
            FormulaNode::Not(a) => CNode::Not(self.node(space, *a, watched)),
            FormulaNode::Cmp(op, a, b) => {
                CNode::Cmp(*op, self.node(space, *a, watched), self.node(space, *b, watched))
            }
            FormulaNode::Arith(op, a, b) => {
                CNode::Arith(*op, self.node(space, *a, watched), self.node(space, *b, watched))
            }
            FormulaNode::Var(v) => {
                watched.push(*v);
                CNode::Var(*v)
            }
            FormulaNode::Const(x) => CNode::Const(self.code(x)),
            FormulaNode::Fn(f) => {
                let f = &space.functions[*f];
                let members = space.sets[f.set].members.clone();
                watched.extend_from_slice(&members);
                match f.kind {
                    FunctionKind::Count => CNode::Count(members),
                    FunctionKind::Sum => CNode::Sum(members),
                }
            }
        };
        self.nodes.push(node);
        self.nodes.len() - 1
    }
}

fn root_of(c: &ConstraintDef) -> &NodeId {
    match c {
        ConstraintDef::Boolean { root, .. } => root,
        _ => unreachable!(),
    }
}

/// Which variables a Boolean rule may narrow.
#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Full,
    Only(VarIdx),
}

pub(super) struct Propagator<'c> {
    c: &'c Compiled,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
}

impl<'c> Propagator<'c> {
    pub fn new(c: &'c Compiled) -> Self {
        Propagator {
            c,
            queue: VecDeque::new(),
            queued: vec![false; c.props.len()],
        }
    }

    fn notify(&mut self, v: VarIdx) {
        for &p in &self.c.watch[v] {
            if !self.queued[p] {
                self.queued[p] = true;
                self.queue.push_back(p);
            }
        }
    }

    pub fn set_incl(&mut self, st: &mut State, v: VarIdx, val: bool) -> Res {
        let want = if val { Tri::True } else { Tri::False };
        match st.incl[v] {
            t if t == want => Ok(()),
            Tri::Unknown => {
                if val && st.is_empty(v, &self.c.kinds[v]) {
                    return Err(Conflict);
                }
                st.incl[v] = want;
                self.notify(v);
                Ok(())
            }
            _ => Err(Conflict),
        }
    }

    /// Bookkeeping after a domain change.
    pub fn changed(&mut self, st: &mut State, v: VarIdx) -> Res {
        if st.is_empty(v, &self.c.kinds[v]) {
            match st.incl[v] {
                Tri::True => return Err(Conflict),
                Tri::Unknown => {
                    st.incl[v] = Tri::False;
                }
                Tri::False => {}
            }
        }
        self.notify(v);
        Ok(())
    }

    pub fn fix(&mut self, st: &mut State, v: VarIdx, x: i64) -> Res {
        if st.fix(v, &self.c.kinds[v], x) {
            self.changed(st, v)?;
        }
        Ok(())
    }

    pub fn remove(&mut self, st: &mut State, v: VarIdx, x: i64) -> Res {
        if st.remove(v, &self.c.kinds[v], x) {
            self.changed(st, v)?;
        }
        Ok(())
    }

    pub fn enqueue_all(&mut self) {
        for p in 0..self.c.props.len() {
            if !self.queued[p] {
                self.queued[p] = true;
                self.queue.push_back(p);
            }
        }
    }

    /// Runs queued rules until nothing changes.
    pub fn run(&mut self, st: &mut State) -> Res {
        while let Some(p) = self.queue.pop_front() {
            self.queued[p] = false;
            match self.c.props[p] {
                Prop::Card(i) => self.card(st, i)?,
                Prop::Bool(i) => self.boolean(st, i)?,
                Prop::Table(i) => self.table(st, i)?,
            }
        }
        Ok(())
    }

    fn card(&mut self, st: &mut State, i: usize) -> Res {
        let c = self.c;
        let set = &c.cards[i];
        let parent = set.parent.map_or(Tri::True, |p| st.incl[p]);
        for (k, &m) in set.members.iter().enumerate() {
            if parent == Tri::False || (k > 0 && st.incl[set.members[k - 1]] == Tri::False) {
                self.set_incl(st, m, false)?;
            }
        }
        for (k, &m) in set.members.iter().enumerate().rev() {
            if st.incl[m] == Tri::True {
                if let Some(p) = set.parent {
                    self.set_incl(st, p, true)?;
                }
                if k > 0 {
                    self.set_incl(st, set.members[k - 1], true)?;
                }
            }
        }
        let lo = set.lo.min(set.members.len());
        if set.parent.map_or(Tri::True, |p| st.incl[p]) == Tri::True {
            for &m in &set.members[..lo] {
                self.set_incl(st, m, true)?;
            }
        }
        if set.lo > set.members.len() || set.members[..lo].iter().any(|&m| st.incl[m] == Tri::False) {
            match set.parent {
                Some(p) => self.set_incl(st, p, false)?,
                None => return Err(Conflict),
            }
        }
        Ok(())
    }

    fn table(&mut self, st: &mut State, i: usize) -> Res {
        let c = self.c;
        let t = &c.tables[i];
        if t.columns.iter().any(|&v| st.incl[v] == Tri::False) {
            return Ok(());
        }
        let unknown: Vec<usize> = (0..t.columns.len())
            .filter(|&k| st.incl[t.columns[k]] == Tri::Unknown)
            .collect();
        if unknown.len() >= 2 {
            return Ok(());
        }
        let compatible: Vec<&Vec<Vec<i64>>> = t
            .rows
            .iter()
            .filter(|row| {
                row.iter().zip(&t.columns).all(|(entry, &v)| {
                    entry.iter().any(|&x| st.contains(v, &c.kinds[v], x))
                })
            })
            .collect();
        let targets: Vec<usize> = match unknown.first() {
            Some(&u) => vec![u],
            None => {
                if compatible.is_empty() {
                    return Err(Conflict);
                }
                (0..t.columns.len()).collect()
            }
        };
        for k in targets {
            let v = t.columns[k];
            let supported: HashSet<i64> = compatible.iter().flat_map(|r| r[k].iter().copied()).collect();
            if st.retain(v, &c.kinds[v], |x| supported.contains(&x)) {
                self.changed(st, v)?;
            }
        }
        Ok(())
    }

    fn boolean(&mut self, st: &mut State, i: usize) -> Res {
        let b = &self.c.bools[i];
        if b.leaves.iter().any(|&v| st.incl[v] == Tri::False) {
            return Ok(());
        }
        let mut unknown = b.leaves.iter().filter(|&&v| st.incl[v] == Tri::Unknown);
        let mode = match (unknown.next(), unknown.next()) {
            (None, _) => Mode::Full,
            (Some(&u), None) => Mode::Only(u),
            _ => return Ok(()),
        };
        match mode {
            Mode::Full => self.require(st, b.root, true, mode),
            Mode::Only(u) => {
                // If `u` were included the formula would be defined, so it
                // must be able to hold; otherwise `u` stays out.
                let mut trial = st.clone();
                let mut sub = Propagator {
                    c: self.c,
                    queue: VecDeque::new(),
                    queued: vec![false; self.c.props.len()],
                };
                let ok = sub.require(&mut trial, b.root, true, mode).is_ok()
                    && !trial.is_empty(u, &self.c.kinds[u]);
                if !ok {
                    return self.set_incl(st, u, false);
                }
                if trial.values_differ(st, u, &self.c.kinds[u]) {
                    st.copy_domain(&trial, u, &self.c.kinds[u]);
                    self.notify(u);
                }
                Ok(())
            }
        }
    }

    /// True when no rule on `v`'s value can fail any more: every Boolean
    /// constraint watching it is vacuous or cannot become false, and every
    /// table accepts each of its values. The value of `v` is then
    /// irrelevant to whether the rest of the search succeeds.
    pub fn settled(&self, st: &State, v: VarIdx) -> bool {
        let c = self.c;
        c.watch[v].iter().all(|&p| match c.props[p] {
            Prop::Card(_) => true,
            Prop::Bool(i) => {
                let b = &c.bools[i];
                b.leaves.iter().any(|&l| st.incl[l] == Tri::False) || !self.possible(st, b.root).1
            }
            Prop::Table(i) => {
                let t = &c.tables[i];
                if t.columns.iter().any(|&w| st.incl[w] == Tri::False) {
                    return true;
                }
                let mut fixed = Vec::with_capacity(t.columns.len());
                for &w in &t.columns {
                    if w == v {
                        fixed.push(None);
                    } else {
                        match st.singleton(w, &c.kinds[w]) {
                            Some(x) => fixed.push(Some(x)),
                            None => return false,
                        }
                    }
                }
                let k = t.columns.iter().position(|&w| w == v).expect("watched column");
                st.values(v, &c.kinds[v]).into_iter().all(|x| {
                    t.rows.iter().any(|row| {
                        row.iter().zip(&fixed).enumerate().all(|(j, (entry, f))| {
                            let want = if j == k { x } else { f.expect("fixed column") };
                            entry.contains(&want)
                        })
                    })
                })
            }
        })
    }

    fn writable(mode: Mode, v: VarIdx) -> bool {
        match mode {
            Mode::Full => true,
            Mode::Only(u) => u == v,
        }
    }

    /// Interval of a numeric term.
    fn bounds(&self, st: &State, n: usize) -> (i64, i64) {
        let c = self.c;
        match &c.nodes[n] {
            CNode::Var(v) => (
                st.min(*v, &c.kinds[*v]).unwrap_or(0),
                st.max(*v, &c.kinds[*v]).unwrap_or(0),
            ),
            CNode::Const(x) => (*x, *x),
            CNode::Arith(op, a, b) => {
                let (al, ah) = self.bounds(st, *a);
                let (bl, bh) = self.bounds(st, *b);
                match op {
                    ArithOp::Add => (al.saturating_add(bl), ah.saturating_add(bh)),
                    ArithOp::Sub => (al.saturating_sub(bh), ah.saturating_sub(bl)),
                    ArithOp::Mul => {
                        let p = [
                            al.saturating_mul(bl),
                            al.saturating_mul(bh),
                            ah.saturating_mul(bl),
                            ah.saturating_mul(bh),
                        ];
                        (*p.iter().min().unwrap(), *p.iter().max().unwrap())
                    }
                }
            }
            CNode::Count(members) => {
                let lo = members.iter().filter(|&&m| st.incl[m] == Tri::True).count() as i64;
                let hi = members.iter().filter(|&&m| st.incl[m] != Tri::False).count() as i64;
                (lo, hi)
            }
            CNode::Sum(members) => {
                let (mut lo, mut hi) = (0i64, 0i64);
                for &m in members {
                    let (l, h) = self.contribution(st, m);
                    lo = lo.saturating_add(l);
                    hi = hi.saturating_add(h);
                }
                (lo, hi)
            }
            _ => (0, 0),
        }
    }

    /// Every value a numeric term can take, sorted, when that set is small.
    fn value_set(&self, st: &State, n: usize) -> Option<Vec<i64>> {
        let c = self.c;
        match &c.nodes[n] {
            CNode::Var(v) => st.values_if_small(*v, &c.kinds[*v]),
            CNode::Const(x) => Some(vec![*x]),
            CNode::Arith(op, a, b) => {
                let xs = self.value_set(st, *a)?;
                let ys = self.value_set(st, *b)?;
                combine(&xs, &ys, |x, y| match op {
                    ArithOp::Add => x.saturating_add(y),
                    ArithOp::Sub => x.saturating_sub(y),
                    ArithOp::Mul => x.saturating_mul(y),
                })
            }
            CNode::Count(_) => {
                let (lo, hi) = self.bounds(st, n);
                (hi - lo <= SET_CAP as i64).then(|| (lo..=hi).collect())
            }
            CNode::Sum(members) => {
                let mut acc = vec![0];
                for &m in members {
                    let k = &c.kinds[m];
                    let mut part = match st.incl[m] {
                        Tri::False => continue,
                        _ => st.values_if_small(m, k)?,
                    };
                    if st.incl[m] == Tri::Unknown {
                        part.push(0);
                        part.sort_unstable();
                        part.dedup();
                    }
                    acc = combine(&acc, &part, i64::saturating_add)?;
                }
                Some(acc)
            }
            _ => None,
        }
    }

    /// Possible contribution of one member to a sum.
    fn contribution(&self, st: &State, m: VarIdx) -> (i64, i64) {
        let k = &self.c.kinds[m];
        match st.incl[m] {
            Tri::False => (0, 0),
            Tri::True => (st.min(m, k).unwrap_or(0), st.max(m, k).unwrap_or(0)),
            Tri::Unknown => match (st.min(m, k), st.max(m, k)) {
                (Some(l), Some(h)) => (l.min(0), h.max(0)),
                _ => (0, 0),
            },
        }
    }

    /// Whether the formula can still come out true / false.
    fn possible(&self, st: &State, n: usize) -> (bool, bool) {
        match &self.c.nodes[n] {
            CNode::Or(a, b) => {
                let (at, af) = self.possible(st, *a);
                let (bt, bf) = self.possible(st, *b);
                (at || bt, af && bf)
            }
            CNode::And(a, b) => {
                let (at, af) = self.possible(st, *a);
                let (bt, bf) = self.possible(st, *b);
                (at && bt, af || bf)
            }
            CNode::Not(a) => {
                let (t, f) = self.possible(st, *a);
                (f, t)
            }
            CNode::Cmp(op, a, b) => (
                self.cmp_possible(st, *op, *a, *b),
                self.cmp_possible(st, op.negate(), *a, *b),
            ),
            _ => (true, true),
        }
    }

    fn cmp_possible(&self, st: &State, op: CmpOp, a: usize, b: usize) -> bool {
        let (al, ah) = self.bounds(st, a);
        let (bl, bh) = self.bounds(st, b);
        match op {
            CmpOp::Eq => {
                if al > bh || bl > ah {
                    return false;
                }
                if al == ah && bl == bh {
                    return true;
                }
                match (self.value_set(st, a), self.value_set(st, b)) {
                    (Some(xs), Some(ys)) => intersects(&xs, &ys),
                    _ => true,
                }
            }
            CmpOp::Ne => !(al == ah && bl == bh && al == bl),
            CmpOp::Lt => al < bh,
            CmpOp::Le => al <= bh,
            CmpOp::Gt => ah > bl,
            CmpOp::Ge => ah >= bl,
        }
    }

    fn require(&mut self, st: &mut State, n: usize, want: bool, mode: Mode) -> Res {
        match self.c.nodes[n].clone() {
            CNode::Not(a) => self.require(st, a, !want, mode),
            CNode::And(a, b) | CNode::Or(a, b) => {
                let is_and = matches!(self.c.nodes[n], CNode::And(..));
                if is_and == want {
                    // Conjunction of both sides.
                    self.require(st, a, want, mode)?;
                    self.require(st, b, want, mode)
                } else {
                    // One side suffices; propagate only when the other is ruled out.
                    let pa = self.possible(st, a);
                    let pb = self.possible(st, b);
                    let can = |p: (bool, bool)| if want { p.0 } else { p.1 };
                    match (can(pa), can(pb)) {
                        (false, false) => Err(Conflict),
                        (false, true) => self.require(st, b, want, mode),
                        (true, false) => self.require(st, a, want, mode),
                        (true, true) => Ok(()),
                    }
                }
            }
            CNode::Cmp(op, a, b) => {
                let op = if want { op } else { op.negate() };
                self.enforce(st, op, a, b, mode)
            }
            _ => Ok(()),
        }
    }

    fn enforce(&mut self, st: &mut State, op: CmpOp, a: usize, b: usize, mode: Mode) -> Res {
        if !self.cmp_possible(st, op, a, b) {
            return Err(Conflict);
        }
        let c = self.c;
        let (al, ah) = self.bounds(st, a);
        let (bl, bh) = self.bounds(st, b);
        match op {
            CmpOp::Eq => {
                match (&c.nodes[a], &c.nodes[b]) {
                    (CNode::Var(x), _) if bl == bh && Self::writable(mode, *x) => {
                        return self.fix(st, *x, bl)
                    }
                    (_, CNode::Var(y)) if al == ah && Self::writable(mode, *y) => {
                        return self.fix(st, *y, al)
                    }
                    _ => {}
                }
                // Filter a variable side by every value the other side can take.
                for (p, q) in [(a, b), (b, a)] {
                    let CNode::Var(x) = c.nodes[p] else { continue };
                    if !Self::writable(mode, x) {
                        continue;
                    }
                    if let Some(qs) = self.value_set(st, q) {
                        if st.retain(x, &c.kinds[x], |v| qs.binary_search(&v).is_ok()) {
                            self.changed(st, x)?;
                        }
                    }
                }
                self.at_most(st, a, bh, mode)?;
                self.at_least(st, a, bl, mode)?;
                self.at_most(st, b, ah, mode)?;
                self.at_least(st, b, al, mode)
            }
            CmpOp::Ne => match (&c.nodes[a], &c.nodes[b]) {
                (CNode::Var(x), _) if bl == bh && Self::writable(mode, *x) => self.remove(st, *x, bl),
                (_, CNode::Var(y)) if al == ah && Self::writable(mode, *y) => self.remove(st, *y, al),
                _ => Ok(()),
            },
            CmpOp::Le => {
                self.at_most(st, a, bh, mode)?;
                self.at_least(st, b, al, mode)
            }
            CmpOp::Lt => {
                self.at_most(st, a, bh.saturating_sub(1), mode)?;
                self.at_least(st, b, al.saturating_add(1), mode)
            }
            CmpOp::Ge => self.enforce(st, CmpOp::Le, b, a, mode),
            CmpOp::Gt => self.enforce(st, CmpOp::Lt, b, a, mode),
        }
    }

    /// Narrows term `n` to values `<= m`.
    fn at_most(&mut self, st: &mut State, n: usize, m: i64, mode: Mode) -> Res {
        let c = self.c;
        match &c.nodes[n] {
            CNode::Var(v) => {
                let v = *v;
                if Self::writable(mode, v) {
                    if st.at_most(v, &c.kinds[v], m) {
                        self.changed(st, v)?;
                    }
                    if st.is_empty(v, &c.kinds[v]) {
                        return Err(Conflict);
                    }
                    Ok(())
                } else if st.min(v, &c.kinds[v]).is_some_and(|x| x > m) {
                    Err(Conflict)
                } else {
                    Ok(())
                }
            }
            CNode::Const(x) => {
                if *x > m {
                    Err(Conflict)
                } else {
                    Ok(())
                }
            }
            CNode::Arith(op, a, b) => {
                let (a, b) = (*a, *b);
                let (bl, bh) = self.bounds(st, b);
                match op {
                    ArithOp::Add => {
                        self.at_most(st, a, m.saturating_sub(bl), mode)?;
                        let (al, _) = self.bounds(st, a);
                        self.at_most(st, b, m.saturating_sub(al), mode)
                    }
                    ArithOp::Sub => {
                        self.at_most(st, a, m.saturating_add(bh), mode)?;
                        let (al, _) = self.bounds(st, a);
                        self.at_least(st, b, al.saturating_sub(m), mode)
                    }
                    ArithOp::Mul => self.scale(st, a, b, m, true, mode),
                }
            }
            CNode::Count(members) => {
                let (lo, _) = self.bounds(st, n);
                if lo > m {
                    return Err(Conflict);
                }
                if mode == Mode::Full && lo == m {
                    for &v in members {
                        if st.incl[v] == Tri::Unknown {
                            self.set_incl(st, v, false)?;
                        }
                    }
                }
                Ok(())
            }
            CNode::Sum(members) => {
                let (lo, _) = self.bounds(st, n);
                if lo > m {
                    return Err(Conflict);
                }
                if mode != Mode::Full {
                    return Ok(());
                }
                for &v in members {
                    if st.incl[v] == Tri::False {
                        continue;
                    }
                    let (cl, _) = self.contribution(st, v);
                    let allowed = m.saturating_sub(lo - cl);
                    if st.incl[v] == Tri::Unknown && allowed < 0 {
                        self.set_incl(st, v, true)?;
                    }
                    if st.at_most(v, &c.kinds[v], allowed) {
                        self.changed(st, v)?;
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Narrows term `n` to values `>= m`.
    fn at_least(&mut self, st: &mut State, n: usize, m: i64, mode: Mode) -> Res {
        let c = self.c;
        match &c.nodes[n] {
            CNode::Var(v) => {
                let v = *v;
                if Self::writable(mode, v) {
                    if st.at_least(v, &c.kinds[v], m) {
                        self.changed(st, v)?;
                    }
                    if st.is_empty(v, &c.kinds[v]) {
                        return Err(Conflict);
                    }
                    Ok(())
                } else if st.max(v, &c.kinds[v]).is_some_and(|x| x < m) {
                    Err(Conflict)
                } else {
                    Ok(())
                }
            }
            CNode::Const(x) => {
                if *x < m {
                    Err(Conflict)
                } else {
                    Ok(())
                }
            }
            CNode::Arith(op, a, b) => {
                let (a, b) = (*a, *b);
                let (bl, bh) = self.bounds(st, b);
                match op {
                    ArithOp::Add => {
                        self.at_least(st, a, m.saturating_sub(bh), mode)?;
                        let (_, ah) = self.bounds(st, a);
                        self.at_least(st, b, m.saturating_sub(ah), mode)
                    }
                    ArithOp::Sub => {
                        self.at_least(st, a, m.saturating_add(bl), mode)?;
                        let (_, ah) = self.bounds(st, a);
                        self.at_most(st, b, ah.saturating_sub(m), mode)
                    }
                    ArithOp::Mul => self.scale(st, a, b, m, false, mode),
                }
            }
            CNode::Count(members) => {
                let (_, hi) = self.bounds(st, n);
                if hi < m {
                    return Err(Conflict);
                }
                if mode == Mode::Full && hi == m {
                    for &v in members {
                        if st.incl[v] == Tri::Unknown {
                            self.set_incl(st, v, true)?;
                        }
                    }
                }
                Ok(())
            }
            CNode::Sum(members) => {
                let (_, hi) = self.bounds(st, n);
                if hi < m {
                    return Err(Conflict);
                }
                if mode != Mode::Full {
                    return Ok(());
                }
                for &v in members {
                    if st.incl[v] == Tri::False {
                        continue;
                    }
                    let (_, ch) = self.contribution(st, v);
                    let needed = m.saturating_sub(hi - ch);
                    if st.incl[v] == Tri::Unknown && needed > 0 {
                        self.set_incl(st, v, true)?;
                    }
                    if st.at_least(v, &c.kinds[v], needed) {
                        self.changed(st, v)?;
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `a * b <= m` (or `>= m`) where one factor is constant.
    fn scale(&mut self, st: &mut State, a: usize, b: usize, m: i64, upper: bool, mode: Mode) -> Res {
        let (al, ah) = self.bounds(st, a);
        let (bl, bh) = self.bounds(st, b);
        let (k, t) = if al == ah {
            (al, b)
        } else if bl == bh {
            (bl, a)
        } else {
            return Ok(());
        };
        if k == 0 {
            let ok = if upper { 0 <= m } else { 0 >= m };
            return if ok { Ok(()) } else { Err(Conflict) };
        }
        match (upper, k > 0) {
            (true, true) => self.at_most(st, t, floor_div(m, k), mode),
            (true, false) => self.at_least(st, t, ceil_div(m, k), mode),
            (false, true) => self.at_least(st, t, ceil_div(m, k), mode),
            (false, false) => self.at_most(st, t, floor_div(m, k), mode),
        }
    }
}

const SET_CAP: usize = 512;

/// Pairwise combination of two sorted sets, or `None` past [`SET_CAP`].
fn combine(xs: &[i64], ys: &[i64], f: impl Fn(i64, i64) -> i64) -> Option<Vec<i64>> {
    if xs.len().saturating_mul(ys.len()) > SET_CAP * 64 {
        return None;
    }
    let mut out: Vec<i64> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).map(|(x, y)| f(x, y)).collect();
    out.sort_unstable();
    out.dedup();
    (out.len() <= SET_CAP).then_some(out)
}

fn intersects(xs: &[i64], ys: &[i64]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < xs.len() && j < ys.len() {
        match xs[i].cmp(&ys[j]) {
            std::cmp::Ordering::Equal => return true,
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
        }
    }
    false
}

fn floor_div(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}

impl State {
    /// Domain values when the domain is small enough to list.
    pub(super) fn values_if_small(&self, v: usize, k: &DomKind) -> Option<Vec<i64>> {
        match k {
            DomKind::Part => None,
            DomKind::Disc { .. } => Some(self.values(v, k)),
            DomKind::Range { .. } => {
                if self.hi[v].saturating_sub(self.lo[v]) <= 256 {
                    Some(self.values(v, k))
                } else {
                    None
                }
            }
        }
    }

    pub(super) fn values_differ(&self, other: &State, v: usize, k: &DomKind) -> bool {
        match k {
            DomKind::Part => false,
            DomKind::Disc { .. } => self.values(v, k) != other.values(v, k),
            DomKind::Range { .. } => {
                self.lo[v] != other.lo[v] || self.hi[v] != other.hi[v] || self.holes[v] != other.holes[v]
            }
        }
    }

    pub(super) fn copy_domain(&mut self, from: &State, v: usize, k: &DomKind) {
        match k {
            DomKind::Part => {}
            DomKind::Disc { off, vals } => {
                for i in *off..off + vals.len() {
                    let mask = 1u64 << (i % 64);
                    self.bits[i / 64] = (self.bits[i / 64] & !mask) | (from.bits[i / 64] & mask);
                }
            }
            DomKind::Range { .. } => {
                self.lo[v] = from.lo[v];
                self.hi[v] = from.hi[v];
                self.holes[v] = from.holes[v].clone();
            }
        }
    }
}
