//! Generate-and-test enumeration. Candidates are tree-shaped inclusion
//! patterns (parent-closed, prefix-ordered) with every domain value for
//! included attributes; `check_model` alone decides which survive.

use std::collections::HashMap;

use super::{check_model, Model};
use crate::space::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("{candidates} raw candidates exceed the cap of {cap}")]
pub struct CapExceeded {
    pub candidates: u128,
    pub cap: u128,
}

/// Number of candidates the oracle would test (saturating).
pub fn raw_candidate_count(space: &ConfigurationSpace) -> u128 {
    fn included(space: &ConfigurationSpace, v: VarIdx) -> u128 {
        let var = &space.variables[v];
        let mut n: u128 = match space.domain(v) {
            Some(d) if !var.derived => d.size() as u128,
            _ => 1,
        };
        let children = space.children(v);
        let mut i = 0;
        while i < children.len() {
            let set = space.variables[children[i]].set;
            let mut j = i;
            while j < children.len() && space.variables[children[j]].set == set {
                j += 1;
            }
            // Any prefix of the set may be included.
            let (mut total, mut prefix) = (1u128, 1u128);
            for &c in &children[i..j] {
                prefix = prefix.saturating_mul(included(space, c));
                total = total.saturating_add(prefix);
            }
            n = n.saturating_mul(total);
            i = j;
        }
        n
    }
    included(space, ConfigurationSpace::ROOT)
}

/// Every model of `space`, found by testing all raw candidates.
pub fn brute_force_enumerate(space: &ConfigurationSpace, cap: u128) -> Result<Vec<Model>, CapExceeded> {
    let candidates = raw_candidate_count(space);
    if candidates > cap {
        return Err(CapExceeded { candidates, cap });
    }
    // Derived enumeration attributes take the value listed for the parent's
    // option; any other value would fail the compatibility table anyway.
    let mut derived = HashMap::new();
    for c in &space.constraints {
        if let ConstraintDef::Table {
            columns,
            rows,
            internal: true,
            ..
        } = c
        {
            for (k, &col) in columns.iter().enumerate().skip(1) {
                let map: HashMap<Value, Value> = rows
                    .iter()
                    .map(|r| (r[0][0].clone(), r[k][0].clone()))
                    .collect();
                derived.insert(col, map);
            }
        }
    }
    let mut g = Gen {
        space,
        derived,
        model: Model::root_only(space),
        out: Vec::new(),
    };
    g.go(1);
    Ok(g.out)
}

struct Gen<'a> {
    space: &'a ConfigurationSpace,
    derived: HashMap<VarIdx, HashMap<Value, Value>>,
    model: Model,
    out: Vec<Model>,
}

impl Gen<'_> {
    fn go(&mut self, v: VarIdx) {
        if v == self.space.variables.len() {
            if check_model(self.space, &self.model).is_empty() {
                self.out.push(self.model.clone());
            }
            return;
        }
        let var = &self.space.variables[v];
        let parent_in = var.parent.is_none_or(|p| self.model.included[p]);
        let prev_in = match (var.set, var.index) {
            (Some(s), i) if i > 0 => self.model.included[self.space.sets[s].members[i as usize - 1]],
            _ => true,
        };
        self.model.included[v] = false;
        self.model.values[v] = None;
        self.go(v + 1);
        if !(parent_in && prev_in) {
            return;
        }
        self.model.included[v] = true;
        if let Some(map) = self.derived.get(&v) {
            let parent = var.parent.expect("derived attribute has a parent");
            self.model.values[v] = self.model.values[parent].as_ref().and_then(|o| map.get(o)).cloned();
            self.go(v + 1);
        } else if let Some(d) = self.space.domain(v) {
            for val in d.values() {
                self.model.values[v] = Some(val);
                self.go(v + 1);
            }
        } else {
            self.go(v + 1);
        }
        self.model.included[v] = false;
        self.model.values[v] = None;
    }
}
