//! Search state: inclusion flags plus a domain per attribute variable.
//! Discrete domains are bitsets over the declared value list; integer
//! domains are bounds with a sorted list of holes.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Tri {
    Unknown,
    True,
    False,
}

#[derive(Debug, Clone)]
pub(super) enum DomKind {
    Part,
    /// `vals[i]` is the (interned) value of bit `i`.
    Disc { off: usize, vals: Vec<i64> },
    Range { lo: i64, hi: i64 },
}

#[derive(Debug, Clone)]
pub(super) struct State {
    pub incl: Vec<Tri>,
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    pub bits: Vec<u64>,
    pub holes: Vec<Vec<i64>>,
}

fn bit(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

fn clear(bits: &mut [u64], i: usize) {
    bits[i / 64] &= !(1u64 << (i % 64));
}

impl State {
    pub fn new(kinds: &[DomKind]) -> Self {
        let n = kinds.len();
        let mut s = State {
            incl: vec![Tri::Unknown; n],
            lo: vec![0; n],
            hi: vec![0; n],
            bits: Vec::new(),
            holes: vec![Vec::new(); n],
        };
        for (v, k) in kinds.iter().enumerate() {
            match k {
                DomKind::Part => {}
                DomKind::Disc { off, vals } => {
                    let words = (off + vals.len()).div_ceil(64);
                    if s.bits.len() < words {
                        s.bits.resize(words, 0);
                    }
                    for j in *off..off + vals.len() {
                        s.bits[j / 64] |= 1u64 << (j % 64);
                    }
                }
                DomKind::Range { lo, hi } => {
                    s.lo[v] = *lo;
                    s.hi[v] = *hi;
                }
            }
        }
        s
    }

    pub fn contains(&self, v: usize, k: &DomKind, x: i64) -> bool {
        match k {
            DomKind::Part => false,
            DomKind::Disc { off, vals } => vals
                .iter()
                .enumerate()
                .any(|(i, &y)| y == x && bit(&self.bits, off + i)),
            DomKind::Range { .. } => {
                self.lo[v] <= x && x <= self.hi[v] && self.holes[v].binary_search(&x).is_err()
            }
        }
    }

    pub fn is_empty(&self, v: usize, k: &DomKind) -> bool {
        match k {
            DomKind::Part => false,
            DomKind::Disc { off, vals } => (0..vals.len()).all(|i| !bit(&self.bits, off + i)),
            DomKind::Range { .. } => self.lo[v] > self.hi[v],
        }
    }

    /// Values still in the domain, in declaration order.
    pub fn values(&self, v: usize, k: &DomKind) -> Vec<i64> {
        match k {
            DomKind::Part => Vec::new(),
            DomKind::Disc { off, vals } => vals
                .iter()
                .enumerate()
                .filter(|(i, _)| bit(&self.bits, off + i))
                .map(|(_, &x)| x)
                .collect(),
            DomKind::Range { .. } => (self.lo[v]..=self.hi[v])
                .filter(|x| self.holes[v].binary_search(x).is_err())
                .collect(),
        }
    }

    pub fn singleton(&self, v: usize, k: &DomKind) -> Option<i64> {
        match k {
            DomKind::Part => None,
            DomKind::Disc { off, vals } => {
                let mut found = None;
                for (i, &x) in vals.iter().enumerate() {
                    if bit(&self.bits, off + i) {
                        if found.is_some() {
                            return None;
                        }
                        found = Some(x);
                    }
                }
                found
            }
            DomKind::Range { .. } => (self.lo[v] == self.hi[v]).then_some(self.lo[v]),
        }
    }

    pub fn min(&self, v: usize, k: &DomKind) -> Option<i64> {
        match k {
            DomKind::Part => None,
            DomKind::Disc { off, vals } => vals
                .iter()
                .enumerate()
                .filter(|(i, _)| bit(&self.bits, off + i))
                .map(|(_, &x)| x)
                .min(),
            DomKind::Range { .. } => (self.lo[v] <= self.hi[v]).then_some(self.lo[v]),
        }
    }

    pub fn max(&self, v: usize, k: &DomKind) -> Option<i64> {
        match k {
            DomKind::Part => None,
            DomKind::Disc { off, vals } => vals
                .iter()
                .enumerate()
                .filter(|(i, _)| bit(&self.bits, off + i))
                .map(|(_, &x)| x)
                .max(),
            DomKind::Range { .. } => (self.lo[v] <= self.hi[v]).then_some(self.hi[v]),
        }
    }

    /// Keeps only values satisfying `keep`; returns whether anything changed.
    pub fn retain(&mut self, v: usize, k: &DomKind, keep: impl Fn(i64) -> bool) -> bool {
        match k {
            DomKind::Part => false,
            DomKind::Disc { off, vals } => {
                let mut changed = false;
                for (i, &x) in vals.iter().enumerate() {
                    if bit(&self.bits, off + i) && !keep(x) {
                        clear(&mut self.bits, off + i);
                        changed = true;
                    }
                }
                changed
            }
            DomKind::Range { .. } => {
                // Only bounds are walked; interior values are checked one by
                // one so callers must keep ranges small or use the bound
                // helpers below.
                let vals = self.values(v, k);
                let mut changed = false;
                for x in vals {
                    if !keep(x) {
                        self.remove_range_value(v, x);
                        changed = true;
                    }
                }
                changed
            }
        }
    }

    pub fn remove(&mut self, v: usize, k: &DomKind, x: i64) -> bool {
        match k {
            DomKind::Part => false,
            DomKind::Disc { .. } => self.retain(v, k, |y| y != x),
            DomKind::Range { .. } => {
                if !self.contains(v, k, x) {
                    return false;
                }
                self.remove_range_value(v, x);
                true
            }
        }
    }

    fn remove_range_value(&mut self, v: usize, x: i64) {
        if x == self.lo[v] {
            self.lo[v] += 1;
        } else if x == self.hi[v] {
            self.hi[v] -= 1;
        } else if let Err(pos) = self.holes[v].binary_search(&x) {
            self.holes[v].insert(pos, x);
        }
        self.normalize(v);
    }

    fn normalize(&mut self, v: usize) {
        let holes = &mut self.holes[v];
        while self.lo[v] <= self.hi[v] && holes.binary_search(&self.lo[v]).is_ok() {
            self.lo[v] += 1;
        }
        while self.lo[v] <= self.hi[v] && holes.binary_search(&self.hi[v]).is_ok() {
            self.hi[v] -= 1;
        }
        let (lo, hi) = (self.lo[v], self.hi[v]);
        if holes.first().is_some_and(|&h| h < lo) || holes.last().is_some_and(|&h| h > hi) {
            holes.retain(|&h| lo < h && h < hi);
        }
    }

    pub fn fix(&mut self, v: usize, k: &DomKind, x: i64) -> bool {
        match k {
            DomKind::Part => false,
            DomKind::Disc { .. } => self.retain(v, k, |y| y == x),
            DomKind::Range { .. } => {
                if self.singleton(v, k) == Some(x) {
                    return false;
                }
                if self.contains(v, k, x) {
                    self.lo[v] = x;
                    self.hi[v] = x;
                } else {
                    self.lo[v] = 1;
                    self.hi[v] = 0;
                }
                self.holes[v].clear();
                true
            }
        }
    }

    /// Removes values above `m`.
    pub fn at_most(&mut self, v: usize, k: &DomKind, m: i64) -> bool {
        match k {
            DomKind::Part => false,
            DomKind::Disc { .. } => self.retain(v, k, |x| x <= m),
            DomKind::Range { .. } => {
                if self.hi[v] <= m || self.lo[v] > self.hi[v] {
                    return false;
                }
                self.hi[v] = m;
                self.normalize(v);
                true
            }
        }
    }

    /// Removes values below `m`.
    pub fn at_least(&mut self, v: usize, k: &DomKind, m: i64) -> bool {
        match k {
            DomKind::Part => false,
            DomKind::Disc { .. } => self.retain(v, k, |x| x >= m),
            DomKind::Range { .. } => {
                if self.lo[v] >= m || self.lo[v] > self.hi[v] {
                    return false;
                }
                self.lo[v] = m;
                self.normalize(v);
                true
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_holes_and_bounds() {
        let kinds = vec![DomKind::Range { lo: 0, hi: 5 }];
        let mut s = State::new(&kinds);
        let k = &kinds[0];
        assert!(s.remove(0, k, 2));
        assert!(!s.contains(0, k, 2));
        assert!(s.at_least(0, k, 2));
        assert_eq!(s.min(0, k), Some(3));
        assert!(s.at_most(0, k, 3));
        assert_eq!(s.singleton(0, k), Some(3));
        assert!(s.remove(0, k, 3));
        assert!(s.is_empty(0, k));
    }

    #[test]
    fn discrete_bits() {
        let kinds = vec![DomKind::Disc {
            off: 0,
            vals: vec![14, 16, 18, 20],
        }];
        let mut s = State::new(&kinds);
        let k = &kinds[0];
        assert!(s.at_least(0, k, 17));
        assert_eq!(s.values(0, k), vec![18, 20]);
        assert!(s.fix(0, k, 20));
        assert_eq!(s.singleton(0, k), Some(20));
        assert!(s.remove(0, k, 20));
        assert!(s.is_empty(0, k));
    }
}
