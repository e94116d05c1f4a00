//! Sparse exact row echelon form over the rationals.
//!
//! Rows are reduced in increasing pivot-column order, so insertion order
//! fully determines the result.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::series::Coefficient;

pub type SparseVec = BTreeMap<usize, Coefficient>;

fn axpy(target: &mut SparseVec, c: &Coefficient, row: &SparseVec) {
    for (k, v) in row {
        let e = target.entry(*k).or_insert_with(Coefficient::zero);
        *e -= c * v;
        if e.is_zero() {
            target.remove(k);
        }
    }
}

#[derive(Clone, Debug, Default)]
struct Row {
    v: SparseVec,
    /// Combination of inserted generators producing `v`.
    combo: SparseVec,
}

/// Incrementally built echelon basis of a row space.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, Row>,
    track: bool,
    inserted: usize,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records, for every basis row, which inserted generators it came from.
    pub fn tracking() -> Self {
        Echelon {
            track: true,
            ..Self::default()
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    fn reduce_inner(&self, mut v: SparseVec, mut combo: SparseVec) -> (SparseVec, SparseVec) {
        let mut from = 0usize;
        loop {
            let next = v
                .range(from..)
                .find(|(k, _)| self.rows.contains_key(k))
                .map(|(k, c)| (*k, c.clone()));
            let Some((col, c)) = next else { break };
            let row = &self.rows[&col];
            axpy(&mut v, &c, &row.v);
            if self.track {
                axpy(&mut combo, &c, &row.combo);
            }
            from = col + 1;
        }
        (v, combo)
    }

    /// Remainder of `v` after elimination against the basis.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        self.reduce_inner(v.clone(), SparseVec::new()).0
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Inserts a generator; returns true when it enlarged the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let id = self.inserted;
        self.inserted += 1;
        let mut combo = SparseVec::new();
        if self.track {
            combo.insert(id, Coefficient::one());
        }
        let (mut v, mut combo) = self.reduce_inner(v, combo);
        let Some((&lead, lc)) = v.iter().next() else {
            return false;
        };
        let inv = lc.recip();
        for x in v.values_mut() {
            *x *= &inv;
        }
        for x in combo.values_mut() {
            *x *= &inv;
        }
        self.rows.insert(lead, Row { v, combo });
        true
    }

    /// Expresses `v` as a combination of inserted generators (by insertion
    /// index), if it lies in the span. Requires a tracking basis.
    pub fn solve(&self, v: &SparseVec) -> Option<SparseVec> {
        assert!(self.track, "solve needs a tracking echelon");
        let (rem, combo) = self.reduce_inner(v.clone(), SparseVec::new());
        if !rem.is_empty() {
            return None;
        }
        // reduce_inner subtracted, so the combination is the negation
        Some(combo.into_iter().map(|(k, c)| (k, -c)).collect())
    }

    pub fn insert_all<I: IntoIterator<Item = SparseVec>>(&mut self, it: I) -> usize {
        it.into_iter().filter(|v| self.insert(v.clone())).count()
    }
}

/// Unit vector `e_k`.
pub fn unit(k: usize) -> SparseVec {
    let mut v = SparseVec::new();
    v.insert(k, Coefficient::one());
    v
}

/// Rank of a list of sparse rows.
pub fn rank(rows: &[SparseVec]) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r.clone());
    }
    e.rank()
}

/// Picks, in the given order, the candidate columns whose unit vectors
/// extend `span` to a larger space.
pub fn greedy_complement(span: &Echelon, candidates: &[usize]) -> Vec<usize> {
    let mut e = span.clone();
    e.track = false;
    candidates
        .iter()
        .copied()
        .filter(|&k| e.insert(unit(k)))
        .collect()
}

/// Writes rows as CSV of rational strings, one row per line.
pub fn to_csv(rows: &[SparseVec], ncols: usize) -> String {
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = (0..ncols)
            .map(|k| {
                r.get(&k)
                    .map(crate::series::rat_to_string)
                    .unwrap_or_else(|| "0".to_string())
            })
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::int;

    fn v(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|&(k, c)| (k, int(c))).collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        let rows = vec![v(&[(0, 1), (1, 2)]), v(&[(0, 2), (1, 4)]), v(&[(1, 1), (2, 1)])];
        assert_eq!(rank(&rows), 2);
    }

    #[test]
    fn solve_recovers_combination() {
        let mut e = Echelon::tracking();
        e.insert(v(&[(0, 1), (1, 1)]));
        e.insert(v(&[(1, 1), (2, 1)]));
        e.insert(v(&[(0, 1), (1, 2), (2, 1)])); // dependent
        let target = v(&[(0, 2), (1, 5), (2, 3)]);
        let combo = e.solve(&target).unwrap();
        let gens = [v(&[(0, 1), (1, 1)]), v(&[(1, 1), (2, 1)]), v(&[(0, 1), (1, 2), (2, 1)])];
        let mut acc = SparseVec::new();
        for (k, c) in &combo {
            axpy(&mut acc, &-c.clone(), &gens[*k]);
        }
        assert_eq!(acc, target);
        assert!(e.solve(&v(&[(3, 1)])).is_none());
    }

    #[test]
    fn complement_is_greedy() {
        let mut e = Echelon::new();
        e.insert(v(&[(0, 1), (1, 1)]));
        assert_eq!(greedy_complement(&e, &[0, 1, 2]), vec![0, 2]);
    }
}
