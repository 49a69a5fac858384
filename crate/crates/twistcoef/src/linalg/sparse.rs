//! Rank of large sparse integer matrices by column-wise elimination.
//!
//! Over Z only pivots equal to +-1 are used. When every independent column
//! reduces to a vector with a unit entry, the reduced columns form a
//! unitriangular basis of the column lattice, so that lattice is saturated
//! (all nonzero invariant factors are 1). If some column has no unit entry the
//! run stops and reports that it could not decide.

use super::{invariant_factors, IntMatrix};
use num_traits::One;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Columns as sparse `(row, value)` lists.
pub type SparseColumns = Vec<Vec<(u32, i64)>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elimination {
    /// Rank over Z with all pivots units, or rank over F_p.
    Rank(usize),
    /// Over Z: a column without unit entries, or an entry overflowed i64.
    Undecided,
}

/// Rank of the matrix with the given columns, over Z (`modulus = None`) or F_p.
pub fn sparse_rank(rows: usize, cols: &[Vec<(u32, i64)>], modulus: Option<u64>) -> Elimination {
    let mut e = Eliminator::new(rows, modulus);
    for col in cols {
        match e.reduce(col) {
            None => return Elimination::Undecided,
            Some(v) if v.is_empty() => {}
            Some(v) => {
                if !e.insert(v) {
                    return Elimination::Undecided;
                }
            }
        }
    }
    Elimination::Rank(e.basis.len())
}

/// Rank over Z of the column lattice and whether it is saturated (the
/// cokernel is free). Columns that get stuck without a unit entry are retried
/// once more pivots exist; what is left is zero on every pivot row, so a
/// dense Smith form of the leftovers finishes the job. `None` on i64 overflow.
pub fn saturated_rank(rows: usize, cols: &[Vec<(u32, i64)>]) -> Option<(usize, bool)> {
    let mut e = Eliminator::new(rows, None);
    let mut stuck: Vec<Vec<(u32, i64)>> = Vec::new();
    for col in cols {
        let v = e.reduce(col)?;
        if !v.is_empty() && !e.insert(v.clone()) {
            stuck.push(v);
        }
    }
    loop {
        let before = e.basis.len();
        let mut rest = Vec::new();
        for col in &stuck {
            let v = e.reduce(col)?;
            if !v.is_empty() && !e.insert(v.clone()) {
                rest.push(v);
            }
        }
        stuck = rest;
        if e.basis.len() == before {
            break;
        }
    }
    if stuck.is_empty() {
        return Some((e.basis.len(), true));
    }
    let mut support: Vec<u32> = stuck.iter().flatten().map(|x| x.0).collect();
    support.sort_unstable();
    support.dedup();
    let mut m = IntMatrix::zero(support.len(), stuck.len());
    for (j, col) in stuck.iter().enumerate() {
        for &(r, v) in col {
            m.set_i64(support.binary_search(&r).unwrap(), j, v);
        }
    }
    let f = invariant_factors(&m);
    let saturated = f.iter().all(|x| x.is_one());
    Some((e.basis.len() + f.len(), saturated))
}

struct Eliminator {
    p: Option<i64>,
    acc: Vec<i64>,
    touched: Vec<u32>,
    is_touched: Vec<bool>,
    basis: Vec<(u32, Vec<(u32, i64)>)>,
    pivot_of_row: Vec<Option<usize>>,
}

impl Eliminator {
    fn new(rows: usize, modulus: Option<u64>) -> Self {
        Eliminator {
            p: modulus.map(|p| p as i64),
            acc: vec![0; rows],
            touched: Vec::new(),
            is_touched: vec![false; rows],
            basis: Vec::new(),
            pivot_of_row: vec![None; rows],
        }
    }

    fn touch(&mut self, r: u32) {
        if !self.is_touched[r as usize] {
            self.is_touched[r as usize] = true;
            self.touched.push(r);
        }
    }

    /// Reduce against the basis in insertion order; the result is zero on
    /// every pivot row. `None` on overflow.
    fn reduce(&mut self, col: &[(u32, i64)]) -> Option<Vec<(u32, i64)>> {
        let p = self.p;
        let mut overflow = false;
        for &(r, v) in col {
            let x = match p {
                Some(p) => (self.acc[r as usize] + v.rem_euclid(p)).rem_euclid(p),
                None => self.acc[r as usize] + v,
            };
            self.acc[r as usize] = x;
            self.touch(r);
        }
        let mut pending: BinaryHeap<Reverse<usize>> = self.touched.iter().filter_map(|&r| self.pivot_of_row[r as usize]).map(Reverse).collect();
        let mut last = None;
        while let Some(Reverse(bi)) = pending.pop() {
            if last == Some(bi) {
                continue;
            }
            last = Some(bi);
            let (pr, ref vec) = self.basis[bi];
            let a = self.acc[pr as usize];
            if a == 0 {
                continue;
            }
            let pv = vec.iter().find(|(r, _)| *r == pr).unwrap().1;
            let c = match p {
                Some(p) => (a as i128 * pow_mod(pv, p - 2, p) as i128).rem_euclid(p as i128) as i64,
                None => a * pv,
            };
            for &(r, v) in vec {
                let ru = r as usize;
                let new = match p {
                    Some(p) => (self.acc[ru] as i128 - c as i128 * v as i128).rem_euclid(p as i128) as i64,
                    None => match c.checked_mul(v).and_then(|cv| self.acc[ru].checked_sub(cv)) {
                        Some(x) => x,
                        None => {
                            overflow = true;
                            0
                        }
                    },
                };
                self.acc[ru] = new;
                if !self.is_touched[ru] {
                    self.is_touched[ru] = true;
                    self.touched.push(r);
                }
                if let Some(bj) = self.pivot_of_row[ru] {
                    if bj > bi && new != 0 {
                        pending.push(Reverse(bj));
                    }
                }
            }
            if overflow {
                break;
            }
        }
        let mut entries: Vec<(u32, i64)> = self.touched.iter().map(|&r| (r, self.acc[r as usize])).filter(|&(_, v)| v != 0).collect();
        for &r in &self.touched {
            self.acc[r as usize] = 0;
            self.is_touched[r as usize] = false;
        }
        self.touched.clear();
        if overflow {
            return None;
        }
        entries.sort_unstable_by_key(|e| e.0);
        Some(entries)
    }

    /// Add a reduced nonzero vector as a basis element. Over Z this needs a
    /// unit entry; returns false if there is none.
    fn insert(&mut self, v: Vec<(u32, i64)>) -> bool {
        let pivot = match self.p {
            Some(_) => Some(v[0].0),
            None => v.iter().find(|(_, x)| x.abs() == 1).map(|e| e.0),
        };
        let Some(pivot) = pivot else { return false };
        self.pivot_of_row[pivot as usize] = Some(self.basis.len());
        self.basis.push((pivot, v));
        true
    }
}

fn pow_mod(mut b: i64, mut e: i64, m: i64) -> i64 {
    let mut r = 1i64;
    b = b.rem_euclid(m);
    while e > 0 {
        if e & 1 == 1 {
            r = (r as i128 * b as i128 % m as i128) as i64;
        }
        b = (b as i128 * b as i128 % m as i128) as i64;
        e >>= 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn columns(m: &IntMatrix) -> SparseColumns {
        (0..m.cols())
            .map(|j| (0..m.rows()).filter(|&i| !m.is_entry_zero(i, j)).map(|i| (i as u32, m.get_i64(i, j).unwrap())).collect())
            .collect()
    }

    #[test]
    fn small_examples() {
        let m = IntMatrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 2, 1]]);
        assert_eq!(sparse_rank(3, &columns(&m), None), Elimination::Rank(2));
        assert_eq!(sparse_rank(3, &columns(&m), Some(2)), Elimination::Rank(2));
        let two = IntMatrix::from_rows(&[vec![2]]);
        assert_eq!(sparse_rank(1, &columns(&two), None), Elimination::Undecided);
        assert_eq!(sparse_rank(1, &columns(&two), Some(2)), Elimination::Rank(0));
        assert_eq!(sparse_rank(1, &columns(&two), Some(3)), Elimination::Rank(1));
    }

    proptest! {
        #[test]
        fn agrees_with_smith(v in prop::collection::vec(-2i64..3, 30)) {
            let m = IntMatrix::from_fn(5, 6, |i, j| v[i * 6 + j]);
            let f = invariant_factors(&m);
            match sparse_rank(5, &columns(&m), None) {
                Elimination::Rank(r) => {
                    prop_assert_eq!(r, f.len());
                    prop_assert!(f.iter().all(|x| x == &num_bigint::BigInt::from(1)));
                }
                Elimination::Undecided => {}
            }
            let (r, sat) = saturated_rank(5, &columns(&m)).unwrap();
            prop_assert_eq!(r, f.len());
            prop_assert_eq!(sat, f.iter().all(|x| x == &num_bigint::BigInt::from(1)));
            for p in [2u64, 3, 5] {
                let Elimination::Rank(r) = sparse_rank(5, &columns(&m), Some(p)) else { panic!() };
                let rp = f.iter().filter(|x| (*x % p) != num_bigint::BigInt::from(0)).count();
                prop_assert_eq!(r, rp);
            }
        }
    }
}
