//! Dense linear algebra over F_p for primes below 2^31.

use super::matrix::IntMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ModPMatrix {
    pub fn zero(p: u64, rows: usize, cols: usize) -> Self {
        ModPMatrix { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zero(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_int(p: u64, a: &IntMatrix) -> Self {
        let pb = BigInt::from(p);
        let mut m = Self::zero(p, a.rows(), a.cols());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if !a.is_entry_zero(i, j) {
                    m.data[i * m.cols + j] = match a.get_i64(i, j) {
                        Some(x) => x.rem_euclid(p as i64) as u64,
                        None => a.get(i, j).mod_floor(&pb).to_u64().unwrap(),
                    };
                }
            }
        }
        m
    }

    pub fn to_int(&self) -> IntMatrix {
        IntMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) as i64)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.data[i * self.cols + j] = x % self.p;
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn from_columns(p: u64, rows: usize, cols: &[Vec<u64>]) -> Self {
        let mut m = Self::zero(p, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                m.data[i * cols.len() + j] = x;
            }
        }
        m
    }

    pub fn mul(&self, o: &ModPMatrix) -> ModPMatrix {
        assert_eq!(self.cols, o.rows);
        let mut out = Self::zero(self.p, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let row = &o.data[k * o.cols..(k + 1) * o.cols];
                let dst = &mut out.data[i * o.cols..(i + 1) * o.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d = (*d + a * b) % self.p;
                }
            }
        }
        out
    }

    /// Row-reduce in place to reduced echelon form, applying the same row
    /// operations to `track` (if given). Returns the pivot columns.
    pub fn rref(&mut self, mut track: Option<&mut ModPMatrix>) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else { continue };
            self.swap_rows(pr, r);
            if let Some(t) = track.as_deref_mut() {
                t.swap_rows(pr, r);
            }
            let inv = pow_mod(self.get(r, c), p - 2, p);
            self.scale_row(r, inv);
            if let Some(t) = track.as_deref_mut() {
                t.scale_row(r, inv);
            }
            for i in 0..self.rows {
                if i != r {
                    let f = self.get(i, c);
                    if f != 0 {
                        self.add_row_multiple(i, r, p - f);
                        if let Some(t) = track.as_deref_mut() {
                            t.add_row_multiple(i, r, p - f);
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn scale_row(&mut self, r: usize, f: u64) {
        for x in &mut self.data[r * self.cols..(r + 1) * self.cols] {
            *x = *x * f % self.p;
        }
    }

    /// row[dst] += f * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, f: u64) {
        let c = self.cols;
        let p = self.p;
        let (s, d) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * c);
            (&lo[src * c..(src + 1) * c], &mut hi[..c])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * c);
            (&hi[..c], &mut lo[dst * c..(dst + 1) * c])
        };
        for (x, &y) in d.iter_mut().zip(s) {
            if y != 0 {
                *x = (*x + f * y) % p;
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref(None).len()
    }

    /// Basis of the null space, as columns.
    pub fn kernel(&self) -> ModPMatrix {
        let mut m = self.clone();
        let pivots = m.rref(None);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Self::zero(self.p, self.cols, free.len());
        for (j, &f) in free.iter().enumerate() {
            k.data[f * free.len() + j] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                let x = m.get(r, f);
                if x != 0 {
                    k.data[pc * free.len() + j] = self.p - x;
                }
            }
        }
        k
    }
}

/// Solves `A x = b` for many right-hand sides against a fixed `A`.
#[derive(Clone, Debug)]
pub struct ModPSolver {
    p: u64,
    /// Row operations `E` with `E A = R` in reduced echelon form.
    e: ModPMatrix,
    r: ModPMatrix,
    pivots: Vec<usize>,
}

impl ModPSolver {
    pub fn new(a: &ModPMatrix) -> Self {
        let mut r = a.clone();
        let mut e = ModPMatrix::identity(a.p, a.rows);
        let pivots = r.rref(Some(&mut e));
        ModPSolver { p: a.p, e, r, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// A solution of `A x = b`, if any.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        let p = self.p;
        let eb: Vec<u64> = (0..self.e.rows)
            .map(|i| {
                let row = &self.e.data[i * self.e.cols..(i + 1) * self.e.cols];
                row.iter().zip(b).fold(0u64, |acc, (&x, &y)| (acc + x * (y % p)) % p)
            })
            .collect();
        if eb[self.pivots.len()..].iter().any(|&x| x != 0) {
            return None;
        }
        let mut x = vec![0u64; self.r.cols];
        for (i, &c) in self.pivots.iter().enumerate() {
            x[c] = eb[i];
        }
        Some(x)
    }
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn kernel_and_solve(v in prop::collection::vec(0u64..5, 24), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let a = ModPMatrix::from_int(p, &IntMatrix::from_fn(4, 6, |i, j| v[i * 6 + j] as i64));
            let k = a.kernel();
            prop_assert_eq!(k.cols() + a.rank(), 6);
            prop_assert!(a.mul(&k).data.iter().all(|&x| x == 0));
            let s = ModPSolver::new(&a);
            let x0: Vec<u64> = (0..6).map(|i| (i as u64 * 3 + 1) % p).collect();
            let b = a.mul(&ModPMatrix::from_columns(p, 6, &[x0])).column(0);
            let x = s.solve(&b).unwrap();
            prop_assert_eq!(a.mul(&ModPMatrix::from_columns(p, 6, &[x])).column(0), b);
        }
    }
}
