//! Dense integer matrices with a machine-word fast path.

use super::scalar::Int;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use std::fmt;

#[derive(Clone)]
enum Data {
    Small(Vec<i64>),
    Big(Vec<BigInt>),
}

/// Row-major integer matrix. Entries are stored as `i64` while they fit and
/// promoted to `BigInt` otherwise; the two storages compare equal by value.
#[derive(Clone)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Data,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: Data::Small(vec![0; rows * cols]) }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set_i64(i, i, 1);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut v = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                v.push(f(i, j));
            }
        }
        IntMatrix { rows, cols, data: Data::Small(v) }
    }

    /// Build from rows of `i64`. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_rows_with_cols(rows, c, r)
    }

    fn from_rows_with_cols(rows: &[Vec<i64>], c: usize, r: usize) -> Self {
        let mut v = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            v.extend_from_slice(row);
        }
        IntMatrix { rows: r, cols: c, data: Data::Small(v) }
    }

    /// Build an `r x c` matrix from rows (allows `r == 0` with explicit `c`).
    pub fn from_rows_shape(r: usize, c: usize, rows: &[Vec<i64>]) -> Self {
        assert_eq!(rows.len(), r);
        Self::from_rows_with_cols(rows, c, r)
    }

    pub fn from_big_rows(r: usize, c: usize, rows: Vec<Vec<BigInt>>) -> Self {
        assert_eq!(rows.len(), r);
        let mut v = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            v.extend(row);
        }
        let mut m = IntMatrix { rows: r, cols: c, data: Data::Big(v) };
        m.normalize();
        m
    }

    /// Build from a dense generic scalar table.
    pub fn from_dense<T: Int>(r: usize, c: usize, rows: &[Vec<T>]) -> Self {
        let big: Vec<Vec<BigInt>> = rows.iter().map(|row| row.iter().map(|x| x.to_big()).collect()).collect();
        Self::from_big_rows(r, c, big)
    }

    /// Column vector.
    pub fn column_vector(v: &[BigInt]) -> Self {
        Self::from_big_rows(v.len(), 1, v.iter().map(|x| vec![x.clone()]).collect())
    }

    pub fn from_columns(rows: usize, cols: &[Vec<BigInt>]) -> Self {
        let mut m = IntMatrix { rows, cols: cols.len(), data: Data::Big(vec![BigInt::default(); rows * cols.len()]) };
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, x) in col.iter().enumerate() {
                if let Data::Big(v) = &mut m.data {
                    v[i * m.cols + j] = x.clone();
                }
            }
        }
        m.normalize();
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    fn normalize(&mut self) {
        if let Data::Big(v) = &self.data {
            let mut out = Vec::with_capacity(v.len());
            for x in v {
                match x.to_i64() {
                    Some(s) => out.push(s),
                    None => return,
                }
            }
            self.data = Data::Small(out);
        }
    }

    fn promote(&mut self) {
        if let Data::Small(v) = &self.data {
            self.data = Data::Big(v.iter().map(|&x| BigInt::from(x)).collect());
        }
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        let k = i * self.cols + j;
        match &self.data {
            Data::Small(v) => BigInt::from(v[k]),
            Data::Big(v) => v[k].clone(),
        }
    }

    pub fn get_i64(&self, i: usize, j: usize) -> Option<i64> {
        let k = i * self.cols + j;
        match &self.data {
            Data::Small(v) => Some(v[k]),
            Data::Big(v) => v[k].to_i64(),
        }
    }

    pub fn is_entry_zero(&self, i: usize, j: usize) -> bool {
        let k = i * self.cols + j;
        match &self.data {
            Data::Small(v) => v[k] == 0,
            Data::Big(v) => v[k].is_zero(),
        }
    }

    pub fn set_i64(&mut self, i: usize, j: usize, x: i64) {
        let k = i * self.cols + j;
        match &mut self.data {
            Data::Small(v) => v[k] = x,
            Data::Big(v) => v[k] = BigInt::from(x),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        let k = i * self.cols + j;
        if let Data::Small(v) = &mut self.data {
            if let Some(s) = x.to_i64() {
                v[k] = s;
                return;
            }
        }
        self.promote();
        if let Data::Big(v) = &mut self.data {
            v[k] = x;
        }
    }

    pub fn is_small(&self) -> bool {
        matches!(self.data, Data::Small(_))
    }

    /// Dense copy in a generic scalar type; `None` if an entry does not fit.
    pub fn to_dense<T: Int>(&self) -> Option<Vec<Vec<T>>> {
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut row = Vec::with_capacity(self.cols);
            for j in 0..self.cols {
                let x = match &self.data {
                    Data::Small(v) => T::from_i64(v[i * self.cols + j]),
                    Data::Big(v) => T::from_big(&v[i * self.cols + j])?,
                };
                row.push(x);
            }
            out.push(row);
        }
        Some(out)
    }

    pub fn to_big_rows(&self) -> Vec<Vec<BigInt>> {
        self.to_dense::<BigInt>().expect("BigInt always fits")
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            Data::Small(v) => v.iter().all(|&x| x == 0),
            Data::Big(v) => v.iter().all(|x| x.is_zero()),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    pub fn transpose(&self) -> Self {
        let mut out = IntMatrix { rows: self.cols, cols: self.rows, data: self.data.clone() };
        match (&self.data, &mut out.data) {
            (Data::Small(a), Data::Small(b)) => {
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        b[j * self.rows + i] = a[i * self.cols + j];
                    }
                }
            }
            (Data::Big(a), Data::Big(b)) => {
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        b[j * self.rows + i] = a[i * self.cols + j].clone();
                    }
                }
            }
            _ => unreachable!(),
        }
        out
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        if let (Data::Small(a), Data::Small(b)) = (&self.data, &o.data) {
            if let Some(m) = mul_small(a, b, self.rows, self.cols, o.cols) {
                return m;
            }
        }
        let a = self.to_big_rows();
        let b = o.to_big_rows();
        let mut out = vec![vec![BigInt::default(); o.cols]; self.rows];
        for i in 0..self.rows {
            for k in 0..self.cols {
                if a[i][k].is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    if !b[k][j].is_zero() {
                        out[i][j] += &a[i][k] * &b[k][j];
                    }
                }
            }
        }
        IntMatrix::from_big_rows(self.rows, o.cols, out)
    }

    fn zip(&self, o: &IntMatrix, sign: i64) -> IntMatrix {
        assert_eq!(self.shape(), o.shape(), "matrix sum shape mismatch");
        if let (Data::Small(a), Data::Small(b)) = (&self.data, &o.data) {
            let mut v = Vec::with_capacity(a.len());
            let mut ok = true;
            for (x, y) in a.iter().zip(b) {
                match y.checked_mul(sign).and_then(|y| x.checked_add(y)) {
                    Some(s) => v.push(s),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return IntMatrix { rows: self.rows, cols: self.cols, data: Data::Small(v) };
            }
        }
        let a = self.to_big_rows();
        let b = o.to_big_rows();
        let s = BigInt::from(sign);
        let rows = a.iter().zip(&b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y * &s).collect()).collect();
        IntMatrix::from_big_rows(self.rows, self.cols, rows)
    }

    pub fn add(&self, o: &IntMatrix) -> IntMatrix {
        self.zip(o, 1)
    }

    pub fn sub(&self, o: &IntMatrix) -> IntMatrix {
        self.zip(o, -1)
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix::zero(self.rows, self.cols).sub(self)
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        let rows = self.to_big_rows().into_iter().map(|r| r.into_iter().map(|x| x * k).collect()).collect();
        IntMatrix::from_big_rows(self.rows, self.cols, rows)
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut s = BigInt::default();
                for (j, x) in v.iter().enumerate() {
                    if !x.is_zero() && !self.is_entry_zero(i, j) {
                        s += self.get(i, j) * x;
                    }
                }
                s
            })
            .collect()
    }

    /// Horizontal concatenation; all blocks must have `rows` rows.
    pub fn hstack(rows: usize, blocks: &[&IntMatrix]) -> IntMatrix {
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = IntMatrix::zero(rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, rows);
            out.paste(0, off, b);
            off += b.cols;
        }
        out
    }

    /// Vertical concatenation; all blocks must have `cols` columns.
    pub fn vstack(cols: usize, blocks: &[&IntMatrix]) -> IntMatrix {
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let mut out = IntMatrix::zero(rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.cols, cols);
            out.paste(off, 0, b);
            off += b.rows;
        }
        out
    }

    pub fn block_diag(blocks: &[&IntMatrix]) -> IntMatrix {
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = IntMatrix::zero(rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.paste(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    /// Copy `b` into `self` with its top-left corner at (r0, c0).
    pub fn paste(&mut self, r0: usize, c0: usize, b: &IntMatrix) {
        if !b.is_small() {
            self.promote();
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                match (&mut self.data, &b.data) {
                    (Data::Small(v), Data::Small(w)) => v[(r0 + i) * self.cols + c0 + j] = w[i * b.cols + j],
                    (Data::Big(v), _) => v[(r0 + i) * self.cols + c0 + j] = b.get(i, j),
                    _ => unreachable!(),
                }
            }
        }
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let mut out = IntMatrix::zero(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                if !self.is_entry_zero(i, j) {
                    out.set(a, b, self.get(i, j));
                }
            }
        }
        out
    }

    pub fn select_cols(&self, cols: &[usize]) -> IntMatrix {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.select(&rows, cols)
    }

    pub fn select_rows(&self, rows: &[usize]) -> IntMatrix {
        let cols: Vec<usize> = (0..self.cols).collect();
        self.select(rows, &cols)
    }

    /// Kronecker product.
    pub fn kron(&self, o: &IntMatrix) -> IntMatrix {
        let mut out = IntMatrix::zero(self.rows * o.rows, self.cols * o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.is_entry_zero(i, j) {
                    continue;
                }
                let a = self.get(i, j);
                for k in 0..o.rows {
                    for l in 0..o.cols {
                        if !o.is_entry_zero(k, l) {
                            out.set(i * o.rows + k, j * o.cols + l, &a * o.get(k, l));
                        }
                    }
                }
            }
        }
        out
    }

    /// Entries reduced into `[0, p)`.
    pub fn mod_p(&self, p: u64) -> Vec<Vec<u64>> {
        let pb = BigInt::from(p);
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| match self.get_i64(i, j) {
                        Some(x) => x.rem_euclid(p as i64) as u64,
                        None => {
                            let r = ((self.get(i, j) % &pb) + &pb) % &pb;
                            r.to_u64().unwrap()
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn max_bits(&self) -> u64 {
        match &self.data {
            Data::Small(v) => v.iter().map(|x| x.bits()).max().unwrap_or(0),
            Data::Big(v) => v.iter().map(|x| x.bits()).max().unwrap_or(0),
        }
    }

    pub fn nonzero_count(&self) -> usize {
        (0..self.rows).map(|i| (0..self.cols).filter(|&j| !self.is_entry_zero(i, j)).count()).sum()
    }
}

fn mul_small(a: &[i64], b: &[i64], n: usize, k: usize, m: usize) -> Option<IntMatrix> {
    let mut out = vec![0i128; n * m];
    for i in 0..n {
        for l in 0..k {
            let x = a[i * k + l] as i128;
            if x == 0 {
                continue;
            }
            let brow = &b[l * m..(l + 1) * m];
            let orow = &mut out[i * m..(i + 1) * m];
            for (o, &y) in orow.iter_mut().zip(brow) {
                if y != 0 {
                    *o = o.checked_add(x * y as i128)?;
                }
            }
        }
    }
    let v: Option<Vec<i64>> = out.into_iter().map(|x| i64::try_from(x).ok()).collect();
    Some(IntMatrix { rows: n, cols: m, data: Data::Small(v?) })
}

impl PartialEq for IntMatrix {
    fn eq(&self, o: &Self) -> bool {
        if self.shape() != o.shape() {
            return false;
        }
        match (&self.data, &o.data) {
            (Data::Small(a), Data::Small(b)) => a == b,
            _ => (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == o.get(i, j))),
        }
    }
}
impl Eq for IntMatrix {}

impl std::hash::Hash for IntMatrix {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.rows.hash(h);
        self.cols.hash(h);
        for i in 0..self.rows {
            for j in 0..self.cols {
                self.get(i, j).hash(h);
            }
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        if self.rows == 0 || self.cols == 0 {
            write!(f, "{}x{}", self.rows, self.cols)?;
        }
        write!(f, "]")
    }
}
