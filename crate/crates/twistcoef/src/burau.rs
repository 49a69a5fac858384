//! Laurent-polynomial matrices and a relation checker for matrix assignments
//! on the braid-category generators `sigma^e_{i,n}: n -> n`, `iota_n: n -> n+1`
//! and `pi_{n+1}: n+1 -> n`.
//!
//! The checker is a finite verifier: every relation instance with objects up to
//! `max_n` (and exponents up to a bound for the edge relation) is multiplied
//! out with `t` left symbolic. A failing instance carries its residual
//! `lhs - rhs`, whose vanishing locus can be computed.
//!
//! Matrices act on column vectors, so `iota_n` is the `(n+1) x n` matrix
//! sending `(f1..fn)` to `(0, f1..fn)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

use crate::functor::{FunctorError, Generators, TruncatedFunctor};
use crate::linalg::{FgAbGroup, IntMatrix, Ring};

#[derive(Debug, thiserror::Error)]
pub enum BurauError {
    #[error("division by {divisor} is not exact (dividend {dividend})")]
    InexactDivision { dividend: String, divisor: String },
    #[error("cannot evaluate at t = 0")]
    ZeroSpecialisation,
    #[error("max_n must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("edge effect needs n >= 1")]
    EdgeAtZero,
    #[error("edge effect k={k} n={n}: product {product} differs from closed form {closed}")]
    ClosedFormMismatch { k: usize, n: usize, product: String, closed: String },
    #[error("matrix block is not invertible over Z[t, 1/t]")]
    NotInvertible,
    #[error("object {0} is beyond the assignment")]
    BeyondAssignment(usize),
    #[error("entry {0} is not an integer")]
    NotIntegral(String),
    #[error(transparent)]
    Functor(#[from] FunctorError),
}

/// Element of `Z[t, 1/t]`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn t() -> Self {
        Self::monomial(1, 1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: impl Into<BigInt>, e: i64) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        LaurentPoly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (i64, BigInt)>) -> Self {
        let mut p = LaurentPoly::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// `Some((c, e))` when the polynomial is `c * t^e` with `c = +-1`.
    pub fn as_unit(&self) -> Option<(BigInt, i64)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (&e, c) = self.terms.iter().next().unwrap();
        (c.abs().is_one()).then(|| (c.clone(), e))
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (&e, c) in &o.terms {
            r.add_term(e, c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(&e, c)| (e, -c)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = LaurentPoly::zero();
        for (&a, x) in &self.terms {
            for (&b, y) in &o.terms {
                r.add_term(a + b, x * y);
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = LaurentPoly::one();
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// Exact quotient `self / d`. Both sides are shifted to ordinary
    /// polynomials and divided by long division over Z. Any nonzero remainder
    /// or non-integral step is an error.
    pub fn div_exact(&self, d: &Self) -> Result<Self, BurauError> {
        let err = || BurauError::InexactDivision { dividend: self.to_string(), divisor: d.to_string() };
        if d.is_zero() {
            return Err(err());
        }
        if self.is_zero() {
            return Ok(LaurentPoly::zero());
        }
        let (a, sa) = self.dense();
        let (b, sb) = d.dense();
        let (q, r) = poly_divrem(&a, &b).ok_or_else(err)?;
        if !r.iter().all(Zero::is_zero) {
            return Err(err());
        }
        Ok(LaurentPoly::from_dense(&q, sa - sb))
    }

    /// Dense coefficients (ascending) of `t^{-m} * self` and the shift `m`.
    fn dense(&self) -> (Vec<BigInt>, i64) {
        let lo = self.min_exp().unwrap_or(0);
        let hi = self.max_exp().unwrap_or(0);
        let mut v = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (&e, c) in &self.terms {
            v[(e - lo) as usize] = c.clone();
        }
        (v, lo)
    }

    fn from_dense(v: &[BigInt], shift: i64) -> Self {
        Self::from_terms(v.iter().enumerate().map(|(i, c)| (i as i64 + shift, c.clone())))
    }

    /// Value at a nonzero rational.
    pub fn eval(&self, t0: &BigRational) -> Result<BigRational, BurauError> {
        if t0.is_zero() {
            return Err(BurauError::ZeroSpecialisation);
        }
        let mut acc = BigRational::zero();
        for (&e, c) in &self.terms {
            acc += BigRational::from_integer(c.clone()) * pow_signed(t0, e);
        }
        Ok(acc)
    }
}

fn pow_signed(x: &BigRational, e: i64) -> BigRational {
    let base = if e < 0 { x.recip() } else { x.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

impl fmt::Display for LaurentPoly {
    /// Terms in increasing exponent, each as `c*t^e`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("{c}*t^{e}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn trim(v: &mut Vec<BigInt>) {
    while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

/// Long division over Z; `None` if a leading coefficient fails to divide.
fn poly_divrem(a: &[BigInt], b: &[BigInt]) -> Option<(Vec<BigInt>, Vec<BigInt>)> {
    let mut r = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut r);
    trim(&mut b);
    let db = b.len() - 1;
    let lc = b[db].clone();
    if r.len() < b.len() {
        return Some((vec![BigInt::zero()], r));
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for i in (db..r.len()).rev() {
        if r[i].is_zero() {
            continue;
        }
        let (c, rem) = r[i].div_rem(&lc);
        if !rem.is_zero() {
            return None;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i - db + j] -= &c * bj;
        }
        q[i - db] = c;
    }
    r.truncate(db.max(1));
    trim(&mut r);
    Some((q, r))
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    trim(&mut v);
    let g = v.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() {
        return v;
    }
    let sign = if v.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
    v.iter().map(|c| c / &g * &sign).collect()
}

fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = b[db].clone();
    trim(&mut r);
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let la = r[dr].clone();
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (j, bj) in b.iter().enumerate() {
            r[dr - db + j] -= &la * bj;
        }
        r.pop();
        trim(&mut r);
        if db == 0 {
            return vec![BigInt::zero()];
        }
    }
    r
}

/// Primitive gcd of two polynomials over Z (dense ascending).
fn poly_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut a = primitive(a.to_vec());
    let mut b = primitive(b.to_vec());
    let is_zero = |v: &Vec<BigInt>| v.iter().all(Zero::is_zero);
    if is_zero(&a) {
        return b;
    }
    while !is_zero(&b) {
        let r = primitive(pseudo_rem(&a, &b));
        a = b;
        b = r;
    }
    a
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs();
    if n > BigInt::from(1_000_000_000_000i64) {
        return None;
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let e = &n / &d;
            if e != d {
                out.push(e);
            }
        }
        d += 1;
    }
    out.sort();
    Some(out)
}

/// Where a nonzero residual vanishes, for `t` in the nonzero complex numbers.
///
/// `common` is the primitive gcd of all residual entries with powers of `t`
/// removed; `rational_roots` lists its rational roots with multiplicity, and
/// `cofactor` is what remains after dividing them out. A constant cofactor
/// means the rational roots are the whole locus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VanishingLocus {
    pub common: LaurentPoly,
    pub rational_roots: Vec<(BigRational, usize)>,
    pub cofactor: LaurentPoly,
}

impl VanishingLocus {
    /// Locus of the entries of `polys` (zero entries are ignored); `None` if all vanish.
    pub fn of<'a>(polys: impl IntoIterator<Item = &'a LaurentPoly>) -> Option<VanishingLocus> {
        let mut g: Option<Vec<BigInt>> = None;
        for p in polys.into_iter().filter(|p| !p.is_zero()) {
            let (d, _) = p.dense();
            g = Some(match g {
                None => primitive(d),
                Some(h) => poly_gcd(&h, &d),
            });
        }
        let mut g = g?;
        while g.len() > 1 && g[0].is_zero() {
            g.remove(0);
        }
        let common = LaurentPoly::from_dense(&g, 0);
        let mut rest = g;
        let mut roots = Vec::new();
        if rest.len() > 1 {
            if let (Some(ps), Some(qs)) = (divisors(&rest[0]), divisors(rest.last().unwrap())) {
                let mut cands: Vec<BigRational> = Vec::new();
                for p in &ps {
                    for q in &qs {
                        for s in [BigInt::one(), -BigInt::one()] {
                            let c = BigRational::new(p * &s, q.clone());
                            if !cands.contains(&c) {
                                cands.push(c);
                            }
                        }
                    }
                }
                cands.sort();
                for c in cands {
                    let lin = vec![-c.numer().clone(), c.denom().clone()];
                    let mut mult = 0;
                    while rest.len() > 1 {
                        match poly_divrem(&rest, &lin) {
                            Some((q, r)) if r.iter().all(Zero::is_zero) => {
                                rest = q;
                                mult += 1;
                            }
                            _ => break,
                        }
                    }
                    if mult > 0 {
                        roots.push((c, mult));
                    }
                }
            }
        }
        Some(VanishingLocus { common, rational_roots: roots, cofactor: LaurentPoly::from_dense(&rest, 0) })
    }

    /// True when the locus is exactly the listed rational roots.
    pub fn is_complete(&self) -> bool {
        self.cofactor.max_exp() == Some(0)
    }
}

impl fmt::Display for VanishingLocus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let roots: Vec<String> = self.rational_roots.iter().map(|(r, _)| r.to_string()).collect();
        if roots.is_empty() && self.is_complete() {
            return write!(f, "nowhere");
        }
        write!(f, "t in {{{}}}", roots.join(", "))?;
        if !self.is_complete() {
            write!(f, " and roots of {}", self.cofactor)?;
        }
        Ok(())
    }
}

/// Commutative ring of matrix entries.
pub trait Entry: Clone + PartialEq + fmt::Display + fmt::Debug {
    fn zero_elem() -> Self;
    fn one_elem() -> Self;
    fn vanishes(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
}

impl Entry for LaurentPoly {
    fn zero_elem() -> Self {
        LaurentPoly::zero()
    }
    fn one_elem() -> Self {
        LaurentPoly::one()
    }
    fn vanishes(&self) -> bool {
        LaurentPoly::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        LaurentPoly::add(self, o)
    }
    fn minus(&self, o: &Self) -> Self {
        LaurentPoly::sub(self, o)
    }
    fn times(&self, o: &Self) -> Self {
        LaurentPoly::mul(self, o)
    }
}

impl Entry for BigRational {
    fn zero_elem() -> Self {
        Zero::zero()
    }
    fn one_elem() -> Self {
        One::one()
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
}

/// Dense matrix over an [`Entry`] ring.
#[derive(Clone, PartialEq)]
pub struct Mat<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

pub type LaurentMatrix = Mat<LaurentPoly>;
pub type RationalMatrix = Mat<BigRational>;

impl<E> Mat<E> {
    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }
}

impl<E: Entry> Mat<E> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| E::zero_elem())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { E::one_elem() } else { E::zero_elem() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> impl Iterator<Item = &E> {
        self.data.iter()
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        Self::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = E::zero_elem();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if !a.vanishes() {
                    acc = acc.plus(&a.times(o.get(k, j)));
                }
            }
            acc
        })
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch in difference");
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).minus(o.get(i, j)))
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::identity(self.rows), |acc, _| acc.mul(self))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Entry::vanishes)
    }

    /// Block sum `self (+) o`.
    pub fn direct_sum(&self, o: &Self) -> Self {
        Self::from_fn(self.rows + o.rows, self.cols + o.cols, |i, j| match (i < self.rows, j < self.cols) {
            (true, true) => self.get(i, j).clone(),
            (false, false) => o.get(i - self.rows, j - self.cols).clone(),
            _ => E::zero_elem(),
        })
    }

    pub fn map<F: Entry>(&self, f: impl Fn(&E) -> F) -> Mat<F> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<F: Entry, X>(&self, f: impl Fn(&E) -> Result<F, X>) -> Result<Mat<F>, X> {
        Ok(Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect::<Result<_, _>>()? })
    }

    /// Nonzero entries as `(row, col, value)`, 1-based.
    pub fn nonzero_entries(&self) -> Vec<(usize, usize, &E)> {
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !self.get(i, j).vanishes())
            .map(|(i, j)| (i + 1, j + 1, self.get(i, j)))
            .collect()
    }
}

impl LaurentMatrix {
    pub fn eval(&self, t0: &BigRational) -> Result<RationalMatrix, BurauError> {
        self.try_map(|p| p.eval(t0))
    }

    /// Inverse of a 2x2 block whose determinant is a unit `+-t^e`.
    pub fn inverse_2x2(&self) -> Result<LaurentMatrix, BurauError> {
        assert_eq!((self.rows, self.cols), (2, 2));
        let (a, b, c, d) = (self.get(0, 0), self.get(0, 1), self.get(1, 0), self.get(1, 1));
        let det = a.mul(d).sub(&b.mul(c));
        let (s, e) = det.as_unit().ok_or(BurauError::NotInvertible)?;
        let inv = LaurentPoly::monomial(s, -e);
        Ok(Mat::from_rows(vec![vec![d.mul(&inv), b.neg().mul(&inv)], vec![c.neg().mul(&inv), a.mul(&inv)]]))
    }
}

impl<E: fmt::Display> fmt::Display for Mat<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl<E: fmt::Debug> fmt::Debug for Mat<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.cols.max(1)).take(self.rows)).finish()
    }
}

/// Matrices for `sigma^{+-1}_{i,n}` (`1 <= i < n <= max_n`), `iota_n` and
/// `pi_{n+1}` (`0 <= n < max_n`).
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorAssignment<E> {
    pub max_n: usize,
    pub sigma: BTreeMap<(usize, usize), Mat<E>>,
    pub sigma_inv: BTreeMap<(usize, usize), Mat<E>>,
    /// `iota[n]` is `iota_n: n -> n+1`.
    pub iota: Vec<Mat<E>>,
    /// `pi[n]` is `pi_{n+1}: n+1 -> n`.
    pub pi: Vec<Mat<E>>,
}

impl<E: Entry> GeneratorAssignment<E> {
    pub fn sigma(&self, i: usize, n: usize, inverse: bool) -> &Mat<E> {
        let m = if inverse { &self.sigma_inv } else { &self.sigma };
        &m[&(i, n)]
    }

    pub fn iota(&self, n: usize) -> &Mat<E> {
        &self.iota[n]
    }

    /// `pi_{n1}: n1 -> n1 - 1`.
    pub fn pi(&self, n1: usize) -> &Mat<E> {
        &self.pi[n1 - 1]
    }

    fn try_map<F: Entry, X>(&self, f: impl Fn(&E) -> Result<F, X> + Copy) -> Result<GeneratorAssignment<F>, X> {
        let mm = |m: &BTreeMap<(usize, usize), Mat<E>>| -> Result<BTreeMap<_, _>, X> {
            m.iter().map(|(k, v)| Ok((*k, v.try_map(f)?))).collect()
        };
        Ok(GeneratorAssignment {
            max_n: self.max_n,
            sigma: mm(&self.sigma)?,
            sigma_inv: mm(&self.sigma_inv)?,
            iota: self.iota.iter().map(|m| m.try_map(f)).collect::<Result<_, _>>()?,
            pi: self.pi.iter().map(|m| m.try_map(f)).collect::<Result<_, _>>()?,
        })
    }
}

/// The Burau assignment: `sigma_{i,n} = I_{i-1} (+) [[1-t, t], [1, 0]] (+) I_{n-i-1}`,
/// its inverse computed from the block, `iota_n` prepending a zero coordinate
/// and `pi_{n+1}` dropping the first coordinate.
pub fn burau_assignment(max_n: usize) -> Result<GeneratorAssignment<LaurentPoly>, BurauError> {
    if max_n < 2 {
        return Err(BurauError::TooSmall(max_n));
    }
    let t = LaurentPoly::t();
    let block = Mat::from_rows(vec![vec![LaurentPoly::one().sub(&t), t.clone()], vec![LaurentPoly::one(), LaurentPoly::zero()]]);
    let block_inv = block.inverse_2x2()?;
    let embed = |b: &LaurentMatrix, i: usize, n: usize| Mat::identity(i - 1).direct_sum(b).direct_sum(&Mat::identity(n - i - 1));
    let mut sigma = BTreeMap::new();
    let mut sigma_inv = BTreeMap::new();
    for n in 2..=max_n {
        for i in 1..n {
            sigma.insert((i, n), embed(&block, i, n));
            sigma_inv.insert((i, n), embed(&block_inv, i, n));
        }
    }
    let one = |b: bool| if b { LaurentPoly::one() } else { LaurentPoly::zero() };
    let iota = (0..max_n).map(|n| Mat::from_fn(n + 1, n, |r, c| one(r == c + 1))).collect();
    let pi = (0..max_n).map(|n| Mat::from_fn(n, n + 1, |r, c| one(c == r + 1))).collect();
    Ok(GeneratorAssignment { max_n, sigma, sigma_inv, iota, pi })
}

/// Substitute `t := t0`.
pub fn specialize(a: &GeneratorAssignment<LaurentPoly>, t0: &BigRational) -> Result<GeneratorAssignment<BigRational>, BurauError> {
    if t0.is_zero() {
        return Err(BurauError::ZeroSpecialisation);
    }
    a.try_map(|p| p.eval(t0))
}

impl GeneratorAssignment<BigRational> {
    /// Integral assignment as a functor on partial injections up to `trunc`,
    /// using `sigma_{i,n}` as the image of the transposition `(i i+1)`.
    /// The result is validated.
    pub fn to_functor(&self, trunc: usize) -> Result<TruncatedFunctor, BurauError> {
        if trunc > self.max_n {
            return Err(BurauError::BeyondAssignment(trunc));
        }
        let int = |m: &RationalMatrix| -> Result<IntMatrix, BurauError> {
            let rows = (0..m.rows())
                .map(|i| {
                    (0..m.cols())
                        .map(|j| {
                            let x = m.get(i, j);
                            x.is_integer().then(|| x.to_integer()).ok_or_else(|| BurauError::NotIntegral(x.to_string()))
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(IntMatrix::from_big_rows(m.rows(), m.cols(), rows))
        };
        let gens = Generators {
            iota: (0..trunc).map(|n| int(self.iota(n))).collect::<Result<_, _>>()?,
            pi: (1..=trunc).map(|n| int(self.pi(n))).collect::<Result<_, _>>()?,
            sigma: (0..=trunc).map(|n| (1..n).map(|i| int(self.sigma(i, n, false))).collect::<Result<_, _>>()).collect::<Result<_, _>>()?,
        };
        let groups = (0..=trunc).map(FgAbGroup::free).collect();
        Ok(TruncatedFunctor::from_generators(Ring::Z, groups, gens)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationId {
    /// `sigma^{-1}` inverts `sigma`.
    Inverse,
    /// Braid relations among the `sigma_{i,n}` for fixed `n`.
    Braid,
    /// `sigma` commutes past `iota` and `pi` with an index shift.
    Commute,
    /// `pi_{n+1} sigma_{1,n+1}^k iota_n` is `id` (k even) or `iota_{n-1} pi_n` (k odd).
    Edge,
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelationId::Inverse => "i",
            RelationId::Braid => "b",
            RelationId::Commute => "c",
            RelationId::Edge => "e",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationInstance<E> {
    pub relation: RelationId,
    pub params: String,
    pub lhs: Mat<E>,
    pub rhs: Mat<E>,
    /// `lhs - rhs`.
    pub residual: Mat<E>,
}

impl<E: Entry> RelationInstance<E> {
    fn new(relation: RelationId, params: String, lhs: Mat<E>, rhs: Mat<E>) -> Self {
        let residual = lhs.sub(&rhs);
        RelationInstance { relation, params, lhs, rhs, residual }
    }

    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationReport<E> {
    pub max_n: usize,
    pub k_bound: usize,
    pub instances: Vec<RelationInstance<E>>,
}

impl<E: Entry> RelationReport<E> {
    pub fn all_hold(&self) -> bool {
        self.instances.iter().all(RelationInstance::holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationInstance<E>> {
        self.instances.iter().filter(|r| !r.holds())
    }

    pub fn of(&self, id: RelationId) -> impl Iterator<Item = &RelationInstance<E>> {
        self.instances.iter().filter(move |r| r.relation == id)
    }

    /// One line per instance: id, parameters, verdict, residual entries.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for r in &self.instances {
            let verdict = if r.holds() { "HOLDS" } else { "FAILS" };
            out.push_str(&format!("{}\t{}\t{}", r.relation, r.params, verdict));
            if !r.holds() {
                let ents: Vec<String> = r.residual.nonzero_entries().into_iter().map(|(i, j, x)| format!("({i},{j}): {x}")).collect();
                out.push_str(&format!("\tresidual {}", ents.join("; ")));
            }
            out.push('\n');
        }
        out
    }
}

impl RelationReport<LaurentPoly> {
    /// Common vanishing locus of every failing residual of relation `id`.
    pub fn vanishing_locus(&self, id: RelationId) -> Option<VanishingLocus> {
        VanishingLocus::of(self.of(id).filter(|r| !r.holds()).flat_map(|r| r.residual.entries()))
    }
}

/// Every relation instance with objects up to `a.max_n`, and exponents
/// `0..=k_bound` for the edge relation.
pub fn check_relations<E: Entry>(a: &GeneratorAssignment<E>, k_bound: usize) -> RelationReport<E> {
    use RelationId::*;
    let mut out = Vec::new();
    let max_n = a.max_n;
    let eps = |inv: bool| if inv { "-1" } else { "+1" };
    for n in 2..=max_n {
        for i in 1..n {
            let (s, si) = (a.sigma(i, n, false), a.sigma(i, n, true));
            out.push(RelationInstance::new(Inverse, format!("i={i} n={n} s*s^-1"), s.mul(si), Mat::identity(n)));
            out.push(RelationInstance::new(Inverse, format!("i={i} n={n} s^-1*s"), si.mul(s), Mat::identity(n)));
        }
    }
    for n in 3..=max_n {
        for i in 1..n - 1 {
            let (x, y) = (a.sigma(i, n, false), a.sigma(i + 1, n, false));
            out.push(RelationInstance::new(Braid, format!("i={i} n={n} sts=tst"), x.mul(y).mul(x), y.mul(x).mul(y)));
        }
        for i in 1..n {
            for j in i + 2..n {
                let (x, y) = (a.sigma(i, n, false), a.sigma(j, n, false));
                out.push(RelationInstance::new(Braid, format!("i={i} j={j} n={n} st=ts"), x.mul(y), y.mul(x)));
            }
        }
    }
    for n in 2..max_n {
        for i in 1..n {
            for inv in [false, true] {
                let e = eps(inv);
                let (lo, hi) = (a.sigma(i, n, inv), a.sigma(i + 1, n + 1, inv));
                out.push(RelationInstance::new(Commute, format!("i={i} n={n} e={e} iota"), hi.mul(a.iota(n)), a.iota(n).mul(lo)));
                out.push(RelationInstance::new(Commute, format!("i={i} n={n} e={e} pi"), lo.mul(a.pi(n + 1)), a.pi(n + 1).mul(hi)));
            }
        }
    }
    for n in 1..max_n {
        let s = a.sigma(1, n + 1, false);
        let mut p = Mat::identity(n + 1);
        for k in 0..=k_bound {
            let lhs = a.pi(n + 1).mul(&p).mul(a.iota(n));
            let rhs = if k % 2 == 0 { Mat::identity(n) } else { a.iota(n - 1).mul(a.pi(n)) };
            out.push(RelationInstance::new(Edge, format!("k={k} n={n}"), lhs, rhs));
            p = p.mul(s);
        }
    }
    RelationReport { max_n, k_bound, instances: out }
}

/// `pi_{n+1} sigma_{1,n+1}^k iota_n` by multiplication, next to the closed
/// form `((-t)^k + t)/(t+1) (+) I_{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeEffect {
    pub product: LaurentMatrix,
    pub closed_form: LaurentMatrix,
}

/// Edge value for the given assignment; errors if the division in the closed
/// form is inexact or the two sides differ.
pub fn edge_effect_value(a: &GeneratorAssignment<LaurentPoly>, k: usize, n: usize) -> Result<EdgeEffect, BurauError> {
    if n == 0 {
        return Err(BurauError::EdgeAtZero);
    }
    if n + 1 > a.max_n {
        return Err(BurauError::BeyondAssignment(n + 1));
    }
    let product = a.pi(n + 1).mul(&a.sigma(1, n + 1, false).pow(k)).mul(a.iota(n));
    let t = LaurentPoly::t();
    let head = t.neg().pow(k as u32).add(&t).div_exact(&t.add(&LaurentPoly::one()))?;
    let closed_form = Mat::from_rows(vec![vec![head]]).direct_sum(&Mat::identity(n - 1));
    if product != closed_form {
        return Err(BurauError::ClosedFormMismatch { k, n, product: product.to_string(), closed: closed_form.to_string() });
    }
    Ok(EdgeEffect { product, closed_form })
}
