//! Smith normal form over the integers.

use super::matrix::IntMatrix;
use super::scalar::{ov, with_fallback, Cancel, Halt, Int};
use num_bigint::BigInt;

/// `u * a * v` is diagonal with entries `d` (padded by zeros), each dividing the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub d: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        self.d.iter().filter(|x| !x.is_zero()).count()
    }
}

/// Sizes above which the invariant-factor-only path switches to sparse elimination.
pub const SPARSE_THRESHOLD: usize = 64;

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    smith_normal_form_cancellable(a, &Cancel::new()).expect("not cancelled")
}

pub fn smith_normal_form_cancellable(a: &IntMatrix, cancel: &Cancel) -> Result<SmithForm, Halt> {
    let (r, c) = a.shape();
    with_fallback(
        || {
            let m = a.to_dense::<i64>().ok_or(Halt::Overflow)?;
            let (d, u, v) = snf_dense(m, r, c, true, cancel)?;
            Ok(pack(r, c, &d, u, v))
        },
        || {
            let (d, u, v) = snf_dense(a.to_big_rows(), r, c, true, cancel)?;
            Ok(pack(r, c, &d, u, v))
        },
    )
}

fn pack<T: Int>(r: usize, c: usize, d: &[T], u: Option<Vec<Vec<T>>>, v: Option<Vec<Vec<T>>>) -> SmithForm {
    SmithForm {
        d: d.iter().map(|x| x.to_big()).collect(),
        u: IntMatrix::from_dense(r, r, &u.unwrap()),
        v: IntMatrix::from_dense(c, c, &v.unwrap()),
    }
}

/// Invariant factors only (nonzero diagonal entries, ascending by divisibility).
/// Large inputs go through a sparse unit-pivot pass first.
pub fn invariant_factors(a: &IntMatrix) -> Vec<BigInt> {
    invariant_factors_cancellable(a, &Cancel::new()).expect("not cancelled")
}

pub fn invariant_factors_cancellable(a: &IntMatrix, cancel: &Cancel) -> Result<Vec<BigInt>, Halt> {
    let (r, c) = a.shape();
    let big = r > SPARSE_THRESHOLD || c > SPARSE_THRESHOLD;
    with_fallback(
        || {
            let m = a.to_dense::<i64>().ok_or(Halt::Overflow)?;
            factors_generic(m, r, c, big, cancel)
        },
        || factors_generic(a.to_big_rows(), r, c, big, cancel),
    )
}

fn factors_generic<T: Int>(m: Vec<Vec<T>>, r: usize, c: usize, sparse: bool, cancel: &Cancel) -> Result<Vec<BigInt>, Halt> {
    let (units, rest, rr, rc) = if sparse { sparse_unit_pass(m, c, cancel)? } else { (0, m, r, c) };
    let (d, _, _) = snf_dense(rest, rr, rc, false, cancel)?;
    let mut out: Vec<BigInt> = vec![BigInt::from(1); units];
    out.extend(d.iter().filter(|x| !x.is_zero()).map(|x| x.to_big()));
    Ok(out)
}

/// Markowitz-style elimination restricted to unit pivots. Returns the number of
/// unit pivots removed and the dense residual matrix.
fn sparse_unit_pass<T: Int>(m: Vec<Vec<T>>, c: usize, cancel: &Cancel) -> Result<(usize, Vec<Vec<T>>, usize, usize), Halt> {
    let mut rows: Vec<Vec<(usize, T)>> = m
        .into_iter()
        .map(|row| row.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect())
        .collect();
    let mut alive_row = vec![true; rows.len()];
    let mut alive_col = vec![true; c];
    let mut col_count = vec![0usize; c];
    for row in &rows {
        for (j, _) in row {
            col_count[*j] += 1;
        }
    }
    let mut units = 0;
    loop {
        cancel.check()?;
        // choose the unit entry with the smallest Markowitz cost
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, row) in rows.iter().enumerate() {
            if !alive_row[i] {
                continue;
            }
            for (j, x) in row {
                if x.abs_is_one() {
                    let cost = (row.len() - 1) * (col_count[*j] - 1);
                    if best.map_or(true, |b| cost < b.2) {
                        best = Some((i, *j, cost));
                    }
                }
            }
            if matches!(best, Some((_, _, 0))) {
                break;
            }
        }
        let Some((pi, pj, _)) = best else { break };
        let prow = std::mem::take(&mut rows[pi]);
        let pv = prow.iter().find(|(j, _)| *j == pj).unwrap().1.clone();
        alive_row[pi] = false;
        for (j, _) in &prow {
            col_count[*j] -= 1;
        }
        for i in 0..rows.len() {
            if !alive_row[i] {
                continue;
            }
            let Some(f) = rows[i].iter().find(|(j, _)| *j == pj).map(|(_, x)| x.clone()) else { continue };
            // row_i -= (f / pv) * prow, with pv = +-1
            let q = if pv.is_negative() { ov(f.neg())? } else { f };
            let old = std::mem::take(&mut rows[i]);
            for (j, _) in &old {
                col_count[*j] -= 1;
            }
            let merged = axpy_sparse(&old, &prow, &q)?;
            for (j, _) in &merged {
                col_count[*j] += 1;
            }
            rows[i] = merged;
        }
        alive_col[pj] = false;
        units += 1;
    }
    // The pivot rows were removed; remaining rows no longer reference pivot columns.
    let cols: Vec<usize> = (0..c).filter(|&j| alive_col[j]).collect();
    let mut index = vec![usize::MAX; c];
    for (k, &j) in cols.iter().enumerate() {
        index[j] = k;
    }
    let mut rest = Vec::new();
    for (i, row) in rows.into_iter().enumerate() {
        if !alive_row[i] {
            continue;
        }
        let mut dense = vec![T::zero(); cols.len()];
        for (j, x) in row {
            dense[index[j]] = x;
        }
        rest.push(dense);
    }
    let rr = rest.len();
    Ok((units, rest, rr, cols.len()))
}

/// `a - q * b` for sorted sparse rows.
fn axpy_sparse<T: Int>(a: &[(usize, T)], b: &[(usize, T)], q: &T) -> Result<Vec<(usize, T)>, Halt> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            let v = ov(ov(q.mul(&b[j].1))?.neg())?;
            out.push((b[j].0, v));
            j += 1;
        } else {
            let v = ov(a[i].1.sub(&ov(q.mul(&b[j].1))?))?;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Ok(out)
}

type Dense<T> = Vec<Vec<T>>;

/// Dense Smith normal form. Returns the diagonal (length min(r, c)) and, when
/// requested, the unimodular transforms with `u * a * v = diag`.
pub(crate) fn snf_dense<T: Int>(
    mut a: Dense<T>,
    r: usize,
    c: usize,
    transforms: bool,
    cancel: &Cancel,
) -> Result<(Vec<T>, Option<Dense<T>>, Option<Dense<T>>), Halt> {
    let ident = |n: usize| -> Dense<T> {
        (0..n).map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect()
    };
    let mut u = if transforms { Some(ident(r)) } else { None };
    let mut v = if transforms { Some(ident(c)) } else { None };
    let k = r.min(c);
    for t in 0..k {
        cancel.check()?;
        // pivot: smallest nonzero magnitude in the trailing block
        let mut piv: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                if !a[i][j].is_zero() && piv.map_or(true, |(pi, pj)| a[i][j].abs_lt(&a[pi][pj])) {
                    piv = Some((i, j));
                    if a[i][j].abs_is_one() {
                        break;
                    }
                }
            }
            if piv.is_some_and(|(pi, pj)| a[pi][pj].abs_is_one()) {
                break;
            }
        }
        let Some((pi, pj)) = piv else { break };
        a.swap(t, pi);
        if let Some(u) = u.as_mut() {
            u.swap(t, pi);
        }
        if pj != t {
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            if let Some(v) = v.as_mut() {
                for row in v.iter_mut() {
                    row.swap(t, pj);
                }
            }
        }
        loop {
            cancel.check()?;
            // clear column t below the pivot
            for i in t + 1..r {
                if a[i][t].is_zero() {
                    continue;
                }
                row_combine(&mut a, t, i, t, c, u.as_mut(), r)?;
            }
            // clear row t right of the pivot
            let mut dirty = false;
            for j in t + 1..c {
                if a[t][j].is_zero() {
                    continue;
                }
                col_combine(&mut a, t, j, t, r, v.as_mut(), c)?;
                dirty = true;
            }
            if dirty && (t + 1..r).any(|i| !a[i][t].is_zero()) {
                continue;
            }
            // enforce divisibility of the trailing block by the pivot
            let p = a[t][t].clone();
            let mut bad = None;
            'outer: for i in t + 1..r {
                for j in t + 1..c {
                    if !a[i][j].is_zero() && !divides(&p, &a[i][j])? {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => {
                    // row_t += row_i
                    for j in 0..c {
                        a[t][j] = ov(a[t][j].add(&a[i][j]))?;
                    }
                    if let Some(u) = u.as_mut() {
                        for j in 0..r {
                            u[t][j] = ov(u[t][j].add(&u[i][j]))?;
                        }
                    }
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for j in 0..c {
                a[t][j] = ov(a[t][j].neg())?;
            }
            if let Some(u) = u.as_mut() {
                for j in 0..r {
                    u[t][j] = ov(u[t][j].neg())?;
                }
            }
        }
    }
    let d = (0..k).map(|i| a[i][i].clone()).collect();
    Ok((d, u, v))
}

fn divides<T: Int>(p: &T, x: &T) -> Result<bool, Halt> {
    let q = x.div_floor(p);
    Ok(ov(q.mul(p))? == *x)
}

/// Replace rows t and i by a unimodular combination that zeroes a[i][col].
fn row_combine<T: Int>(a: &mut Dense<T>, t: usize, i: usize, col: usize, c: usize, u: Option<&mut Dense<T>>, r: usize) -> Result<(), Halt> {
    let x = a[t][col].clone();
    let y = a[i][col].clone();
    let (g, s, w) = if divides(&x, &y)? { (x.clone(), T::one(), T::zero()) } else { ov(T::ext_gcd(&x, &y))? };
    let xg = x.div_floor(&g);
    let yg = y.div_floor(&g);
    let apply = |m: &mut Dense<T>, width: usize| -> Result<(), Halt> {
        for j in 0..width {
            let at = m[t][j].clone();
            let ai = m[i][j].clone();
            if at.is_zero() && ai.is_zero() {
                continue;
            }
            m[t][j] = ov(ov(s.mul(&at))?.add(&ov(w.mul(&ai))?))?;
            m[i][j] = ov(ov(xg.mul(&ai))?.sub(&ov(yg.mul(&at))?))?;
        }
        Ok(())
    };
    apply(a, c)?;
    if let Some(u) = u {
        apply(u, r)?;
    }
    Ok(())
}

/// Column analogue of [`row_combine`], zeroing a[row][j] using column t.
fn col_combine<T: Int>(a: &mut Dense<T>, t: usize, j: usize, row: usize, r: usize, v: Option<&mut Dense<T>>, c: usize) -> Result<(), Halt> {
    let x = a[row][t].clone();
    let y = a[row][j].clone();
    let (g, s, w) = if divides(&x, &y)? { (x.clone(), T::one(), T::zero()) } else { ov(T::ext_gcd(&x, &y))? };
    let xg = x.div_floor(&g);
    let yg = y.div_floor(&g);
    let apply = |m: &mut Dense<T>, height: usize| -> Result<(), Halt> {
        for i in 0..height {
            let at = m[i][t].clone();
            let aj = m[i][j].clone();
            if at.is_zero() && aj.is_zero() {
                continue;
            }
            m[i][t] = ov(ov(s.mul(&at))?.add(&ov(w.mul(&aj))?))?;
            m[i][j] = ov(ov(xg.mul(&aj))?.sub(&ov(yg.mul(&at))?))?;
        }
        Ok(())
    };
    apply(a, r)?;
    if let Some(v) = v {
        apply(v, c)?;
    }
    Ok(())
}

/// Inverse of a unimodular matrix, via its Smith form.
pub fn unimodular_inverse(m: &IntMatrix) -> IntMatrix {
    // u m v = I  =>  m^{-1} = v u
    let s = smith_normal_form(m);
    assert!(s.d.iter().all(|x| *x == BigInt::from(1)), "matrix is not unimodular");
    s.v.mul(&s.u)
}
