//! The normalized bar complex with coefficients, written out cell by cell.
//! Only feasible for small groups; serves as an independent check on the
//! resolution used elsewhere.

use super::perm::GModule;
use super::HomologyError;
use crate::linalg::{homology_of_complex, invariant_factors, saturated_rank, sparse_rank, AbMap, Elimination, FgAbGroup, IntMatrix, Invariants, Ring};
use num_bigint::BigInt;

/// Largest number of generators of `C_{d+1}` handled over Z (dense) and over fields (sparse).
pub const BAR_CELLS_Z: usize = 3000;
pub const BAR_CELLS_FIELD: usize = 400_000;

/// `H_d(G; M)` from `M (x)_G B_*` with `B` the normalized bar resolution,
/// `d(m [g_1|...|g_k]) = g_1^{-1} m [g_2|...] + sum (-1)^i m [...|g_i g_{i+1}|...] + (-1)^k m [...|g_{k-1}]`.
pub fn normalized_bar_homology(module: &GModule, d: usize, ring: Ring) -> Result<Invariants, HomologyError> {
    let nontrivial = module.group().order() - 1;
    let count = |k: usize| nontrivial.checked_pow(k as u32).unwrap_or(usize::MAX);
    let space = Coefficients::new(module, ring);
    let size = count(d + 1).saturating_mul(space.dim);
    let cap = if ring.is_field() { BAR_CELLS_FIELD } else { BAR_CELLS_Z };
    if size > cap {
        return Err(HomologyError::Cap { what: "bar complex cells".into(), size, cap });
    }
    match ring {
        Ring::Z => {
            let c = |k: usize| FgAbGroup::direct_sum(&vec![module.carrier(); count(k)]);
            let map = |k: usize| -> AbMap {
                let (src, tgt) = (c(k), if k == 0 { FgAbGroup::zero() } else { c(k - 1) });
                let mut m = IntMatrix::zero(tgt.ngens(), src.ngens());
                if k > 0 {
                    for (j, col) in columns(module, &space, k).into_iter().enumerate() {
                        for (i, v) in col {
                            m.set(i as usize, j, BigInt::from(v));
                        }
                    }
                }
                AbMap { source: src, target: tgt, matrix: m }
            };
            Ok(homology_of_complex(&map(d + 1), &map(d), Ring::Z)?.invariants())
        }
        _ => {
            let rank = |k: usize| -> Result<usize, HomologyError> {
                if k == 0 {
                    return Ok(0);
                }
                let cols = columns(module, &space, k);
                let rows = count(k - 1) * space.dim;
                if let Ring::Fp(p) = ring {
                    return match sparse_rank(rows, &cols, Some(p)) {
                        Elimination::Rank(r) => Ok(r),
                        Elimination::Undecided => unreachable!("field elimination always decides"),
                    };
                }
                if let Some((r, _)) = saturated_rank(rows, &cols) {
                    return Ok(r);
                }
                // i64 overflow during elimination: dense big-integer fallback, small cases only
                if cols.len() > BAR_CELLS_Z {
                    return Err(HomologyError::Cap { what: "bar complex cells (dense)".into(), size: cols.len(), cap: BAR_CELLS_Z });
                }
                let mut m = IntMatrix::zero(rows, cols.len());
                for (j, col) in cols.iter().enumerate() {
                    for &(i, v) in col {
                        m.set_i64(i as usize, j, v);
                    }
                }
                Ok(invariant_factors(&m).len())
            };
            let dim = count(d) * space.dim - rank(d)? - rank(d + 1)?;
            Ok(match ring {
                Ring::Fp(p) => Invariants { torsion: vec![BigInt::from(p); dim], free_rank: 0 },
                _ => Invariants { torsion: vec![], free_rank: dim },
            })
        }
    }
}

/// The action on the coefficients actually used: the full presentation over
/// Z, `M / p M` over F_p, `M / torsion` over Q.
struct Coefficients {
    dim: usize,
    /// `action[g]` as dense rows, already reduced for F_p.
    action: Vec<Vec<Vec<i64>>>,
}

impl Coefficients {
    fn new(module: &GModule, ring: Ring) -> Self {
        let g = module.group();
        if ring == Ring::Z {
            let dim = module.carrier().ngens();
            let action = (0..g.order() as u32).map(|a| module.action(a).to_dense::<i64>().expect("small action entries")).collect();
            return Coefficients { dim, action };
        }
        let s = module.carrier().simplify();
        let inv = s.group.invariants();
        let nt = inv.torsion.len();
        let keep: Vec<usize> = match ring {
            Ring::Fp(p) => {
                let pb = BigInt::from(p);
                (0..nt).filter(|&i| (&inv.torsion[i] % &pb) == BigInt::from(0)).chain(nt..nt + inv.free_rank).collect()
            }
            _ => (nt..nt + inv.free_rank).collect(),
        };
        let action = (0..g.order() as u32)
            .map(|a| {
                let m = s.to.mul(module.action(a)).mul(&s.from).select(&keep, &keep);
                let mut rows = m.to_dense::<i64>().expect("small action entries");
                if let Ring::Fp(p) = ring {
                    for x in rows.iter_mut().flatten() {
                        *x = x.rem_euclid(p as i64);
                    }
                }
                rows
            })
            .collect();
        Coefficients { dim: keep.len(), action }
    }
}

/// Columns of `d_k` in the basis `(tuple, coordinate)`, index `tuple * dim + coordinate`.
fn columns(module: &GModule, space: &Coefficients, k: usize) -> Vec<Vec<(u32, i64)>> {
    let g = module.group();
    let base = g.order() - 1;
    let dim = space.dim;
    let total = base.pow(k as u32);
    let index = |t: &[u32]| -> usize { t.iter().fold(0, |acc, &x| acc * base + (x as usize - 1)) };
    let mut out = Vec::with_capacity(total * dim);
    let mut t = vec![0u32; k];
    for ti in 0..total {
        let mut r = ti;
        for slot in t.iter_mut().rev() {
            *slot = (r % base) as u32 + 1;
            r /= base;
        }
        for b in 0..dim {
            let mut col: Vec<(u32, i64)> = Vec::new();
            let ginv = g.inv(t[0]) as usize;
            let row0 = index(&t[1..]) * dim;
            for (i, row) in space.action[ginv].iter().enumerate() {
                if row[b] != 0 {
                    col.push(((row0 + i) as u32, row[b]));
                }
            }
            for i in 1..k {
                let p = g.mul(t[i - 1], t[i]);
                if p == g.identity() {
                    continue;
                }
                let mut face = t[..i - 1].to_vec();
                face.push(p);
                face.extend_from_slice(&t[i + 1..]);
                let sign = if i % 2 == 0 { 1 } else { -1 };
                col.push(((index(&face) * dim + b) as u32, sign));
            }
            let sign = if k % 2 == 0 { 1 } else { -1 };
            col.push(((index(&t[..k - 1]) * dim + b) as u32, sign));
            col.sort_unstable();
            col.dedup_by(|a, b| {
                if a.0 == b.0 {
                    b.1 += a.1;
                    true
                } else {
                    false
                }
            });
            col.retain(|e| e.1 != 0);
            out.push(col);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::{bar_homology, PermGroup};
    use std::sync::Arc;

    #[test]
    fn cyclic_of_order_two() {
        let g = Arc::new(PermGroup::symmetric(2).unwrap());
        let m = GModule::trivial(g.clone(), FgAbGroup::free(1));
        assert_eq!(normalized_bar_homology(&m, 1, Ring::Z).unwrap(), Invariants { torsion: vec![2.into()], free_rank: 0 });
        assert_eq!(normalized_bar_homology(&m, 2, Ring::Z).unwrap(), Invariants { torsion: vec![], free_rank: 0 });
        assert_eq!(normalized_bar_homology(&m, 2, Ring::Fp(2)).unwrap().torsion.len(), 1);
        let sign = GModule::new(g, FgAbGroup::free(1), vec![IntMatrix::from_rows(&[vec![-1]])]).unwrap();
        assert_eq!(normalized_bar_homology(&sign, 0, Ring::Z).unwrap(), Invariants { torsion: vec![2.into()], free_rank: 0 });
        assert_eq!(normalized_bar_homology(&sign, 1, Ring::Z).unwrap(), Invariants { torsion: vec![], free_rank: 0 });
    }

    #[test]
    fn agrees_with_resolution_on_s3() {
        let g = Arc::new(PermGroup::symmetric(3).unwrap());
        let m = GModule::trivial(g, FgAbGroup::free(1));
        let h = bar_homology(&m, 2, Ring::Z).unwrap();
        for d in 0..=2 {
            assert_eq!(normalized_bar_homology(&m, d, Ring::Z).unwrap(), h[d].group.invariants(), "d = {d}");
        }
    }
}
