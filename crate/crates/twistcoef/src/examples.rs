//! Builders for concrete coefficient systems: constant functors, degree-q
//! homology of configuration products (Kunneth), ordered decompositions of a
//! fixed type or type interval, and the failed attempt at sign coefficients.

use crate::functor::{FunctorError, Generators, TruncatedFunctor};
use crate::linalg::{FgAbGroup, IntMatrix, Ring};
use crate::sigma::{transposition, PartialInjection, SigmaCategory};
use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

#[derive(Debug, thiserror::Error, Clone)]
pub enum ExampleError {
    #[error("graded basis must start with b0 = 1")]
    NotConnected,
    #[error("label homology has torsion; over Z the Kunneth system needs a free basis")]
    NotFlat,
    #[error("partition parts must be positive")]
    BadPartition,
    #[error("lower end {0} is not below upper end {1}")]
    NotAnInterval(String, String),
    #[error(transparent)]
    Functor(#[from] FunctorError),
}

/// Betti numbers of a path-connected label space, over the ring in use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedBasis {
    ranks: Vec<usize>,
    has_torsion: bool,
}

impl GradedBasis {
    pub fn new(ranks: Vec<usize>) -> Result<Self, ExampleError> {
        if ranks.first() != Some(&1) {
            return Err(ExampleError::NotConnected);
        }
        Ok(GradedBasis { ranks, has_torsion: false })
    }

    /// Ranks of a space whose integral homology also has torsion; accepted
    /// only over fields (where `ranks` must be the field Betti numbers).
    pub fn with_torsion(ranks: Vec<usize>) -> Result<Self, ExampleError> {
        Ok(GradedBasis { has_torsion: true, ..Self::new(ranks)? })
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn top(&self) -> usize {
        self.ranks.len() - 1
    }

    /// Largest k with b_1 = ... = b_k = 0.
    pub fn connectivity(&self) -> usize {
        self.ranks[1..].iter().take_while(|&&b| b == 0).count()
    }

    /// Degrees of the basis classes; class 0 is the unit.
    fn class_degrees(&self) -> Vec<usize> {
        self.ranks.iter().enumerate().flat_map(|(d, &b)| std::iter::repeat_n(d, b)).collect()
    }
}

/// An ordered partition (lambda_1, ..., lambda_k), parts positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionType {
    pub parts: Vec<usize>,
}

impl PartitionType {
    pub fn new(parts: Vec<usize>) -> Result<Self, ExampleError> {
        if parts.contains(&0) {
            return Err(ExampleError::BadPartition);
        }
        Ok(PartitionType { parts })
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// `self <= o`: some injection a of parts with `self_i <= o_a(i)`.
    pub fn le(&self, o: &PartitionType) -> bool {
        fn rec(i: usize, a: &[usize], b: &[usize], used: &mut Vec<bool>) -> bool {
            if i == a.len() {
                return true;
            }
            for j in 0..b.len() {
                if !used[j] && a[i] <= b[j] {
                    used[j] = true;
                    if rec(i + 1, a, b, used) {
                        return true;
                    }
                    used[j] = false;
                }
            }
            false
        }
        rec(0, &self.parts, &o.parts, &mut vec![false; o.parts.len()])
    }
}

impl fmt::Display for PartitionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl std::str::FromStr for PartitionType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<usize> = t
            .split(',')
            .filter(|x| !x.trim().is_empty())
            .map(|x| x.trim().parse::<usize>().map_err(|_| format!("bad part `{x}` in `{s}`")))
            .collect::<Result<_, _>>()?;
        PartitionType::new(parts).map_err(|e| e.to_string())
    }
}

/// Linearise an action on finite bases: `act(f, b)` is `Some((image, sign))` or
/// `None` for zero.
fn linearised<B: Clone + Eq + Hash>(
    ring: Ring,
    trunc: usize,
    basis: impl Fn(usize) -> Vec<B>,
    act: impl Fn(&PartialInjection, &B) -> Option<(B, i64)>,
) -> Result<TruncatedFunctor, FunctorError> {
    let bases: Vec<Vec<B>> = (0..=trunc).map(&basis).collect();
    let index: Vec<HashMap<B, usize>> =
        bases.iter().map(|bs| bs.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect()).collect();
    let groups = bases.iter().map(|b| ring.free_module(b.len())).collect();
    TruncatedFunctor::from_action(ring, groups, |f| {
        let (m, n) = (f.source(), f.target());
        let mut mat = IntMatrix::zero(bases[n].len(), bases[m].len());
        for (j, b) in bases[m].iter().enumerate() {
            if let Some((img, sign)) = act(f, b) {
                mat.set_i64(index[n][&img], j, sign);
            }
        }
        mat
    })
}

/// `T_n = A` with every morphism acting as the identity.
pub fn constant_functor(a: &FgAbGroup, ring: Ring, trunc: usize) -> Result<TruncatedFunctor, ExampleError> {
    let g = ring.base_change(a);
    let groups = vec![g.clone(); trunc + 1];
    let t = TruncatedFunctor::from_action(ring, groups, |_| IntMatrix::identity(g.ngens()))?;
    Ok(t.with_family(format!("const {}", a.invariants())))
}

/// Degree-q part of the n-fold tensor power of the graded basis, with the
/// Koszul sign on odd classes when `koszul` is set.
pub fn kunneth_functor_signed(
    z: &GradedBasis,
    q: usize,
    ring: Ring,
    trunc: usize,
    koszul: bool,
) -> Result<TruncatedFunctor, ExampleError> {
    if ring == Ring::Z && z.has_torsion {
        return Err(ExampleError::NotFlat);
    }
    let deg = z.class_degrees();
    let words = |n: usize| -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n);
        fn rec(n: usize, left: usize, deg: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == n {
                if left == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            for (c, &d) in deg.iter().enumerate() {
                if d <= left {
                    cur.push(c);
                    rec(n, left - d, deg, cur, out);
                    cur.pop();
                }
            }
        }
        rec(n, q, &deg, &mut cur, &mut out);
        out
    };
    let t = linearised(ring, trunc, words, |f, w| {
        let mut out = vec![0usize; f.target()];
        let mut placed: Vec<(usize, usize)> = Vec::new();
        for (i, &c) in w.iter().enumerate() {
            match f.get(i + 1) {
                Some(p) => {
                    out[p - 1] = c;
                    if deg[c] % 2 == 1 {
                        placed.push((i, p));
                    }
                }
                None if deg[c] > 0 => return None,
                None => {}
            }
        }
        let mut sign = 1;
        if koszul {
            for a in 0..placed.len() {
                for b in a + 1..placed.len() {
                    if placed[a].1 > placed[b].1 {
                        sign = -sign;
                    }
                }
            }
        }
        Some((out, sign))
    })?;
    Ok(t.with_family(format!("kunneth {:?} q={q}", z.ranks)))
}

/// Kunneth system with the Koszul sign convention.
pub fn kunneth_functor(z: &GradedBasis, q: usize, ring: Ring, trunc: usize) -> Result<TruncatedFunctor, ExampleError> {
    kunneth_functor_signed(z, q, ring, trunc, true)
}

/// Tuples of pairwise disjoint subsets of {1..n}, each a sorted vector,
/// whose sizes are listed by `sizes`.
fn decompositions_of_sizes(n: usize, sizes: &[usize]) -> Vec<Vec<Vec<usize>>> {
    fn subsets_of_size(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if pool.len() < k {
            return vec![];
        }
        let mut out = Vec::new();
        for (i, &x) in pool.iter().enumerate() {
            for mut rest in subsets_of_size(&pool[i + 1..], k - 1) {
                rest.insert(0, x);
                out.push(rest);
            }
        }
        out
    }
    fn rec(pool: Vec<usize>, sizes: &[usize], cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        let Some((&k, rest)) = sizes.split_first() else {
            out.push(cur.clone());
            return;
        };
        for s in subsets_of_size(&pool, k) {
            let left: Vec<usize> = pool.iter().copied().filter(|x| !s.contains(x)).collect();
            cur.push(s);
            rec(left, rest, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec((1..=n).collect(), sizes, &mut Vec::new(), &mut out);
    out
}

/// Free module on ordered decompositions of type lambda; a morphism acts
/// when it is defined on every point involved.
pub fn partition_functor(lambda: &PartitionType, ring: Ring, trunc: usize) -> Result<TruncatedFunctor, ExampleError> {
    let t = linearised(
        ring,
        trunc,
        |n| decompositions_of_sizes(n, &lambda.parts),
        |f, d| {
            let mut out = Vec::with_capacity(d.len());
            for s in d {
                let mut img: Vec<usize> = s.iter().map(|&x| f.get(x)).collect::<Option<_>>()?;
                img.sort_unstable();
                out.push(img);
            }
            Some((out, 1))
        },
    )?;
    Ok(t.with_family(format!("partition {}", lambda.parts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","))))
}

/// All types nu with `lambda <= nu <= mu` (as tuples of positive parts).
pub fn interval_types(lambda: &PartitionType, mu: &PartitionType) -> Vec<PartitionType> {
    let max_part = mu.parts.iter().copied().max().unwrap_or(0);
    let max_len = mu.parts.len();
    let mut out = Vec::new();
    fn rec(cur: &mut Vec<usize>, max_part: usize, max_len: usize, budget: usize, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        if cur.len() == max_len {
            return;
        }
        for p in 1..=max_part.min(budget) {
            cur.push(p);
            rec(cur, max_part, max_len, budget - p, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    rec(&mut Vec::new(), max_part, max_len, mu.size(), &mut raw);
    for parts in raw {
        let nu = PartitionType { parts };
        if lambda.le(&nu) && nu.le(mu) {
            out.push(nu);
        }
    }
    out
}

/// Free module on ordered decompositions whose type lies in `[lambda, mu]`.
/// A morphism sends each block to the image of its defined points; blocks
/// that become empty are dropped, and the result is zero unless its type is
/// still in the interval.
pub fn interval_partition_functor(
    lambda: &PartitionType,
    mu: &PartitionType,
    ring: Ring,
    trunc: usize,
) -> Result<TruncatedFunctor, ExampleError> {
    if !lambda.le(mu) {
        return Err(ExampleError::NotAnInterval(lambda.to_string(), mu.to_string()));
    }
    let types = interval_types(lambda, mu);
    let in_interval = |d: &Vec<Vec<usize>>| {
        let nu = PartitionType { parts: d.iter().map(|s| s.len()).collect() };
        lambda.le(&nu) && nu.le(mu)
    };
    let t = linearised(
        ring,
        trunc,
        |n| types.iter().flat_map(|nu| decompositions_of_sizes(n, &nu.parts)).collect(),
        |f, d| {
            let mut out = Vec::with_capacity(d.len());
            for s in d {
                let mut img: Vec<usize> = s.iter().filter_map(|&x| f.get(x)).collect();
                if img.is_empty() {
                    continue;
                }
                img.sort_unstable();
                out.push(img);
            }
            in_interval(&out).then_some((out, 1))
        },
    )?;
    Ok(t.with_family(format!("interval {} {}", lambda, mu)))
}

/// Outcome of trying to extend the sign representation to all morphisms.
#[derive(Clone, Debug)]
pub struct SignAttemptReport {
    /// A composable pair (g, f) with T(g o f) != T(g) T(f).
    pub failure: Option<(PartialInjection, PartialInjection)>,
    pub lhs: Option<IntMatrix>,
    pub rhs: Option<IntMatrix>,
    /// Restricted to permutations the assignment is a group action.
    pub permutations_valid: bool,
    /// Restricted to composites of the iota's it is a functor.
    pub iota_only_valid: bool,
}

/// `T_n = Z[Z/2]`, iota and pi acting as the identity, each transposition
/// swapping the two basis elements (multiplication by the sign). Not a
/// functor; built without validation.
pub fn sign_attempt_functor(trunc: usize) -> Result<TruncatedFunctor, ExampleError> {
    let swap = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
    let id = IntMatrix::identity(2);
    let gens = Generators {
        iota: vec![id.clone(); trunc],
        pi: vec![id; trunc],
        sigma: (0..=trunc).map(|n| vec![swap.clone(); n.saturating_sub(1)]).collect(),
    };
    Ok(TruncatedFunctor::from_generators_unchecked(Ring::Z, vec![FgAbGroup::free(2); trunc + 1], gens)?.with_family("sign-attempt"))
}

/// Searches objects `<= 2` for a failing composite of [`sign_attempt_functor`]
/// and checks the restrictions to permutations and to iota-composites.
pub fn sign_extension_attempt(trunc: usize) -> Result<SignAttemptReport, ExampleError> {
    let swap = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
    let id = IntMatrix::identity(2);
    let t = sign_attempt_functor(trunc)?;

    let bound = trunc.min(2);
    let cat = SigmaCategory::new(bound);
    let mut failure = None;
    let (mut lhs, mut rhs) = (None, None);
    'search: for a in 0..=bound {
        for b in 0..=bound {
            for c in 0..=bound {
                for f in cat.enumerate_hom(a, b).map_err(FunctorError::from)?.iter() {
                    for g in cat.enumerate_hom(b, c).map_err(FunctorError::from)?.iter() {
                        let l = t.apply(&g.compose(f).map_err(FunctorError::from)?)?;
                        let r = t.apply(g)?.compose(&t.apply(f)?).map_err(FunctorError::from)?;
                        if !l.equals(&r) {
                            failure = Some((g.clone(), f.clone()));
                            lhs = Some(l.matrix);
                            rhs = Some(r.matrix);
                            break 'search;
                        }
                    }
                }
            }
        }
    }

    let mut permutations_valid = true;
    for n in 0..=trunc.min(4) {
        let perms: Vec<PartialInjection> =
            SigmaCategory::new(n).enumerate_hom(n, n).map_err(FunctorError::from)?.iter().filter(|p| p.is_bijection()).cloned().collect();
        for g in &perms {
            for h in &perms {
                let l = t.apply(&g.compose(h).map_err(FunctorError::from)?)?;
                let r = t.apply(g)?.compose(&t.apply(h)?).map_err(FunctorError::from)?;
                permutations_valid &= l.equals(&r);
            }
        }
        // each transposition acts as a swap (sign -1)
        for i in 1..n {
            permutations_valid &= t.apply(&transposition(i, n).map_err(FunctorError::from)?)?.matrix == swap;
        }
    }

    let mut iota_only_valid = true;
    for m in 0..=trunc {
        for n in m..=trunc {
            let shift: Vec<Option<usize>> = (1..=m).map(|i| Some(i + n - m)).collect();
            let f = PartialInjection::new(m, n, &shift).map_err(FunctorError::from)?;
            iota_only_valid &= t.apply(&f)?.matrix == id;
        }
    }
    Ok(SignAttemptReport { failure, lhs, rhs, permutations_valid, iota_only_valid })
}

/// Number of orbits of the permutation action on the standard basis of
/// `T_n` (basis vectors mapped to basis vectors up to sign).
pub fn basis_orbit_count(t: &TruncatedFunctor, n: usize) -> Result<usize, FunctorError> {
    let d = t.group(n).ngens();
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for i in 1..n {
        let m = t.apply(&transposition(i, n)?)?.matrix;
        for j in 0..d {
            for r in 0..d {
                if !m.is_entry_zero(r, j) {
                    let (a, b) = (find(&mut parent, r), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
    }
    Ok((0..d).filter(|&x| find(&mut parent, x) == x).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Invariants;

    fn free(r: usize) -> Invariants {
        Invariants { torsion: vec![], free_rank: r }
    }

    #[test]
    fn constant_examples() {
        let z = constant_functor(&FgAbGroup::free(1), Ring::Z, 4).unwrap();
        assert_eq!(z.degree().unwrap().exact(), Some(0));
        let zero = constant_functor(&FgAbGroup::zero(), Ring::Z, 4).unwrap();
        assert_eq!(zero.degree().unwrap().exact(), Some(-1));
        let z4 = constant_functor(&FgAbGroup::cyclic(4), Ring::Z, 4).unwrap();
        assert_eq!(z4.height().unwrap().exact(), Some(0));
    }

    #[test]
    fn kunneth_circle_over_q() {
        let circle = GradedBasis::new(vec![1, 1]).unwrap();
        let t = kunneth_functor(&circle, 1, Ring::Q, 4).unwrap();
        for n in 0..=4 {
            assert_eq!(t.invariants(n), free(n));
        }
        assert_eq!(t.degree().unwrap().exact(), Some(1));
        let q0 = kunneth_functor(&circle, 0, Ring::Q, 4).unwrap();
        assert_eq!(q0.degree().unwrap().exact(), Some(0));
        assert!((0..=4).all(|n| q0.invariants(n) == free(1)));
    }

    #[test]
    fn kunneth_rejects_torsion_over_z() {
        let z = GradedBasis::with_torsion(vec![1, 0, 1]).unwrap();
        assert!(matches!(kunneth_functor(&z, 2, Ring::Z, 2), Err(ExampleError::NotFlat)));
        assert!(kunneth_functor(&z, 2, Ring::Fp(2), 2).is_ok());
        assert!(GradedBasis::new(vec![2, 1]).is_err());
    }

    #[test]
    fn torus_swap_reverses_orientation() {
        // swapping the factors of T^2 has degree -1 on H_2
        let circle = GradedBasis::new(vec![1, 1]).unwrap();
        let t = kunneth_functor(&circle, 2, Ring::Z, 2).unwrap();
        assert_eq!(t.group(2).ngens(), 1);
        let sw = t.apply(&transposition(1, 2).unwrap()).unwrap();
        assert_eq!(sw.matrix, IntMatrix::from_rows(&[vec![-1]]));
        let unsigned = kunneth_functor_signed(&circle, 2, Ring::Z, 2, false).unwrap();
        assert_eq!(unsigned.apply(&transposition(1, 2).unwrap()).unwrap().matrix, IntMatrix::from_rows(&[vec![1]]));
    }

    #[test]
    fn partition_examples() {
        let p1 = partition_functor(&PartitionType::new(vec![1]).unwrap(), Ring::Z, 4).unwrap();
        assert!((0..=4).all(|n| p1.invariants(n) == free(n)));
        assert_eq!(p1.degree().unwrap().exact(), Some(1));
        let p11 = partition_functor(&PartitionType::new(vec![1, 1]).unwrap(), Ring::Z, 4).unwrap();
        assert!((0..=4).all(|n| p11.invariants(n) == free(n * n.saturating_sub(1))));
        for n in 2..=4 {
            assert_eq!(basis_orbit_count(&p11, n).unwrap(), 1);
        }
    }

    #[test]
    fn interval_order_and_point_interval() {
        let l: PartitionType = "1".parse().unwrap();
        let m: PartitionType = "2".parse().unwrap();
        assert!(l.le(&m) && !m.le(&l));
        assert!(matches!(interval_partition_functor(&m, &l, Ring::Z, 2), Err(ExampleError::NotAnInterval(..))));
        let t = interval_partition_functor(&l, &m, Ring::Z, 3).unwrap();
        assert_eq!(t.invariants(3), free(6));
        let same = interval_partition_functor(&l, &l, Ring::Z, 3).unwrap();
        let p = partition_functor(&l, Ring::Z, 3).unwrap();
        assert_eq!(same.generators(), p.generators());
        // the order only compares multisets of parts: (1,2) and (2,1) sit below each other
        let a: PartitionType = "1,2".parse().unwrap();
        let b: PartitionType = "2,1".parse().unwrap();
        assert!(a.le(&b) && b.le(&a));
    }

    #[test]
    fn sign_attempt_fails_but_restrictions_hold() {
        let r = sign_extension_attempt(3).unwrap();
        let (g, f) = r.failure.clone().expect("no functor exists");
        assert!(g.source().max(g.target()).max(f.source()) <= 2);
        assert_ne!(r.lhs, r.rhs);
        assert!(r.permutations_valid && r.iota_only_valid);
    }
}
