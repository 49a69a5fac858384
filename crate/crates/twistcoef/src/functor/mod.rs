//! Truncated coefficient systems: functors from the partial-injection
//! category, restricted to objects `0..=N`, to finitely generated abelian
//! groups. A functor is stored through the images of the generating
//! morphisms (iota, pi, adjacent transpositions); the value on any other
//! morphism is the product along its canonical generator word.

mod cross;
mod format;
mod ops;

pub use cross::{CheckOutcome, CrossEffect, DecompositionReport, LemmaBounds, LemmaReport};
pub use format::ParseError;
pub use ops::Truncated;

use crate::linalg::{AbMap, FgAbGroup, IntMatrix, LinalgError, Ring};
use crate::sigma::{decompose_into_generators, random_morphism, Atom, PartialInjection, SigmaCategory, SigmaError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use parking_lot::RwLock;
use rand::{Rng, SeedableRng};
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Debug, thiserror::Error, Clone)]
pub enum FunctorError {
    #[error("object {0} is beyond the truncation {1}")]
    BeyondTruncation(usize, usize),
    #[error("generator {0}: {1}")]
    BadGenerator(String, String),
    #[error("not functorial: T(g o f) != T(g) T(f) for g = {g}, f = {f}")]
    NotFunctorial { g: String, f: String },
    #[error("truncations differ: {0} vs {1}")]
    TruncationMismatch(usize, usize),
    #[error("rings differ: {0} vs {1}")]
    RingMismatch(Ring, Ring),
    #[error("subsets of the partition overlap or leave 1..={0}")]
    BadPartition(usize),
    #[error("cross-effect paths disagree at n = {n}, partition {partition}")]
    CrossEffectMismatch { n: usize, partition: String },
    #[error("delta needs truncation at least 1")]
    DeltaAtZero,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Sigma(#[from] SigmaError),
}

/// Generator matrices: `iota[n]` is T(n -> n+1), `pi[n-1]` is T(pi_n: n -> n-1),
/// `sigma[n][i-1]` is T of the transposition (i i+1) on n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generators {
    pub iota: Vec<IntMatrix>,
    pub pi: Vec<IntMatrix>,
    pub sigma: Vec<Vec<IntMatrix>>,
}

/// Row-sparse i64 copy of a generator matrix, for fast word evaluation.
#[derive(Clone, Debug)]
struct Sparse {
    by_row: Vec<Vec<(usize, i64)>>,
}

impl Sparse {
    fn from_matrix(m: &IntMatrix) -> Option<Self> {
        let mut by_row = vec![Vec::new(); m.rows()];
        for (i, row) in by_row.iter_mut().enumerate() {
            for j in 0..m.cols() {
                if !m.is_entry_zero(i, j) {
                    row.push((j, m.get_i64(i, j)?));
                }
            }
        }
        Some(Sparse { by_row })
    }

    /// `self * cur` for a dense row-major `cur` with `cols` columns.
    fn mul_dense(&self, cur: &[i64], cols: usize, moduli: &[i64]) -> Option<Vec<i64>> {
        let mut out = vec![0i64; self.by_row.len() * cols];
        for (i, row) in self.by_row.iter().enumerate() {
            let dst = &mut out[i * cols..(i + 1) * cols];
            for &(j, v) in row {
                let src = &cur[j * cols..(j + 1) * cols];
                for c in 0..cols {
                    if src[c] != 0 {
                        dst[c] = dst[c].checked_add(v.checked_mul(src[c])?)?;
                    }
                }
            }
            let md = moduli[i];
            if md > 0 {
                for x in dst.iter_mut() {
                    *x = x.rem_euclid(md);
                }
            }
        }
        Some(out)
    }
}

#[derive(Clone, Debug)]
struct Gen {
    map: AbMap,
    sparse: Option<Sparse>,
}

/// Per-generator reduction moduli of a group whose relations are all
/// single-entry columns (0 where a generator is free or the presentation
/// is not of that shape).
fn row_moduli(g: &FgAbGroup) -> Vec<i64> {
    let rel = g.relations();
    let mut out = vec![BigInt::zero(); g.ngens()];
    for j in 0..rel.cols() {
        let nz: Vec<usize> = (0..rel.rows()).filter(|&i| !rel.is_entry_zero(i, j)).collect();
        if nz.len() > 1 {
            return vec![0; g.ngens()];
        }
        if let Some(&i) = nz.first() {
            out[i] = out[i].gcd(&rel.get(i, j));
        }
    }
    out.iter().map(|x| x.to_i64().unwrap_or(0)).collect()
}

fn reduce_rows(m: &IntMatrix, moduli: &[i64]) -> IntMatrix {
    if moduli.iter().all(|&x| x == 0) {
        return m.clone();
    }
    let mut out = m.clone();
    for (i, &md) in moduli.iter().enumerate() {
        if md > 0 {
            let b = BigInt::from(md);
            for j in 0..m.cols() {
                if !m.is_entry_zero(i, j) {
                    out.set(i, j, m.get(i, j).mod_floor(&b));
                }
            }
        }
    }
    out
}

/// A functor on objects `0..=N` of the partial-injection category.
pub struct TruncatedFunctor {
    trunc: usize,
    ring: Ring,
    family: Option<String>,
    groups: Vec<FgAbGroup>,
    moduli: Vec<Vec<i64>>,
    iota: Vec<Gen>,
    pi: Vec<Gen>,
    sigma: Vec<Vec<Gen>>,
    cache: RwLock<HashMap<PartialInjection, Arc<IntMatrix>>>,
}

impl Clone for TruncatedFunctor {
    fn clone(&self) -> Self {
        TruncatedFunctor {
            trunc: self.trunc,
            ring: self.ring,
            family: self.family.clone(),
            groups: self.groups.clone(),
            moduli: self.moduli.clone(),
            iota: self.iota.clone(),
            pi: self.pi.clone(),
            sigma: self.sigma.clone(),
            cache: RwLock::new(self.cache.read().clone()),
        }
    }
}

impl std::fmt::Debug for TruncatedFunctor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TruncatedFunctor(N={}, ring={}, groups=[", self.trunc, self.ring)?;
        for (n, g) in self.groups.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", g.invariants())?;
        }
        write!(f, "])")
    }
}

/// Counts from a successful functoriality check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationStats {
    pub exhaustive_bound: usize,
    pub atom_checks: usize,
    pub sampled_pairs: usize,
}

impl TruncatedFunctor {
    /// Build and validate (exhaustively up to `min(N, 5)`, plus random samples above).
    pub fn from_generators(ring: Ring, groups: Vec<FgAbGroup>, gens: Generators) -> Result<Self, FunctorError> {
        let t = Self::from_generators_unchecked(ring, groups, gens)?;
        t.validate()?;
        Ok(t)
    }

    /// Build without the functoriality check (shapes and well-definedness
    /// of each generator are still checked).
    pub fn from_generators_unchecked(ring: Ring, groups: Vec<FgAbGroup>, gens: Generators) -> Result<Self, FunctorError> {
        if groups.is_empty() {
            return Err(FunctorError::BadGenerator("groups".into(), "need at least object 0".into()));
        }
        let trunc = groups.len() - 1;
        if gens.iota.len() != trunc || gens.pi.len() != trunc || gens.sigma.len() != trunc + 1 {
            return Err(FunctorError::BadGenerator("all".into(), format!("wrong number of generators for N = {trunc}")));
        }
        let moduli: Vec<Vec<i64>> = groups.iter().map(row_moduli).collect();
        let mk = |name: String, s: usize, t: usize, m: IntMatrix| -> Result<Gen, FunctorError> {
            let m = reduce_rows(&m, &moduli[t]);
            let map = AbMap::new(groups[s].clone(), groups[t].clone(), m)
                .map_err(|e| FunctorError::BadGenerator(name, e.to_string()))?;
            let sparse = Sparse::from_matrix(&map.matrix);
            Ok(Gen { map, sparse })
        };
        let mut iota = Vec::new();
        for (n, m) in gens.iota.into_iter().enumerate() {
            iota.push(mk(format!("iota({n})"), n, n + 1, m)?);
        }
        let mut pi = Vec::new();
        for (k, m) in gens.pi.into_iter().enumerate() {
            pi.push(mk(format!("pi({})", k + 1), k + 1, k, m)?);
        }
        let mut sigma = Vec::new();
        for (n, ms) in gens.sigma.into_iter().enumerate() {
            if ms.len() != n.saturating_sub(1) {
                return Err(FunctorError::BadGenerator(format!("sigma(*,{n})"), format!("expected {} transpositions", n.saturating_sub(1))));
            }
            let mut row = Vec::new();
            for (i, m) in ms.into_iter().enumerate() {
                row.push(mk(format!("sigma({},{n})", i + 1), n, n, m)?);
            }
            sigma.push(row);
        }
        Ok(TruncatedFunctor { trunc, ring, family: None, groups, moduli, iota, pi, sigma, cache: RwLock::new(HashMap::new()) })
    }

    /// Build from an action given on every morphism; only the generator
    /// images are kept, then the result is validated.
    pub fn from_action(
        ring: Ring,
        groups: Vec<FgAbGroup>,
        act: impl Fn(&PartialInjection) -> IntMatrix,
    ) -> Result<Self, FunctorError> {
        let trunc = groups.len().saturating_sub(1);
        Self::from_generators(ring, groups, generators_from_action(trunc, act))
    }

    pub fn with_family(mut self, family: impl Into<String>) -> Self {
        self.family = Some(family.into());
        self
    }

    pub fn family(&self) -> Option<&str> {
        self.family.as_deref()
    }

    pub fn truncation(&self) -> usize {
        self.trunc
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn group(&self, n: usize) -> &FgAbGroup {
        &self.groups[n]
    }

    pub fn groups(&self) -> &[FgAbGroup] {
        &self.groups
    }

    /// Invariants of `T_n` as seen over the ring (torsion dropped over Q).
    pub fn invariants(&self, n: usize) -> crate::linalg::Invariants {
        self.ring.reduce_invariants(&self.groups[n].invariants())
    }

    pub fn generators(&self) -> Generators {
        Generators {
            iota: self.iota.iter().map(|g| g.map.matrix.clone()).collect(),
            pi: self.pi.iter().map(|g| g.map.matrix.clone()).collect(),
            sigma: self.sigma.iter().map(|r| r.iter().map(|g| g.map.matrix.clone()).collect()).collect(),
        }
    }

    /// Is every `T_n` zero (over the ring)?
    pub fn is_zero(&self) -> bool {
        self.groups.iter().all(|g| self.ring.is_zero_group(g))
    }

    fn gen(&self, a: &Atom) -> &Gen {
        match *a {
            Atom::Iota(n) => &self.iota[n],
            Atom::Pi(n1) => &self.pi[n1 - 1],
            Atom::Transposition(i, n) => &self.sigma[n][i - 1],
        }
    }

    /// Image of a generating morphism.
    pub fn atom_map(&self, a: &Atom) -> Result<&AbMap, FunctorError> {
        let top = a.source().max(a.target());
        if top > self.trunc {
            return Err(FunctorError::BeyondTruncation(top, self.trunc));
        }
        Ok(&self.gen(a).map)
    }

    fn check_objects(&self, f: &PartialInjection) -> Result<(), FunctorError> {
        let top = f.source().max(f.target());
        if top > self.trunc {
            return Err(FunctorError::BeyondTruncation(top, self.trunc));
        }
        Ok(())
    }

    /// Product of generator matrices along `atoms` (application order), starting at `source`.
    fn eval_atoms(&self, source: usize, atoms: &[Atom]) -> IntMatrix {
        let d = self.groups[source].ngens();
        let mut rows = d;
        let cols = d;
        let mut dense: Vec<i64> = vec![0; d * d];
        for i in 0..d {
            dense[i * d + i] = 1;
        }
        let mut big: Option<IntMatrix> = None;
        for a in atoms {
            let g = self.gen(a);
            let t = a.target();
            if big.is_none() {
                if let Some(sp) = &g.sparse {
                    if let Some(next) = sp.mul_dense(&dense, cols, &self.moduli[t]) {
                        dense = next;
                        rows = self.groups[t].ngens();
                        continue;
                    }
                }
                big = Some(IntMatrix::from_fn(rows, cols, |i, j| dense[i * cols + j]));
            }
            let cur = big.take().unwrap();
            big = Some(reduce_rows(&g.map.matrix.mul(&cur), &self.moduli[t]));
        }
        match big {
            Some(m) => m,
            None => IntMatrix::from_fn(rows, cols, |i, j| dense[i * cols + j]),
        }
    }

    fn matrix_uncached(&self, f: &PartialInjection) -> IntMatrix {
        self.eval_atoms(f.source(), &decompose_into_generators(f).atoms)
    }

    /// Matrix of T(f), cached.
    pub fn matrix(&self, f: &PartialInjection) -> Result<Arc<IntMatrix>, FunctorError> {
        self.check_objects(f)?;
        if let Some(m) = self.cache.read().get(f) {
            return Ok(m.clone());
        }
        let m = Arc::new(self.matrix_uncached(f));
        self.cache.write().entry(f.clone()).or_insert_with(|| m.clone());
        Ok(m)
    }

    /// T(f) as a homomorphism `T_m -> T_n`.
    pub fn apply(&self, f: &PartialInjection) -> Result<AbMap, FunctorError> {
        let m = self.matrix(f)?;
        Ok(AbMap { source: self.groups[f.source()].clone(), target: self.groups[f.target()].clone(), matrix: (*m).clone() })
    }

    /// Do two matrices define the same map into `T_t`?
    fn same_map(&self, a: &IntMatrix, b: &IntMatrix, t: usize) -> bool {
        if a == b {
            return true;
        }
        let a = reduce_rows(a, &self.moduli[t]);
        let b = reduce_rows(b, &self.moduli[t]);
        if a == b {
            return true;
        }
        let g = &self.groups[t];
        let diff = a.sub(&b);
        crate::linalg::solve(g.relations(), &diff).is_some()
    }

    fn mul_into(&self, g: &Gen, m: &IntMatrix, t: usize) -> IntMatrix {
        reduce_rows(&g.map.matrix.mul(m), &self.moduli[t])
    }

    /// Default functoriality check: exhaustive to `min(N, 5)`, 200 random pairs above.
    pub fn validate(&self) -> Result<ValidationStats, FunctorError> {
        self.validate_with(self.trunc.min(5), 200, 0x5eed)
    }

    /// Check `T(a o f) = T(a) T(f)` for every generator `a` and every `f`
    /// with all objects at most `bound`. Since every morphism is a word in
    /// generators, this is equivalent to `T(g o f) = T(g) T(f)` for all
    /// composable pairs in that range. Pairs reaching above `bound` are
    /// sampled at random.
    pub fn validate_with(&self, bound: usize, samples: usize, seed: u64) -> Result<ValidationStats, FunctorError> {
        let bound = bound.min(self.trunc);
        let cat = SigmaCategory::new(bound);
        let mut stats = ValidationStats { exhaustive_bound: bound, ..Default::default() };
        // pi o iota = id, checked directly on the generators
        for n in 0..self.trunc {
            let c = self.mul_into(&self.pi[n], &self.iota[n].map.matrix, n);
            if !self.same_map(&c, &IntMatrix::identity(self.groups[n].ngens()), n) {
                return Err(FunctorError::NotFunctorial { g: format!("pi({})", n + 1), f: format!("iota({n})") });
            }
        }
        for m in 0..=bound {
            for n in 0..=bound {
                for f in cat.enumerate_hom(m, n)?.iter() {
                    let tf = self.matrix_uncached(f);
                    let mut atoms: Vec<Atom> = (1..n).map(|i| Atom::Transposition(i, n)).collect();
                    if n < bound {
                        atoms.push(Atom::Iota(n));
                    }
                    if n >= 1 {
                        atoms.push(Atom::Pi(n));
                    }
                    for a in atoms {
                        let af = a.morphism().compose(f)?;
                        let lhs = self.matrix_uncached(&af);
                        let rhs = self.mul_into(self.gen(&a), &tf, a.target());
                        if !self.same_map(&lhs, &rhs, a.target()) {
                            return Err(FunctorError::NotFunctorial { g: a.morphism().to_string(), f: f.to_string() });
                        }
                        stats.atom_checks += 1;
                    }
                }
            }
        }
        if self.trunc > bound {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let mut objs = [rng.gen_range(0..=self.trunc), rng.gen_range(0..=self.trunc), rng.gen_range(0..=self.trunc)];
                if objs.iter().all(|&x| x <= bound) {
                    objs[rng.gen_range(0..3)] = rng.gen_range(bound + 1..=self.trunc);
                }
                let f = random_morphism(&mut rng, objs[0], objs[1]);
                let g = random_morphism(&mut rng, objs[1], objs[2]);
                let gf = g.compose(&f)?;
                let lhs = self.matrix_uncached(&gf);
                let rhs = self.matrix_uncached(&g).mul(&self.matrix_uncached(&f));
                if !self.same_map(&lhs, &rhs, objs[2]) {
                    return Err(FunctorError::NotFunctorial { g: g.to_string(), f: f.to_string() });
                }
                stats.sampled_pairs += 1;
            }
        }
        Ok(stats)
    }
}

/// Generator images read off an action defined on all morphisms.
pub fn generators_from_action(trunc: usize, act: impl Fn(&PartialInjection) -> IntMatrix) -> Generators {
    Generators {
        iota: (0..trunc).map(|n| act(&Atom::Iota(n).morphism())).collect(),
        pi: (1..=trunc).map(|n| act(&Atom::Pi(n).morphism())).collect(),
        sigma: (0..=trunc).map(|n| (1..n).map(|i| act(&Atom::Transposition(i, n).morphism())).collect()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Permutation functor on {1..n}: basis e_i, f(e_i) = e_f(i) or 0.
    pub(crate) fn points(ring: Ring, trunc: usize) -> TruncatedFunctor {
        let groups = (0..=trunc).map(|n| ring.free_module(n)).collect();
        TruncatedFunctor::from_action(ring, groups, |f| {
            IntMatrix::from_fn(f.target(), f.source(), |i, j| (f.get(j + 1) == Some(i + 1)) as i64)
        })
        .unwrap()
    }

    #[test]
    fn points_functor_is_valid_and_cached() {
        let t = points(Ring::Z, 4);
        let f: PartialInjection = "3->4:[2,-,4]".parse().unwrap();
        let m = t.matrix(&f).unwrap();
        assert_eq!(*m, IntMatrix::from_rows(&[vec![0, 0, 0], vec![1, 0, 0], vec![0, 0, 0], vec![0, 0, 1]]));
        assert!(t.matrix(&"5->5:[1,2,3,4,5]".parse().unwrap()).is_err());
        let stats = t.validate_with(4, 0, 1).unwrap();
        assert!(stats.atom_checks > 0);
    }

    #[test]
    fn perturbed_generator_is_caught() {
        let t = points(Ring::Z, 3);
        let mut g = t.generators();
        g.sigma[3][0] = IntMatrix::identity(3);
        let bad = TruncatedFunctor::from_generators(Ring::Z, t.groups().to_vec(), g);
        assert!(matches!(bad, Err(FunctorError::NotFunctorial { .. })));
    }

    #[test]
    fn ill_defined_generator_is_rejected() {
        let groups = vec![FgAbGroup::cyclic(2), FgAbGroup::free(1)];
        let gens = Generators {
            iota: vec![IntMatrix::from_rows(&[vec![1]])],
            pi: vec![IntMatrix::from_rows(&[vec![1]])],
            sigma: vec![vec![], vec![]],
        };
        let r = TruncatedFunctor::from_generators(Ring::Z, groups, gens);
        assert!(matches!(r, Err(FunctorError::BadGenerator(..))));
    }

    #[test]
    fn sampled_pairs_above_bound() {
        let t = points(Ring::Fp(3), 6);
        let stats = t.validate_with(3, 50, 7).unwrap();
        assert_eq!(stats.sampled_pairs, 50);
    }
}
