//! Cross-effects `T_n[S_1|...|S_p]`, height, the subset decomposition of
//! `T_n`, and a check of the structural lemmas on a given functor.

use super::ops::Truncated;
use super::{FunctorError, TruncatedFunctor};
use crate::linalg::{image, image_contained, intersect_subgroups, kernel, same_subgroup, AbMap, FgAbGroup, IntMatrix, Ring};
use crate::sigma::{forget_morphism, transposition, Atom, PartialInjection};
use std::collections::{BTreeMap, HashMap};

/// The subgroup `T_n[S_1|...|S_p]` of `T_n` with its inclusion.
#[derive(Clone, Debug)]
pub struct CrossEffect {
    pub n: usize,
    pub partition: Vec<Vec<usize>>,
    pub group: FgAbGroup,
    pub inclusion: AbMap,
}

impl CrossEffect {
    pub fn is_zero_over(&self, ring: Ring) -> bool {
        ring.is_zero_group(&self.group)
    }
}

/// The splitting of `T_n` into the pieces `T_n[Q^delta]`, Q a subset of {1..n}.
#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub n: usize,
    pub summands: BTreeMap<Vec<usize>, CrossEffect>,
    /// Sum of the inclusions, from the direct sum of the summands to `T_n`.
    pub witness: AbMap,
    pub witness_is_iso: bool,
    /// Invariants of the direct sum agree with those of `T_n`.
    pub invariants_match: bool,
    /// Each transposition carries the summand of Q onto the summand of its image.
    pub permuted_transitively: bool,
    /// `T_n^k` is stable under permutations preserving {1..n-k} and {n-k+1..n}.
    pub block_stabiliser_invariant: bool,
}

impl DecompositionReport {
    pub fn passed(&self) -> bool {
        self.witness_is_iso && self.invariants_match && self.permuted_transitively && self.block_stabiliser_invariant
    }
}

/// Tally of one family of checks.
#[derive(Clone, Debug, Default)]
pub struct CheckOutcome {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

/// Object bounds for [`TruncatedFunctor::verify_lemma_suite`].
#[derive(Clone, Copy, Debug)]
pub struct LemmaBounds {
    pub bijection: usize,
    pub splitting: usize,
    pub decomposition: usize,
}

impl LemmaBounds {
    pub fn for_truncation(n: usize) -> Self {
        LemmaBounds { bijection: n, splitting: n.min(4), decomposition: n.min(5) }
    }
}

#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub functoriality: Result<(), String>,
    pub bijection: CheckOutcome,
    pub splitting: CheckOutcome,
    pub decomposition: CheckOutcome,
    pub height: Option<Truncated>,
    pub degree: Option<Truncated>,
    pub height_le_degree: CheckOutcome,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.functoriality.is_ok()
            && self.bijection.passed()
            && self.splitting.passed()
            && self.decomposition.passed()
            && self.height_le_degree.passed()
    }
}

fn fmt_partition(p: &[Vec<usize>]) -> String {
    let blocks: Vec<String> = p
        .iter()
        .map(|b| format!("{{{}}}", b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    blocks.join("|")
}

/// Singleton blocks of `s`.
pub fn discrete(s: &[usize]) -> Vec<Vec<usize>> {
    s.iter().map(|&x| vec![x]).collect()
}

fn subsets_of(elems: &[usize]) -> Vec<Vec<usize>> {
    (0u32..1 << elems.len())
        .map(|mask| elems.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).collect())
        .collect()
}

fn set_partitions(elems: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let Some((&first, rest)) = elems.split_first() else {
        return vec![vec![]];
    };
    let mut out = Vec::new();
    for p in set_partitions(rest) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].insert(0, first);
            out.push(q);
        }
        let mut q = p;
        q.push(vec![first]);
        out.push(q);
    }
    out
}

fn key(p: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut k: Vec<Vec<usize>> = p
        .iter()
        .map(|b| {
            let mut b = b.clone();
            b.sort_unstable();
            b
        })
        .collect();
    k.sort();
    k
}

/// Inclusion of a direct sum of subgroups: columns of all inclusions side by side.
fn sum_map(parts: &[&AbMap], target: &FgAbGroup) -> AbMap {
    let groups: Vec<&FgAbGroup> = parts.iter().map(|m| &m.source).collect();
    let mats: Vec<&IntMatrix> = parts.iter().map(|m| &m.matrix).collect();
    AbMap {
        source: FgAbGroup::direct_sum(&groups),
        target: target.clone(),
        matrix: IntMatrix::hstack(target.ngens(), &mats),
    }
}

fn injective_over(ring: Ring, f: &AbMap) -> bool {
    match ring {
        Ring::Q => kernel(f).0.rank() == 0,
        _ => f.is_injective(),
    }
}

fn iso_over(ring: Ring, f: &AbMap) -> bool {
    match ring {
        Ring::Q => kernel(f).0.rank() == 0 && crate::linalg::cokernel(f).0.rank() == 0,
        _ => f.is_iso(),
    }
}

impl TruncatedFunctor {
    fn check_partition(&self, n: usize, partition: &[Vec<usize>]) -> Result<Vec<usize>, FunctorError> {
        if n > self.truncation() {
            return Err(FunctorError::BeyondTruncation(n, self.truncation()));
        }
        let mut seen = vec![false; n + 1];
        for &x in partition.iter().flatten() {
            if x == 0 || x > n || seen[x] {
                return Err(FunctorError::BadPartition(n));
            }
            seen[x] = true;
        }
        Ok((1..=n).filter(|&x| seen[x]).collect())
    }

    fn forget(&self, n: usize, s: &[usize]) -> Result<AbMap, FunctorError> {
        self.apply(&forget_morphism(n, s)?)
    }

    /// `T_n[S_1|...|S_p]` as the image of the commuting idempotent
    /// `T(f_{n \ S}) * prod_i (id - T(f_{S_i}))`.
    pub fn cross_effect(&self, n: usize, partition: &[Vec<usize>]) -> Result<CrossEffect, FunctorError> {
        let s = self.check_partition(n, partition)?;
        let complement: Vec<usize> = (1..=n).filter(|x| !s.contains(x)).collect();
        let mut p = self.forget(n, &complement)?;
        let id = AbMap::identity(self.group(n));
        for block in partition {
            let e = self.forget(n, block)?;
            p = p.compose(&id.sub(&e))?;
        }
        let (group, inclusion) = image(&p);
        Ok(CrossEffect { n, partition: partition.to_vec(), group, inclusion })
    }

    /// `T_n[S_1|...|S_p]` as `im T(f_{n \ S})` intersected with every `ker T(f_{S_i})`.
    pub fn cross_effect_by_intersection(&self, n: usize, partition: &[Vec<usize>]) -> Result<CrossEffect, FunctorError> {
        let s = self.check_partition(n, partition)?;
        let complement: Vec<usize> = (1..=n).filter(|x| !s.contains(x)).collect();
        let mut subs = vec![image(&self.forget(n, &complement)?).1];
        for block in partition {
            subs.push(kernel(&self.forget(n, block)?).1);
        }
        let (group, inclusion) = intersect_subgroups(&subs)?;
        Ok(CrossEffect { n, partition: partition.to_vec(), group, inclusion })
    }

    /// Both constructions, required to give the same subgroup.
    pub fn cross_effect_checked(&self, n: usize, partition: &[Vec<usize>]) -> Result<CrossEffect, FunctorError> {
        let a = self.cross_effect(n, partition)?;
        let b = self.cross_effect_by_intersection(n, partition)?;
        if !same_subgroup(&a.inclusion, &b.inclusion) || a.group.invariants() != b.group.invariants() {
            return Err(FunctorError::CrossEffectMismatch { n, partition: fmt_partition(partition) });
        }
        Ok(a)
    }

    /// `T_n^k = T_n[{n-k+1..n}^delta]`.
    pub fn top_piece(&self, n: usize, k: usize) -> Result<CrossEffect, FunctorError> {
        let s: Vec<usize> = (n + 1 - k..=n).collect();
        self.cross_effect(n, &discrete(&s))
    }

    /// Largest k with some `T_n^k` nonzero.
    pub fn height(&self) -> Result<Truncated, FunctorError> {
        let mut best: Option<(usize, usize)> = None;
        for n in 0..=self.truncation() {
            for k in 0..=n {
                if !self.top_piece(n, k)?.is_zero_over(self.ring()) && best.is_none_or(|(bk, _)| k > bk) {
                    best = Some((k, n));
                }
            }
        }
        let n_top = self.truncation();
        Ok(match best {
            None => Truncated::Zero,
            Some((k, n)) if k == n_top => Truncated::AtLeast { value: k, witness: (n, k) },
            Some((k, n)) => Truncated::Exact { value: k, witness: (n, k) },
        })
    }

    /// All `2^n` pieces `T_n[Q^delta]` and the checks that they split `T_n`
    /// compatibly with the permutation action.
    pub fn decompose(&self, n: usize) -> Result<DecompositionReport, FunctorError> {
        if n > self.truncation() {
            return Err(FunctorError::BeyondTruncation(n, self.truncation()));
        }
        let all: Vec<usize> = (1..=n).collect();
        let mut summands = BTreeMap::new();
        for q in subsets_of(&all) {
            let ce = self.cross_effect(n, &discrete(&q))?;
            summands.insert(q, ce);
        }
        let incs: Vec<&AbMap> = summands.values().map(|c| &c.inclusion).collect();
        let witness = sum_map(&incs, self.group(n));
        let ring = self.ring();
        let witness_is_iso = iso_over(ring, &witness);
        let invariants_match =
            ring.reduce_invariants(&witness.source.invariants()) == ring.reduce_invariants(&self.group(n).invariants());

        let mut permuted_transitively = true;
        for i in 1..n {
            let t = transposition(i, n)?;
            let tm = self.apply(&t)?;
            for (q, ce) in &summands {
                let mut image_q: Vec<usize> = q.iter().map(|&x| t.get(x).unwrap()).collect();
                image_q.sort_unstable();
                let moved = tm.compose(&ce.inclusion)?;
                if !same_subgroup(&moved, &summands[&image_q].inclusion) {
                    permuted_transitively = false;
                }
            }
        }

        let mut block_stabiliser_invariant = true;
        for k in 0..=n {
            let top: Vec<usize> = (n + 1 - k..=n).collect();
            let inc = &summands[&top].inclusion;
            for i in (1..n).filter(|&i| i != n - k) {
                let moved = self.atom_map(&Atom::Transposition(i, n))?.compose(inc)?;
                if !image_contained(&moved, inc) {
                    block_stabiliser_invariant = false;
                }
            }
        }
        Ok(DecompositionReport {
            n,
            summands,
            witness,
            witness_is_iso,
            invariants_match,
            permuted_transitively,
            block_stabiliser_invariant,
        })
    }

    /// Run the structural checks with default bounds.
    pub fn verify_lemma_suite(&self) -> LemmaReport {
        self.verify_lemma_suite_with(LemmaBounds::for_truncation(self.truncation()))
    }

    /// Check, within the bounds: iota carries `T_m^k` onto `T_n^k`; the
    /// three-term splitting of `T_n[S1 u S2|...]`; the splitting of
    /// `T_n[S|R^delta]` into discrete pieces; and height <= degree.
    pub fn verify_lemma_suite_with(&self, bounds: LemmaBounds) -> LemmaReport {
        let functoriality = self.validate().map(|_| ()).map_err(|e| e.to_string());
        let ring = self.ring();
        let mut memo: HashMap<(usize, Vec<Vec<usize>>), CrossEffect> = HashMap::new();
        let mut ce = |n: usize, p: &[Vec<usize>]| -> Result<CrossEffect, FunctorError> {
            let k = (n, key(p));
            if let Some(c) = memo.get(&k) {
                return Ok(c.clone());
            }
            let c = self.cross_effect(n, p)?;
            memo.insert(k, c.clone());
            Ok(c)
        };

        let mut bijection = CheckOutcome::default();
        let top_n = bounds.bijection.min(self.truncation());
        for k in 0..=top_n {
            for m in k..=top_n {
                for n in m..=top_n {
                    let res = (|| -> Result<bool, FunctorError> {
                        let src = ce(m, &discrete(&(m + 1 - k..=m).collect::<Vec<_>>()))?;
                        let dst = ce(n, &discrete(&(n + 1 - k..=n).collect::<Vec<_>>()))?;
                        let shift: Vec<Option<usize>> = (1..=m).map(|i| Some(i + n - m)).collect();
                        let f = self.apply(&PartialInjection::new(m, n, &shift)?)?;
                        let moved = f.compose(&src.inclusion)?;
                        Ok(injective_over(ring, &moved) && same_subgroup(&moved, &dst.inclusion))
                    })();
                    bijection.record(matches!(res, Ok(true)), || format!("T_{m}^{k} -> T_{n}^{k}: {res:?}"));
                }
            }
        }

        let mut splitting = CheckOutcome::default();
        for n in 0..=bounds.splitting.min(self.truncation()) {
            let all: Vec<usize> = (1..=n).collect();
            for s1 in subsets_of(&all).into_iter().filter(|s| !s.is_empty()) {
                let left: Vec<usize> = all.iter().copied().filter(|x| !s1.contains(x)).collect();
                for s2 in subsets_of(&left).into_iter().filter(|s| !s.is_empty()) {
                    let rest: Vec<usize> = left.iter().copied().filter(|x| !s2.contains(x)).collect();
                    for r in subsets_of(&rest) {
                        for others in set_partitions(&r) {
                            let with = |front: Vec<Vec<usize>>| {
                                let mut p = front;
                                p.extend(others.iter().cloned());
                                p
                            };
                            let res = (|| -> Result<bool, FunctorError> {
                                let union: Vec<usize> = s1.iter().chain(&s2).copied().collect();
                                let lhs = ce(n, &with(vec![union]))?;
                                let a = ce(n, &with(vec![s1.clone(), s2.clone()]))?;
                                let b = ce(n, &with(vec![s2.clone()]))?;
                                let c = ce(n, &with(vec![s1.clone()]))?;
                                let sum = sum_map(&[&a.inclusion, &b.inclusion, &c.inclusion], self.group(n));
                                Ok(injective_over(ring, &sum) && same_subgroup(&sum, &lhs.inclusion))
                            })();
                            splitting.record(matches!(res, Ok(true)), || {
                                format!("n={n}: {} | {}: {res:?}", fmt_partition(&[s1.clone(), s2.clone()]), fmt_partition(&others))
                            });
                        }
                    }
                }
            }
        }

        let mut decomposition = CheckOutcome::default();
        for n in 0..=bounds.decomposition.min(self.truncation()) {
            let all: Vec<usize> = (1..=n).collect();
            for s in subsets_of(&all) {
                let left: Vec<usize> = all.iter().copied().filter(|x| !s.contains(x)).collect();
                for r in subsets_of(&left) {
                    let res = (|| -> Result<bool, FunctorError> {
                        let mut p = vec![s.clone()];
                        p.extend(discrete(&r));
                        let lhs = ce(n, &p)?;
                        let mut pieces = Vec::new();
                        for q in subsets_of(&s).into_iter().filter(|q| !q.is_empty()) {
                            let mut qr = q.clone();
                            qr.extend(&r);
                            pieces.push(ce(n, &discrete(&qr))?.inclusion);
                        }
                        if pieces.is_empty() {
                            return Ok(ring.is_zero_group(&lhs.group));
                        }
                        let refs: Vec<&AbMap> = pieces.iter().collect();
                        let sum = sum_map(&refs, self.group(n));
                        Ok(injective_over(ring, &sum) && same_subgroup(&sum, &lhs.inclusion))
                    })();
                    decomposition.record(matches!(res, Ok(true)), || format!("n={n}, S={s:?}, R={r:?}: {res:?}"));
                }
            }
        }

        let height = self.height().ok();
        let degree = self.degree().ok();
        let mut height_le_degree = CheckOutcome::default();
        if let (Some(h), Some(d)) = (&height, &degree) {
            if let (Some(hv), Some(dv)) = (h.exact(), d.exact()) {
                height_le_degree.record(hv <= dv, || format!("height {hv} > degree {dv}"));
            }
        }
        LemmaReport { functoriality, bijection, splitting, decomposition, height, degree, height_le_degree }
    }
}
