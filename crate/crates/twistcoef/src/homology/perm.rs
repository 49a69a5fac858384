//! Parabolic subgroups of symmetric groups and modules over them.

use super::HomologyError;
use crate::functor::TruncatedFunctor;
use crate::linalg::{echelon_lattice_basis, lift_through, AbMap, FgAbGroup, IntMatrix};
use crate::sigma::transposition;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// Subgroup of `Sigma_n` generated by adjacent transpositions `s_i = (i i+1)`
/// for `i` in a chosen set of letters. Elements are stored as 0-based image
/// arrays and multiplied by composition, `(a b)(x) = a(b(x))`.
pub struct PermGroup {
    degree: usize,
    letters: Vec<usize>,
    elements: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, u32>,
    words: Vec<Vec<u8>>,
    gens: Vec<u32>,
    mul: Vec<u32>,
    inv: Vec<u32>,
}

impl PermGroup {
    /// The subgroup generated by `s_i`, `i` in `letters` (each in `1..degree`).
    pub fn parabolic(degree: usize, letters: &[usize]) -> Result<Self, HomologyError> {
        let mut letters = letters.to_vec();
        letters.sort_unstable();
        letters.dedup();
        if degree > 255 || letters.iter().any(|&i| i == 0 || i >= degree) {
            return Err(HomologyError::BadGroup(format!("letters {letters:?} on {degree} points")));
        }
        let id: Vec<u8> = (0..degree as u8).collect();
        let mut elements = vec![id.clone()];
        let mut words = vec![Vec::new()];
        let mut index = HashMap::from([(id, 0u32)]);
        let mut head = 0;
        while head < elements.len() {
            for (k, &i) in letters.iter().enumerate() {
                let mut h = elements[head].clone();
                h.swap(i - 1, i);
                if !index.contains_key(&h) {
                    index.insert(h.clone(), elements.len() as u32);
                    let mut w = words[head].clone();
                    w.push(k as u8);
                    words.push(w);
                    elements.push(h);
                }
            }
            head += 1;
        }
        let order = elements.len();
        let gens = letters
            .iter()
            .map(|&i| {
                let mut s: Vec<u8> = (0..degree as u8).collect();
                s.swap(i - 1, i);
                index[&s]
            })
            .collect();
        let mut mul = vec![0u32; order * order];
        let mut inv = vec![0u32; order];
        let mut buf = vec![0u8; degree];
        for (a, pa) in elements.iter().enumerate() {
            for (b, pb) in elements.iter().enumerate() {
                for x in 0..degree {
                    buf[x] = pa[pb[x] as usize];
                }
                mul[a * order + b] = index[&buf];
            }
            for x in 0..degree {
                buf[pa[x] as usize] = x as u8;
            }
            inv[a] = index[&buf];
        }
        Ok(PermGroup { degree, letters, elements, index, words, gens, mul, inv })
    }

    /// All of `Sigma_n`.
    pub fn symmetric(n: usize) -> Result<Self, HomologyError> {
        Self::parabolic(n, &(1..n).collect::<Vec<_>>())
    }

    /// `Sigma_{b_1} x ... x Sigma_{b_r}` on consecutive blocks of sizes `blocks`.
    pub fn young(blocks: &[usize]) -> Result<Self, HomologyError> {
        let n: usize = blocks.iter().sum();
        let mut cuts = Vec::new();
        let mut acc = 0;
        for b in blocks {
            acc += b;
            cuts.push(acc);
        }
        Self::parabolic(n, &(1..n).filter(|i| !cuts.contains(i)).collect::<Vec<_>>())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Letters `i` of the generators `s_i`, increasing.
    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    /// Element index of the `k`-th generator.
    pub fn generator(&self, k: usize) -> u32 {
        self.gens[k]
    }

    pub fn identity(&self) -> u32 {
        0
    }

    pub fn element(&self, g: u32) -> &[u8] {
        &self.elements[g as usize]
    }

    /// Index of a permutation given by 0-based images.
    pub fn index_of(&self, perm: &[u8]) -> Option<u32> {
        self.index.get(perm).copied()
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.order() + b as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    /// A word in generator positions multiplying to `g`.
    pub fn word(&self, g: u32) -> &[u8] {
        &self.words[g as usize]
    }

    /// Product of generators given by positions.
    pub fn eval_word(&self, w: &[u8]) -> u32 {
        w.iter().fold(0, |acc, &k| self.mul(acc, self.gens[k as usize]))
    }

    /// Closure and inverse laws, checked on the whole table.
    pub fn check_group_laws(&self) -> bool {
        let n = self.order() as u32;
        (0..n).all(|a| self.mul(a, self.inv(a)) == 0 && self.mul(self.inv(a), a) == 0 && self.mul(0, a) == a)
            && (0..n).all(|a| (0..n).all(|b| (self.mul(a, b) as usize) < self.order()))
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PermGroup(degree {}, letters {:?}, order {})", self.degree, self.letters, self.order())
    }
}

/// Key identifying a parabolic subgroup, used for caches.
pub(crate) fn group_key(g: &PermGroup) -> (usize, Vec<usize>) {
    (g.degree, g.letters.clone())
}

/// A finitely generated abelian group with an action of a [`PermGroup`],
/// given by one matrix per generator.
#[derive(Clone)]
pub struct GModule {
    group: Arc<PermGroup>,
    carrier: FgAbGroup,
    gen_action: Vec<IntMatrix>,
    action: Arc<Vec<IntMatrix>>,
}

impl GModule {
    /// Checks that each generator matrix is a well-defined endomorphism,
    /// squares to the identity and satisfies the braid and commutation relations.
    pub fn new(group: Arc<PermGroup>, carrier: FgAbGroup, gen_action: Vec<IntMatrix>) -> Result<Self, HomologyError> {
        if gen_action.len() != group.letters().len() {
            return Err(HomologyError::BadModule(format!("{} matrices for {} generators", gen_action.len(), group.letters().len())));
        }
        let maps: Vec<AbMap> = gen_action
            .iter()
            .map(|m| AbMap::new(carrier.clone(), carrier.clone(), m.clone()))
            .collect::<Result<_, _>>()
            .map_err(|e| HomologyError::BadModule(e.to_string()))?;
        let id = AbMap::identity(&carrier);
        let letters = group.letters().to_vec();
        for (a, fa) in maps.iter().enumerate() {
            if !fa.compose(fa)?.equals(&id) {
                return Err(HomologyError::BadModule(format!("s_{} does not square to 1", letters[a])));
            }
            for (b, fb) in maps.iter().enumerate().skip(a + 1) {
                let m = if letters[b] - letters[a] == 1 { 3 } else { 2 };
                let ab = fa.compose(fb)?;
                let mut p = id.clone();
                for _ in 0..m {
                    p = p.compose(&ab)?;
                }
                if !p.equals(&id) {
                    return Err(HomologyError::BadModule(format!("(s_{} s_{})^{m} acts nontrivially", letters[a], letters[b])));
                }
            }
        }
        Ok(Self::assemble(group, carrier, gen_action))
    }

    fn assemble(group: Arc<PermGroup>, carrier: FgAbGroup, gen_action: Vec<IntMatrix>) -> Self {
        let mut action = vec![IntMatrix::identity(carrier.ngens())];
        for g in 1..group.order() as u32 {
            let w = group.word(g);
            let (&last, prefix) = w.split_last().unwrap();
            let p = group.eval_word(prefix);
            let m = action[p as usize].mul(&gen_action[last as usize]);
            action.push(reduce(&carrier, m));
        }
        GModule { group, carrier, gen_action, action: Arc::new(action) }
    }

    /// `T_n` with `s_i` acting by `T((i i+1))`. The group must act on `n` points.
    pub fn from_functor(t: &TruncatedFunctor, group: Arc<PermGroup>) -> Result<Self, HomologyError> {
        let n = group.degree();
        let mats = group
            .letters()
            .iter()
            .map(|&i| Ok(t.apply(&transposition(i, n)?)?.matrix))
            .collect::<Result<Vec<_>, HomologyError>>()?;
        Self::new(group, t.group(n).clone(), mats)
    }

    /// Trivial action on `a`.
    pub fn trivial(group: Arc<PermGroup>, a: FgAbGroup) -> Self {
        let mats = vec![IntMatrix::identity(a.ngens()); group.letters().len()];
        Self::assemble(group, a, mats)
    }

    /// The same carrier seen as a module over a parabolic subgroup with the
    /// same number of points.
    pub fn restrict(&self, sub: Arc<PermGroup>) -> Result<Self, HomologyError> {
        if sub.degree() != self.group.degree() {
            return Err(HomologyError::BadGroup("restriction to a group on other points".into()));
        }
        let mats = sub
            .letters()
            .iter()
            .map(|i| {
                let k = self.group.letters().iter().position(|j| j == i).ok_or_else(|| HomologyError::BadGroup(format!("s_{i} not in the group")))?;
                Ok(self.gen_action[k].clone())
            })
            .collect::<Result<Vec<_>, HomologyError>>()?;
        Ok(Self::assemble(sub, self.carrier.clone(), mats))
    }

    /// The submodule given by an injective map into the carrier whose image
    /// is stable under the action.
    pub fn submodule(&self, inclusion: &AbMap) -> Result<Self, HomologyError> {
        let mats = self
            .gen_action
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let act = AbMap { source: inclusion.source.clone(), target: self.carrier.clone(), matrix: m.mul(&inclusion.matrix) };
                lift_through(&act, inclusion)
                    .map(|x| x.matrix)
                    .ok_or_else(|| HomologyError::BadModule(format!("image not stable under s_{}", self.group.letters()[k])))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.group.clone(), inclusion.source.clone(), mats)
    }

    pub fn group(&self) -> &Arc<PermGroup> {
        &self.group
    }

    pub fn carrier(&self) -> &FgAbGroup {
        &self.carrier
    }

    pub fn generator_action(&self, k: usize) -> &IntMatrix {
        &self.gen_action[k]
    }

    /// Matrix of the element `g`.
    pub fn action(&self, g: u32) -> &IntMatrix {
        &self.action[g as usize]
    }

    /// `M_G = M / <g m - m>` over all elements `g`, computed without any resolution.
    pub fn coinvariants(&self) -> (FgAbGroup, AbMap) {
        let r = self.carrier.ngens();
        let id = IntMatrix::identity(r);
        let mut blocks: Vec<IntMatrix> = vec![self.carrier.relations().clone()];
        blocks.extend(self.action.iter().skip(1).map(|m| m.sub(&id)));
        let refs: Vec<&IntMatrix> = blocks.iter().collect();
        let q = FgAbGroup::new(r, echelon_lattice_basis(&IntMatrix::hstack(r, &refs)));
        let s = q.simplify();
        let proj = AbMap { source: self.carrier.clone(), target: s.group.clone(), matrix: s.to };
        (s.group, proj)
    }
}

impl fmt::Debug for GModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GModule({:?}, carrier {:?})", self.group, self.carrier)
    }
}

/// Keep action entries small when the carrier is a diagonal torsion
/// presentation (the common case for functor values).
fn reduce(carrier: &FgAbGroup, m: IntMatrix) -> IntMatrix {
    let rel = carrier.relations();
    let r = carrier.ngens();
    let mut modulus = vec![None; r];
    for j in 0..rel.cols() {
        let nz: Vec<usize> = (0..r).filter(|&i| !rel.is_entry_zero(i, j)).collect();
        if let [i] = nz[..] {
            let d = num_traits::Signed::abs(&rel.get(i, j));
            modulus[i] = Some(match modulus[i].take() {
                None => d,
                Some(e) => num_integer::Integer::gcd(&d, &e),
            });
        }
    }
    if modulus.iter().all(Option::is_none) {
        return m;
    }
    let mut out = m;
    for (i, md) in modulus.iter().enumerate() {
        if let Some(md) = md {
            for j in 0..out.cols() {
                if !out.is_entry_zero(i, j) {
                    let x = num_integer::Integer::mod_floor(&out.get(i, j), md);
                    out.set(i, j, x);
                }
            }
        }
    }
    out
}
