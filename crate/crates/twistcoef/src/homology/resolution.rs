//! A free resolution of Z over a parabolic subgroup `W` of `Sigma_n`, through degree 3.
//!
//! Degree 1 has one cell per Coxeter generator `s` with boundary `s - 1`.
//! Degree 2 has one cell per relator (`s^2`, and `(st)^m` with `m = 3` for
//! adjacent letters, 2 otherwise), with boundary given by Fox derivatives.
//! Degree 3 cells generate the module of identities among relators. They are
//! found in the small groups `W_T` for sets `T` of at most three generators:
//! each `T` adds the kernel vectors needed beyond those already coming from
//! its proper subsets. The local computation depends only on the gaps
//! between the letters of `T`, so shifting all letters maps cells to cells.
//!
//! Nothing here is trusted: [`Resolution::verify`] checks `d d = 0` and exactness
//! by rank counts, over F_p or over Z. Over Z each image must also be
//! saturated, so that ranks alone pin down exactness.

use super::perm::{group_key, PermGroup};
use super::HomologyError;
use crate::linalg::{cokernel_with_section, integer_kernel, saturated_rank, sparse_rank, AbMap, Elimination, FgAbGroup, IntMatrix};
use parking_lot::Mutex;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

/// Element of the group ring: `(element, coefficient)` pairs.
pub type RingElem = Vec<(u32, i64)>;

/// Free generators of the resolution, named by letters so that they can be
/// matched between groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    Vertex,
    Edge(usize),
    Square(usize),
    Pair(usize, usize),
    Identity(Vec<usize>, usize),
}

impl Cell {
    /// The same cell with all letters raised by one.
    pub fn shifted(&self) -> Cell {
        match self {
            Cell::Vertex => Cell::Vertex,
            Cell::Edge(i) => Cell::Edge(i + 1),
            Cell::Square(i) => Cell::Square(i + 1),
            Cell::Pair(i, j) => Cell::Pair(i + 1, j + 1),
            Cell::Identity(t, k) => Cell::Identity(t.iter().map(|i| i + 1).collect(), *k),
        }
    }
}

/// Relator on generator positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum RelKey {
    Square(usize),
    Pair(usize, usize),
}

fn relators(letters: &[usize]) -> Vec<(RelKey, Vec<u8>)> {
    let t = letters.len();
    let mut out: Vec<(RelKey, Vec<u8>)> = (0..t).map(|a| (RelKey::Square(a), vec![a as u8, a as u8])).collect();
    for a in 0..t {
        for b in a + 1..t {
            let m = if letters[b] - letters[a] == 1 { 3 } else { 2 };
            out.push((RelKey::Pair(a, b), [a as u8, b as u8].repeat(m)));
        }
    }
    out
}

/// Fox derivatives of a positive word: coefficient of `e_s` is the sum of the
/// prefixes before each occurrence of `s`.
fn fox(g: &PermGroup, word: &[u8]) -> BTreeMap<usize, RingElem> {
    let mut out: BTreeMap<usize, RingElem> = BTreeMap::new();
    let mut prefix = g.identity();
    for &k in word {
        out.entry(k as usize).or_default().push((prefix, 1));
        prefix = g.mul(prefix, g.generator(k as usize));
    }
    out.into_iter().map(|(k, v)| (k, compact(v))).collect()
}

fn compact(v: RingElem) -> RingElem {
    let mut m: BTreeMap<u32, i64> = BTreeMap::new();
    for (g, c) in v {
        *m.entry(g).or_default() += c;
    }
    m.into_iter().filter(|&(_, c)| c != 0).collect()
}

/// An identity among relators of a local group: `(relator, word of the
/// group element, coefficient)`.
type LocalIdentity = Vec<(RelKey, Vec<u8>, i64)>;

fn local_letters(gaps: &[usize]) -> Vec<usize> {
    let mut l = vec![1];
    for g in gaps {
        l.push(l.last().unwrap() + g);
    }
    l
}

fn local_identities(gaps: &[usize]) -> Result<Arc<Vec<LocalIdentity>>, HomologyError> {
    static CACHE: OnceLock<Mutex<HashMap<Vec<usize>, Arc<Vec<LocalIdentity>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().get(gaps) {
        return Ok(v.clone());
    }
    let v = Arc::new(compute_local_identities(gaps)?);
    cache.lock().insert(gaps.to_vec(), v.clone());
    Ok(v)
}

fn gaps_of(letters: &[usize]) -> Vec<usize> {
    letters.windows(2).map(|w| (w[1] - w[0]).min(2)).collect()
}

fn compute_local_identities(gaps: &[usize]) -> Result<Vec<LocalIdentity>, HomologyError> {
    let letters = local_letters(gaps);
    let t = letters.len();
    let g = PermGroup::parabolic(letters[t - 1] + 1, &letters)?;
    let order = g.order();
    let rels = relators(&letters);
    let nr = rels.len();
    let rel_index: HashMap<RelKey, usize> = rels.iter().enumerate().map(|(i, (k, _))| (*k, i)).collect();
    // d2 as a dense integer matrix, rows (h, s), columns (h, r)
    let mut d2 = IntMatrix::zero(order * t, order * nr);
    for (r, (_, w)) in rels.iter().enumerate() {
        for (s, coeff) in fox(&g, w) {
            for h in 0..order as u32 {
                for &(x, c) in &coeff {
                    let row = g.mul(h, x) as usize * t + s;
                    let col = h as usize * nr + r;
                    let old = d2.get_i64(row, col).unwrap_or(0);
                    d2.set_i64(row, col, old + c);
                }
            }
        }
    }
    let kernel = integer_kernel(&d2);
    let dim = order * nr;
    let to_vec = |id: &LocalIdentity| -> Vec<i64> {
        let mut v = vec![0i64; dim];
        for (key, w, c) in id {
            v[g.eval_word(w) as usize * nr + rel_index[key]] += c;
        }
        v
    };
    let mut span: Vec<Vec<i64>> = Vec::new();
    for size in 1..t {
        for sub in subsets(t, size) {
            let sub_letters: Vec<usize> = sub.iter().map(|&a| letters[a]).collect();
            for id in local_identities(&gaps_of(&sub_letters))?.iter() {
                span.push(to_vec(&embed(id, &sub)));
            }
        }
    }
    let mut kcols: Vec<Vec<i64>> = (0..kernel.cols())
        .map(|j| (0..dim).map(|i| kernel.get_i64(i, j).expect("small kernel entries")).collect())
        .collect();
    kcols.sort_by_key(|v| v.iter().map(|x| x.abs()).sum::<i64>());
    let mut new = Vec::new();
    loop {
        let (q, proj) = orbit_span_quotient(&g, nr, &span);
        let missing = kcols.iter().find(|v| {
            let img = proj.apply(&v.iter().map(|&x| x.into()).collect::<Vec<_>>());
            !q.is_zero_element(&img)
        });
        let Some(v) = missing else { break };
        span.push(v.clone());
        let id: LocalIdentity = v
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (rels[i % nr].0, g.word((i / nr) as u32).to_vec(), c))
            .collect();
        new.push(id);
    }
    Ok(new)
}

/// Cokernel of the Z-span of all translates `h . v`.
fn orbit_span_quotient(g: &PermGroup, nr: usize, span: &[Vec<i64>]) -> (FgAbGroup, AbMap) {
    let order = g.order();
    let dim = order * nr;
    let mut m = IntMatrix::zero(dim, span.len() * order);
    for (a, v) in span.iter().enumerate() {
        for h in 0..order as u32 {
            let col = a * order + h as usize;
            for (i, &c) in v.iter().enumerate().filter(|(_, &c)| c != 0) {
                let row = g.mul(h, (i / nr) as u32) as usize * nr + i % nr;
                m.set_i64(row, col, c);
            }
        }
    }
    let f = AbMap { source: FgAbGroup::free(m.cols()), target: FgAbGroup::free(dim), matrix: m };
    let (q, proj, _) = cokernel_with_section(&f);
    (q, proj)
}

fn subsets(t: usize, size: usize) -> Vec<Vec<usize>> {
    (0u32..1 << t).filter(|m| m.count_ones() as usize == size).map(|m| (0..t).filter(|i| m >> i & 1 == 1).collect()).collect()
}

/// Rename generator positions of an identity through `pos`.
fn embed(id: &LocalIdentity, pos: &[usize]) -> LocalIdentity {
    id.iter()
        .map(|(k, w, c)| {
            let k = match *k {
                RelKey::Square(a) => RelKey::Square(pos[a]),
                RelKey::Pair(a, b) => RelKey::Pair(pos[a], pos[b]),
            };
            (k, w.iter().map(|&x| pos[x as usize] as u8).collect(), *c)
        })
        .collect()
}

/// Over which coefficients exactness is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exactness {
    Integral,
    ModP(u64),
}

pub struct Resolution {
    group: Arc<PermGroup>,
    cells: [Vec<Cell>; 4],
    /// `boundary[k][j]`: boundary of cell `j` of degree `k` as `(cell of degree k-1, coefficient)`.
    boundary: [Vec<Vec<(usize, RingElem)>>; 4],
    verified: Mutex<Vec<Exactness>>,
}

impl std::fmt::Debug for Resolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Resolution({:?}, ranks {:?})", self.group, self.ranks())
    }
}

impl Resolution {
    /// The resolution for `group`, shared between callers.
    pub fn of(group: &Arc<PermGroup>) -> Result<Arc<Resolution>, HomologyError> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, Vec<usize>), Arc<Resolution>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let key = group_key(group);
        if let Some(r) = cache.lock().get(&key) {
            return Ok(r.clone());
        }
        let r = Arc::new(Self::build(group.clone())?);
        cache.lock().insert(key, r.clone());
        Ok(r)
    }

    fn build(group: Arc<PermGroup>) -> Result<Self, HomologyError> {
        let g = &*group;
        let letters = g.letters().to_vec();
        let t = letters.len();
        let id = g.identity();
        let c1: Vec<Cell> = letters.iter().map(|&i| Cell::Edge(i)).collect();
        let b1: Vec<Vec<(usize, RingElem)>> = (0..t).map(|k| vec![(0, compact(vec![(g.generator(k), 1), (id, -1)]))]).collect();
        let rels = relators(&letters);
        let rel_index: HashMap<RelKey, usize> = rels.iter().enumerate().map(|(i, (k, _))| (*k, i)).collect();
        let c2: Vec<Cell> = rels
            .iter()
            .map(|(k, _)| match *k {
                RelKey::Square(a) => Cell::Square(letters[a]),
                RelKey::Pair(a, b) => Cell::Pair(letters[a], letters[b]),
            })
            .collect();
        let b2: Vec<Vec<(usize, RingElem)>> = rels.iter().map(|(_, w)| fox(g, w).into_iter().collect()).collect();
        let mut c3 = Vec::new();
        let mut b3 = Vec::new();
        for size in 1..=t.min(3) {
            for sub in subsets(t, size) {
                let sub_letters: Vec<usize> = sub.iter().map(|&a| letters[a]).collect();
                for (j, lid) in local_identities(&gaps_of(&sub_letters))?.iter().enumerate() {
                    let mut acc: BTreeMap<usize, RingElem> = BTreeMap::new();
                    for (key, w, c) in embed(lid, &sub) {
                        acc.entry(rel_index[&key]).or_default().push((g.eval_word(&w), c));
                    }
                    c3.push(Cell::Identity(sub_letters.clone(), j));
                    b3.push(acc.into_iter().map(|(r, v)| (r, compact(v))).filter(|(_, v)| !v.is_empty()).collect());
                }
            }
        }
        Ok(Resolution {
            group,
            cells: [vec![Cell::Vertex], c1, c2, c3],
            boundary: [Vec::new(), b1, b2, b3],
            verified: Mutex::new(Vec::new()),
        })
    }

    pub fn group(&self) -> &Arc<PermGroup> {
        &self.group
    }

    /// Ranks over the group ring in degrees 0..=3.
    pub fn ranks(&self) -> [usize; 4] {
        [self.cells[0].len(), self.cells[1].len(), self.cells[2].len(), self.cells[3].len()]
    }

    pub fn cells(&self, k: usize) -> &[Cell] {
        &self.cells[k]
    }

    /// Boundary of cell `j` in degree `k >= 1`.
    pub fn boundary(&self, k: usize, j: usize) -> &[(usize, RingElem)] {
        &self.boundary[k][j]
    }

    /// For each cell of degree `k`, the index of its shifted cell in `target`.
    pub fn shifted_cells(&self, target: &Resolution, k: usize) -> Option<Vec<usize>> {
        let pos: HashMap<&Cell, usize> = target.cells[k].iter().enumerate().map(|(i, c)| (c, i)).collect();
        self.cells[k].iter().map(|c| pos.get(&c.shifted()).copied()).collect()
    }

    /// Checks `d d = 0` and exactness through degree 2 over the given
    /// coefficients. Results are remembered.
    pub fn verify(&self, mode: Exactness) -> Result<(), HomologyError> {
        {
            let done = self.verified.lock();
            if done.contains(&mode) || done.contains(&Exactness::Integral) {
                return Ok(());
            }
        }
        self.check_composites()?;
        let order = self.group.order();
        let r = self.ranks();
        let group = || format!("{:?}", self.group);
        let mut prev = 0;
        for k in 1..=3 {
            let cols = self.sparse_boundary(k);
            let rows = order * r[k - 1];
            let rank = match mode {
                Exactness::ModP(p) => match sparse_rank(rows, &cols, Some(p)) {
                    Elimination::Rank(x) => x,
                    Elimination::Undecided => unreachable!("field elimination always decides"),
                },
                Exactness::Integral => match saturated_rank(rows, &cols) {
                    Some((x, true)) => x,
                    Some((_, false)) => return Err(HomologyError::NotExact { group: group(), degree: k - 1, detail: "image not saturated".into() }),
                    None => return Err(HomologyError::NotExact { group: group(), degree: k - 1, detail: "entries overflowed".into() }),
                },
            };
            let want = if k == 1 { order - 1 } else { order * r[k - 1] - prev };
            if rank != want {
                return Err(HomologyError::NotExact { group: group(), degree: k - 1, detail: format!("rank {rank}, need {want}") });
            }
            prev = rank;
        }
        self.verified.lock().push(mode);
        Ok(())
    }

    fn check_composites(&self) -> Result<(), HomologyError> {
        let g = &*self.group;
        for k in 2..=3 {
            for (j, b) in self.boundary[k].iter().enumerate() {
                let mut acc: HashMap<(usize, u32), i64> = HashMap::new();
                for (i, x) in b {
                    for (cell, y) in &self.boundary[k - 1][*i] {
                        for &(a, c) in x {
                            for &(bb, e) in y {
                                *acc.entry((*cell, g.mul(a, bb))).or_default() += c * e;
                            }
                        }
                    }
                }
                if acc.values().any(|&v| v != 0) {
                    return Err(HomologyError::NotExact { group: format!("{g:?}"), degree: k - 1, detail: format!("d d != 0 on cell {j}") });
                }
            }
        }
        Ok(())
    }

    /// Matrix of `d_k` over Z, basis `h e_j` indexed `h * r + j`.
    fn sparse_boundary(&self, k: usize) -> Vec<Vec<(u32, i64)>> {
        let g = &*self.group;
        let rows = self.cells[k - 1].len();
        let mut cols = Vec::with_capacity(g.order() * self.cells[k].len());
        for h in 0..g.order() as u32 {
            for b in &self.boundary[k] {
                let mut col: Vec<(u32, i64)> = Vec::new();
                for (i, x) in b {
                    for &(a, c) in x {
                        col.push((g.mul(h, a) * rows as u32 + *i as u32, c));
                    }
                }
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
                cols.push(col);
            }
        }
        cols
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_identity_counts() {
        // Z/2: the single identity (1 - s) e_{s^2}
        let one = local_identities(&[]).unwrap();
        assert_eq!(one.len(), 1);
        assert!(!local_identities(&[1]).unwrap().is_empty());
        assert!(!local_identities(&[2]).unwrap().is_empty());
    }

    #[test]
    fn exact_for_small_symmetric_groups() {
        for n in 1..=4 {
            let g = Arc::new(PermGroup::symmetric(n).unwrap());
            let r = Resolution::of(&g).unwrap();
            r.verify(Exactness::Integral).unwrap();
            r.verify(Exactness::ModP(2)).unwrap();
        }
    }

    #[test]
    fn exact_for_young_subgroups() {
        for blocks in [vec![2, 2], vec![1, 3], vec![2, 3], vec![3, 2]] {
            let g = Arc::new(PermGroup::young(&blocks).unwrap());
            Resolution::of(&g).unwrap().verify(Exactness::Integral).unwrap();
        }
    }

    #[test]
    fn dropping_an_identity_breaks_exactness() {
        let g = Arc::new(PermGroup::symmetric(3).unwrap());
        let mut r = Resolution::build(g).unwrap();
        r.cells[3].pop();
        r.boundary[3].pop();
        assert!(matches!(r.verify(Exactness::ModP(2)), Err(HomologyError::NotExact { degree: 2, .. })));
    }

    #[test]
    fn shifted_cells_exist() {
        let a = Resolution::of(&Arc::new(PermGroup::symmetric(4).unwrap())).unwrap();
        let b = Resolution::of(&Arc::new(PermGroup::symmetric(5).unwrap())).unwrap();
        for k in 0..=3 {
            let m = a.shifted_cells(&b, k).unwrap();
            for (j, &t) in m.iter().enumerate() {
                assert_eq!(b.cells(k)[t], a.cells(k)[j].shifted());
            }
        }
    }
}
