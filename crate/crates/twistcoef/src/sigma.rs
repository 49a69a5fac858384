//! The category of partial injections: objects are finite sets {1..n},
//! morphisms m -> n are injective maps defined on a subset of {1..m}.
//!
//! All interfaces are 1-based. Internally a morphism is an array of images
//! with `0` meaning "undefined".

use parking_lot::RwLock;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

const UNDEF: u32 = 0;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SigmaError {
    #[error("cannot compose {0} after {1}: object mismatch")]
    ObjectMismatch(String, String),
    #[error("index {0} out of range 1..={1}")]
    OutOfRange(usize, usize),
    #[error("map is not injective: {0} is hit twice")]
    NotInjective(usize),
    #[error("object {0} exceeds the truncation bound {1}")]
    BoundExceeded(usize, usize),
    #[error("pi needs a positive object")]
    PiOfZero,
    #[error("transposition ({0},{1}) needs 1 <= i < n")]
    BadTransposition(usize, usize),
    #[error("cannot parse morphism `{0}`: {1}")]
    Parse(String, String),
}

/// A morphism m -> n of the category of partial injections.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialInjection {
    m: usize,
    n: usize,
    map: Vec<u32>,
}

impl PartialInjection {
    /// Build from 1-based images (`None` = undefined).
    pub fn new(m: usize, n: usize, images: &[Option<usize>]) -> Result<Self, SigmaError> {
        if images.len() != m {
            return Err(SigmaError::OutOfRange(images.len(), m));
        }
        let mut hit = vec![false; n + 1];
        let mut map = Vec::with_capacity(m);
        for img in images {
            match *img {
                None => map.push(UNDEF),
                Some(v) => {
                    if v == 0 || v > n {
                        return Err(SigmaError::OutOfRange(v, n));
                    }
                    if hit[v] {
                        return Err(SigmaError::NotInjective(v));
                    }
                    hit[v] = true;
                    map.push(v as u32);
                }
            }
        }
        Ok(PartialInjection { m, n, map })
    }

    fn raw(m: usize, n: usize, map: Vec<u32>) -> Self {
        debug_assert_eq!(map.len(), m);
        PartialInjection { m, n, map }
    }

    pub fn identity(n: usize) -> Self {
        Self::raw(n, n, (1..=n as u32).collect())
    }

    /// The morphism defined nowhere.
    pub fn empty(m: usize, n: usize) -> Self {
        Self::raw(m, n, vec![UNDEF; m])
    }

    /// Bijection of {1..n} from 1-based images `perm[i-1] = p(i)`.
    pub fn permutation(perm: &[usize]) -> Result<Self, SigmaError> {
        let imgs: Vec<Option<usize>> = perm.iter().map(|&x| Some(x)).collect();
        Self::new(perm.len(), perm.len(), &imgs)
    }

    pub fn source(&self) -> usize {
        self.m
    }

    pub fn target(&self) -> usize {
        self.n
    }

    /// Image of `i` (1-based), if defined.
    pub fn get(&self, i: usize) -> Option<usize> {
        match self.map[i - 1] {
            UNDEF => None,
            v => Some(v as usize),
        }
    }

    pub fn images(&self) -> Vec<Option<usize>> {
        (1..=self.m).map(|i| self.get(i)).collect()
    }

    /// Points where the map is defined, ascending.
    pub fn domain(&self) -> Vec<usize> {
        (1..=self.m).filter(|&i| self.map[i - 1] != UNDEF).collect()
    }

    /// Points hit by the map, ascending.
    pub fn image_set(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.map.iter().filter(|&&x| x != UNDEF).map(|&x| x as usize).collect();
        v.sort_unstable();
        v
    }

    pub fn rank(&self) -> usize {
        self.map.iter().filter(|&&x| x != UNDEF).count()
    }

    pub fn is_bijection(&self) -> bool {
        self.m == self.n && self.rank() == self.n
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.m) && self.m == self.n
    }

    /// `self after f`.
    pub fn compose(&self, f: &PartialInjection) -> Result<Self, SigmaError> {
        if f.n != self.m {
            return Err(SigmaError::ObjectMismatch(self.to_string(), f.to_string()));
        }
        let map = f.map.iter().map(|&x| if x == UNDEF { UNDEF } else { self.map[x as usize - 1] }).collect();
        Ok(Self::raw(f.m, self.n, map))
    }

    /// Some g with `self o g o self == self` (the partial inverse).
    pub fn partial_inverse(&self) -> Self {
        let mut map = vec![UNDEF; self.n];
        for (i, &x) in self.map.iter().enumerate() {
            if x != UNDEF {
                map[x as usize - 1] = (i + 1) as u32;
            }
        }
        Self::raw(self.n, self.m, map)
    }
}

/// Endomorphism of n forgetting the points of `s`.
pub fn forget_morphism(n: usize, s: &[usize]) -> Result<PartialInjection, SigmaError> {
    let mut map: Vec<u32> = (1..=n as u32).collect();
    for &i in s {
        if i == 0 || i > n {
            return Err(SigmaError::OutOfRange(i, n));
        }
        map[i - 1] = UNDEF;
    }
    Ok(PartialInjection::raw(n, n, map))
}

/// n -> n+1, i -> i+1: the new point is 1.
pub fn iota(n: usize) -> PartialInjection {
    PartialInjection::raw(n, n + 1, (2..=n as u32 + 1).collect())
}

/// n+1 -> n: 1 undefined, i -> i-1.
pub fn pi(n_plus_1: usize) -> Result<PartialInjection, SigmaError> {
    if n_plus_1 == 0 {
        return Err(SigmaError::PiOfZero);
    }
    let mut map = vec![UNDEF];
    map.extend(1..n_plus_1 as u32);
    Ok(PartialInjection::raw(n_plus_1, n_plus_1 - 1, map))
}

/// The adjacent transposition swapping i and i+1 in {1..n}.
pub fn transposition(i: usize, n: usize) -> Result<PartialInjection, SigmaError> {
    if i == 0 || i >= n {
        return Err(SigmaError::BadTransposition(i, n));
    }
    let mut map: Vec<u32> = (1..=n as u32).collect();
    map.swap(i - 1, i);
    Ok(PartialInjection::raw(n, n, map))
}

/// Stabilisation: 1 -> 1 and i+1 -> f(i)+1.
pub fn stabilize_morphism(f: &PartialInjection) -> PartialInjection {
    let mut map = vec![1u32];
    map.extend(f.map.iter().map(|&x| if x == UNDEF { UNDEF } else { x + 1 }));
    PartialInjection::raw(f.m + 1, f.n + 1, map)
}

/// n -> |S|, sending the j-th smallest element of S to j, undefined off S.
pub fn order_preserving_projection(n: usize, s: &[usize]) -> Result<PartialInjection, SigmaError> {
    let mut sorted = s.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut map = vec![UNDEF; n];
    for (j, &i) in sorted.iter().enumerate() {
        if i == 0 || i > n {
            return Err(SigmaError::OutOfRange(i, n));
        }
        map[i - 1] = (j + 1) as u32;
    }
    Ok(PartialInjection::raw(n, sorted.len(), map))
}

/// |Hom(m, n)| = sum_k C(m,k) C(n,k) k!.
pub fn hom_count(m: usize, n: usize) -> u128 {
    let c = |a: usize, b: usize| -> u128 {
        let mut r = 1u128;
        for i in 0..b {
            r = r * (a - i) as u128 / (i + 1) as u128;
        }
        r
    };
    (0..=m.min(n)).map(|k| c(m, k) * c(n, k) * (1..=k as u128).product::<u128>()).sum()
}

fn enumerate_raw(m: usize, n: usize) -> Vec<PartialInjection> {
    let mut out = Vec::new();
    let mut cur = vec![UNDEF; m];
    let mut used = vec![false; n + 1];
    fn rec(i: usize, m: usize, n: usize, cur: &mut Vec<u32>, used: &mut Vec<bool>, out: &mut Vec<PartialInjection>) {
        if i == m {
            out.push(PartialInjection::raw(m, n, cur.clone()));
            return;
        }
        cur[i] = UNDEF;
        rec(i + 1, m, n, cur, used, out);
        for v in 1..=n {
            if !used[v] {
                used[v] = true;
                cur[i] = v as u32;
                rec(i + 1, m, n, cur, used, out);
                used[v] = false;
            }
        }
        cur[i] = UNDEF;
    }
    rec(0, m, n, &mut cur, &mut used, &mut out);
    out
}

/// A random morphism m -> n: uniform rank, then uniform domain, image and matching.
pub fn random_morphism<R: rand::Rng + ?Sized>(rng: &mut R, m: usize, n: usize) -> PartialInjection {
    use rand::seq::SliceRandom;
    let k = rng.gen_range(0..=m.min(n));
    let mut dom: Vec<usize> = (0..m).collect();
    let mut img: Vec<u32> = (1..=n as u32).collect();
    dom.shuffle(rng);
    img.shuffle(rng);
    let mut map = vec![UNDEF; m];
    for j in 0..k {
        map[dom[j]] = img[j];
    }
    PartialInjection::raw(m, n, map)
}

/// Truncated view of the category with memoized Hom enumeration.
pub struct SigmaCategory {
    bound: usize,
    memo: RwLock<HashMap<(usize, usize), Arc<Vec<PartialInjection>>>>,
}

impl Default for SigmaCategory {
    fn default() -> Self {
        Self::new(8)
    }
}

impl SigmaCategory {
    pub fn new(bound: usize) -> Self {
        SigmaCategory { bound, memo: RwLock::new(HashMap::new()) }
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn enumerate_hom(&self, m: usize, n: usize) -> Result<Arc<Vec<PartialInjection>>, SigmaError> {
        let worst = m.max(n);
        if worst > self.bound {
            return Err(SigmaError::BoundExceeded(worst, self.bound));
        }
        if let Some(v) = self.memo.read().get(&(m, n)) {
            return Ok(v.clone());
        }
        let v = Arc::new(enumerate_raw(m, n));
        self.memo.write().insert((m, n), v.clone());
        Ok(v)
    }
}

/// One generating morphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    /// n -> n+1
    Iota(usize),
    /// n+1 -> n, carrying n+1
    Pi(usize),
    /// swap i, i+1 on n
    Transposition(usize, usize),
}

impl Atom {
    pub fn source(&self) -> usize {
        match *self {
            Atom::Iota(n) => n,
            Atom::Pi(n1) => n1,
            Atom::Transposition(_, n) => n,
        }
    }

    pub fn target(&self) -> usize {
        match *self {
            Atom::Iota(n) => n + 1,
            Atom::Pi(n1) => n1 - 1,
            Atom::Transposition(_, n) => n,
        }
    }

    pub fn morphism(&self) -> PartialInjection {
        match *self {
            Atom::Iota(n) => iota(n),
            Atom::Pi(n1) => pi(n1).expect("atoms are valid"),
            Atom::Transposition(i, n) => transposition(i, n).expect("atoms are valid"),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Atom::Iota(n) => write!(f, "iota({n})"),
            Atom::Pi(n1) => write!(f, "pi({n1})"),
            Atom::Transposition(i, n) => write!(f, "sigma({i},{n})"),
        }
    }
}

/// Atoms in application order: the first atom is applied first.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GeneratorWord {
    pub atoms: Vec<Atom>,
}

impl GeneratorWord {
    /// Composite morphism starting at `source` (needed for the empty word).
    pub fn evaluate(&self, source: usize) -> Result<PartialInjection, SigmaError> {
        let mut acc = PartialInjection::identity(source);
        for a in &self.atoms {
            acc = a.morphism().compose(&acc)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
        write!(f, "[{}]", s.join(", "))
    }
}

/// Adjacent transpositions (application order) whose composite is `perm`.
fn permutation_word(perm: &PartialInjection) -> Vec<Atom> {
    let n = perm.target();
    let mut imgs: Vec<u32> = perm.map.clone();
    let mut out = Vec::new();
    // bubble sort on the image list; each swap at j peels off sigma_j on the right
    let mut changed = true;
    while changed {
        changed = false;
        for j in 0..n.saturating_sub(1) {
            if imgs[j] > imgs[j + 1] {
                imgs.swap(j, j + 1);
                out.push(Atom::Transposition(j + 1, n));
                changed = true;
            }
        }
    }
    out
}

/// A word in iota, pi and adjacent transpositions composing to `f`:
/// a permutation moving the domain to the top, pi's, iota's, then a permutation.
pub fn decompose_into_generators(f: &PartialInjection) -> GeneratorWord {
    let (m, n) = (f.source(), f.target());
    let dom = f.domain();
    let k = dom.len();
    // sigma: domain to {m-k+1..m} in order, the rest to {1..m-k} in order
    let mut sigma = vec![0usize; m];
    let mut next_low = 1;
    for i in 1..=m {
        if f.get(i).is_none() {
            sigma[i - 1] = next_low;
            next_low += 1;
        }
    }
    for (j, &d) in dom.iter().enumerate() {
        sigma[d - 1] = m - k + j + 1;
    }
    // tau: n-k+j to f(d_j); {1..n-k} to the complement of the image in order
    let img = f.image_set();
    let mut tau = vec![0usize; n];
    let mut comp = (1..=n).filter(|x| img.binary_search(x).is_err());
    for slot in tau.iter_mut().take(n - k) {
        *slot = comp.next().unwrap();
    }
    for (j, &d) in dom.iter().enumerate() {
        tau[n - k + j] = f.get(d).unwrap();
    }
    let mut atoms = permutation_word(&PartialInjection::permutation(&sigma).unwrap());
    atoms.extend((k + 1..=m).rev().map(Atom::Pi));
    atoms.extend((k..n).map(Atom::Iota));
    atoms.extend(permutation_word(&PartialInjection::permutation(&tau).unwrap()));
    GeneratorWord { atoms }
}

/// Search Hom(n, m) for g with f g f = f.
pub fn find_inverse_witness(cat: &SigmaCategory, f: &PartialInjection) -> Result<Option<PartialInjection>, SigmaError> {
    let homs = cat.enumerate_hom(f.target(), f.source())?;
    for g in homs.iter() {
        if f.compose(&g.compose(f)?)? == *f {
            return Ok(Some(g.clone()));
        }
    }
    Ok(None)
}

impl fmt::Display for PartialInjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.map.iter().map(|&x| if x == UNDEF { "-".to_string() } else { x.to_string() }).collect();
        write!(f, "{}->{}:[{}]", self.m, self.n, parts.join(","))
    }
}

impl fmt::Debug for PartialInjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for PartialInjection {
    type Err = SigmaError;
    fn from_str(s: &str) -> Result<Self, SigmaError> {
        let err = |why: &str| SigmaError::Parse(s.to_string(), why.to_string());
        let (head, body) = s.trim().split_once(':').ok_or_else(|| err("missing `:`"))?;
        let (m, n) = head.split_once("->").ok_or_else(|| err("missing `->`"))?;
        let m: usize = m.trim().parse().map_err(|_| err("bad source"))?;
        let n: usize = n.trim().parse().map_err(|_| err("bad target"))?;
        let body = body.trim().strip_prefix('[').and_then(|b| b.strip_suffix(']')).ok_or_else(|| err("missing brackets"))?;
        let mut imgs = Vec::new();
        if !body.trim().is_empty() {
            for tok in body.split(',') {
                let tok = tok.trim();
                if tok == "-" {
                    imgs.push(None);
                } else {
                    imgs.push(Some(tok.parse::<usize>().map_err(|_| err("bad image"))?));
                }
            }
        }
        if imgs.len() != m {
            return Err(err("wrong number of entries"));
        }
        PartialInjection::new(m, n, &imgs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PartialInjection {
        s.parse().unwrap()
    }

    #[test]
    fn composition_example() {
        let g = p("3->4:[2,4,-]");
        let f = p("3->3:[3,-,1]");
        assert_eq!(g.compose(&f).unwrap(), p("3->4:[-,-,2]"));
        assert!(f.compose(&g).is_err());
        assert_eq!(PartialInjection::identity(4).compose(&g).unwrap(), g);
    }

    #[test]
    fn forget_examples() {
        assert_eq!(forget_morphism(3, &[]).unwrap(), PartialInjection::identity(3));
        assert_eq!(forget_morphism(3, &[1, 2, 3]).unwrap(), PartialInjection::empty(3, 3));
        assert_eq!(forget_morphism(4, &[2]).unwrap(), p("4->4:[1,-,3,4]"));
        assert!(forget_morphism(2, &[3]).is_err());
        let a = forget_morphism(4, &[1, 2]).unwrap();
        let b = forget_morphism(4, &[2, 4]).unwrap();
        assert_eq!(a.compose(&b).unwrap(), forget_morphism(4, &[1, 2, 4]).unwrap());
    }

    #[test]
    fn iota_pi_examples() {
        assert_eq!(iota(0), p("0->1:[]"));
        assert_eq!(iota(2), p("2->3:[2,3]"));
        assert_eq!(pi(1).unwrap(), p("1->0:[-]"));
        assert_eq!(pi(3).unwrap(), p("3->2:[-,1,2]"));
        for n in 0..5 {
            assert!(pi(n + 1).unwrap().compose(&iota(n)).unwrap().is_identity());
            if n >= 1 {
                assert!(!iota(n).compose(&pi(n + 1).unwrap()).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn stabilisation_examples() {
        assert_eq!(stabilize_morphism(&PartialInjection::identity(3)), PartialInjection::identity(4));
        assert_eq!(stabilize_morphism(&p("2->2:[2,1]")), p("3->3:[1,3,2]"));
    }

    #[test]
    fn projection_examples() {
        assert_eq!(order_preserving_projection(4, &[1, 2, 3, 4]).unwrap(), PartialInjection::identity(4));
        assert_eq!(order_preserving_projection(5, &[2, 4]).unwrap(), p("5->2:[-,1,-,2,-]"));
    }

    #[test]
    fn hom_counts() {
        let cat = SigmaCategory::default();
        assert_eq!(cat.enumerate_hom(1, 1).unwrap().len(), 2);
        assert_eq!(cat.enumerate_hom(2, 2).unwrap().len(), 7);
        for n in 0..5 {
            assert_eq!(cat.enumerate_hom(0, n).unwrap().len(), 1);
        }
        assert!(cat.enumerate_hom(9, 1).is_err());
    }

    #[test]
    fn generator_words() {
        assert!(decompose_into_generators(&PartialInjection::identity(3)).atoms.is_empty());
        let w = decompose_into_generators(&PartialInjection::empty(1, 1));
        assert_eq!(w.atoms, vec![Atom::Pi(1), Atom::Iota(0)]);
        let f = forget_morphism(4, &[2, 3]).unwrap();
        assert_eq!(decompose_into_generators(&f).evaluate(4).unwrap(), f);
    }

    #[test]
    fn notation_round_trip() {
        for s in ["3->5:[2,-,4]", "0->2:[]", "2->0:[-,-]"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert!("3->5:[2,2,4]".parse::<PartialInjection>().is_err());
        assert!("3->5:[2,4]".parse::<PartialInjection>().is_err());
    }
}
