//! Finitely generated abelian groups given by presentations, and maps between them.

use super::matrix::IntMatrix;
use super::modp::{ModPMatrix, ModPSolver};
use super::snf::{smith_normal_form, unimodular_inverse, SmithForm};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;
use std::sync::{Arc, OnceLock};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix does not respect the relations of the source group")]
    NotWellDefined,
    #[error("map {0} is not injective")]
    NotInjective(usize),
    #[error("inclusions do not share a target")]
    TargetMismatch,
    #[error("composite of consecutive differentials is nonzero")]
    NonzeroComposite,
}

/// Canonical isomorphism invariants: torsion coefficients (each > 1, each
/// dividing the next) and free rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Invariants {
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

impl Invariants {
    pub fn is_zero(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }
}

impl fmt::Display for Invariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Abelian group `Z^ngens / span(columns of relations)`.
#[derive(Clone)]
pub struct FgAbGroup {
    ngens: usize,
    relations: IntMatrix,
    snf: Arc<OnceLock<SmithForm>>,
}

impl FgAbGroup {
    pub fn new(ngens: usize, relations: IntMatrix) -> Self {
        assert_eq!(relations.rows(), ngens, "relation matrix must have one row per generator");
        FgAbGroup { ngens, relations, snf: Arc::new(OnceLock::new()) }
    }

    pub fn free(n: usize) -> Self {
        Self::new(n, IntMatrix::zero(n, 0))
    }

    pub fn zero() -> Self {
        Self::free(0)
    }

    pub fn cyclic(d: i64) -> Self {
        Self::new(1, IntMatrix::from_rows(&[vec![d]]))
    }

    /// `Z/t1 + ... + Z/tk + Z^free`, generators in that order.
    pub fn from_invariants(torsion: &[BigInt], free_rank: usize) -> Self {
        let n = torsion.len() + free_rank;
        let mut rel = IntMatrix::zero(n, torsion.len());
        for (i, t) in torsion.iter().enumerate() {
            rel.set(i, i, t.clone());
        }
        Self::new(n, rel)
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn smith(&self) -> &SmithForm {
        self.snf.get_or_init(|| smith_normal_form(&self.relations))
    }

    pub fn invariants(&self) -> Invariants {
        let s = self.smith();
        let nz: Vec<&BigInt> = s.d.iter().filter(|x| !x.is_zero()).collect();
        Invariants {
            torsion: nz.iter().filter(|x| !x.is_one()).map(|x| (*x).clone()).collect(),
            free_rank: self.ngens - nz.len(),
        }
    }

    pub fn rank(&self) -> usize {
        self.invariants().free_rank
    }

    pub fn is_zero(&self) -> bool {
        self.invariants().is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.rank() == 0
    }

    pub fn is_iso(&self, o: &FgAbGroup) -> bool {
        self.invariants() == o.invariants()
    }

    /// Same presentation (generators and relation matrix).
    pub fn same_presentation(&self, o: &FgAbGroup) -> bool {
        self.ngens == o.ngens && self.relations == o.relations
    }

    /// Is the element with coordinates `v` zero in the group?
    pub fn is_zero_element(&self, v: &[BigInt]) -> bool {
        v.iter().all(|x| x.is_zero()) || solve(&self.relations, &IntMatrix::column_vector(v)).is_some()
    }

    pub fn direct_sum(parts: &[&FgAbGroup]) -> FgAbGroup {
        let rels: Vec<&IntMatrix> = parts.iter().map(|g| &g.relations).collect();
        let n = parts.iter().map(|g| g.ngens).sum();
        FgAbGroup::new(n, IntMatrix::block_diag(&rels))
    }

    /// Tensor product over Z; generator (i, j) sits at index `i * o.ngens + j`.
    pub fn tensor(&self, o: &FgAbGroup) -> FgAbGroup {
        let a = self.relations.kron(&IntMatrix::identity(o.ngens));
        let b = IntMatrix::identity(self.ngens).kron(&o.relations);
        let n = self.ngens * o.ngens;
        FgAbGroup::new(n, IntMatrix::hstack(n, &[&a, &b]))
    }

    /// `self / p self`, i.e. `self (x) Z/p`.
    pub fn mod_p(&self, p: u64) -> FgAbGroup {
        let pi = IntMatrix::identity(self.ngens).scale(&BigInt::from(p));
        FgAbGroup::new(self.ngens, IntMatrix::hstack(self.ngens, &[&self.relations, &pi]))
    }

    /// An isomorphic presentation in Smith form with unit factors removed,
    /// together with the coordinate changes `to` (old -> new) and `from` (new -> old).
    pub fn simplify(&self) -> Simplified {
        let s = self.smith();
        let mut keep = Vec::new();
        let mut orders = Vec::new();
        for i in 0..self.ngens {
            let d = s.d.get(i).cloned().unwrap_or_else(BigInt::zero);
            if !d.is_one() {
                keep.push(i);
                orders.push(d);
            }
        }
        let uinv = unimodular_inverse(&s.u);
        let to = s.u.select_rows(&keep);
        let from = uinv.select_cols(&keep);
        let torsion: Vec<BigInt> = orders.iter().filter(|d| !d.is_zero()).cloned().collect();
        // torsion coordinates come first in Smith order; zeros (free) follow
        let group = FgAbGroup::from_invariants(&torsion, keep.len() - torsion.len());
        Simplified { group, to, from }
    }

    /// Reduce each coordinate into a canonical range relative to a
    /// Smith-form presentation (used for comparing elements).
    pub fn normal_form(&self, v: &[BigInt]) -> Vec<BigInt> {
        let s = self.smith();
        let w = s.u.apply(v);
        w.into_iter()
            .enumerate()
            .map(|(i, x)| {
                let d = s.d.get(i).cloned().unwrap_or_else(BigInt::zero);
                if d.is_zero() {
                    x
                } else {
                    x.mod_floor(&d)
                }
            })
            .collect()
    }
}

impl fmt::Debug for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FgAbGroup({} gens, rel {})", self.ngens, self.relations)
    }
}

impl PartialEq for FgAbGroup {
    fn eq(&self, o: &Self) -> bool {
        self.same_presentation(o)
    }
}
impl Eq for FgAbGroup {}

/// Result of [`FgAbGroup::simplify`].
#[derive(Clone, Debug)]
pub struct Simplified {
    pub group: FgAbGroup,
    pub to: IntMatrix,
    pub from: IntMatrix,
}

/// Homomorphism given on generators: column j is the image of source generator j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbMap {
    pub source: FgAbGroup,
    pub target: FgAbGroup,
    pub matrix: IntMatrix,
}

impl AbMap {
    pub fn new(source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix) -> Result<Self, LinalgError> {
        let m = Self::new_unchecked(source, target, matrix)?;
        if !m.is_well_defined() {
            return Err(LinalgError::NotWellDefined);
        }
        Ok(m)
    }

    pub fn new_unchecked(source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix) -> Result<Self, LinalgError> {
        if matrix.shape() != (target.ngens(), source.ngens()) {
            return Err(LinalgError::Shape(format!(
                "matrix {:?} for map {} -> {} generators",
                matrix.shape(),
                source.ngens(),
                target.ngens()
            )));
        }
        Ok(AbMap { source, target, matrix })
    }

    /// Relations of the source go to zero in the target.
    pub fn is_well_defined(&self) -> bool {
        let img = self.matrix.mul(self.source.relations());
        img.is_zero() || solve(self.target.relations(), &img).is_some()
    }

    pub fn identity(g: &FgAbGroup) -> Self {
        AbMap { source: g.clone(), target: g.clone(), matrix: IntMatrix::identity(g.ngens()) }
    }

    pub fn zero(source: &FgAbGroup, target: &FgAbGroup) -> Self {
        AbMap { source: source.clone(), target: target.clone(), matrix: IntMatrix::zero(target.ngens(), source.ngens()) }
    }

    /// `self after f`.
    pub fn compose(&self, f: &AbMap) -> Result<AbMap, LinalgError> {
        if f.target.ngens() != self.source.ngens() {
            return Err(LinalgError::Shape("composition".into()));
        }
        Ok(AbMap { source: f.source.clone(), target: self.target.clone(), matrix: self.matrix.mul(&f.matrix) })
    }

    pub fn add(&self, o: &AbMap) -> AbMap {
        AbMap { source: self.source.clone(), target: self.target.clone(), matrix: self.matrix.add(&o.matrix) }
    }

    pub fn sub(&self, o: &AbMap) -> AbMap {
        AbMap { source: self.source.clone(), target: self.target.clone(), matrix: self.matrix.sub(&o.matrix) }
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.matrix.apply(v)
    }

    /// Every generator maps to zero.
    pub fn is_zero(&self) -> bool {
        if self.matrix.is_zero() {
            return true;
        }
        if let Some(moduli) = diagonal_moduli(self.target.relations()) {
            return (0..self.matrix.rows()).all(|i| {
                (0..self.matrix.cols()).all(|j| self.matrix.is_entry_zero(i, j) || (!moduli[i].is_zero() && self.matrix.get(i, j).is_multiple_of(&moduli[i])))
            });
        }
        solve(self.target.relations(), &self.matrix).is_some()
    }

    /// Agree as homomorphisms (same source and target presentations assumed).
    pub fn equals(&self, o: &AbMap) -> bool {
        self.sub(o).is_zero()
    }

    pub fn is_injective(&self) -> bool {
        kernel(self).0.is_zero()
    }

    pub fn is_surjective(&self) -> bool {
        cokernel(self).0.is_zero()
    }

    pub fn is_iso(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// Precompose with a new source presentation and postcompose with a new
    /// target presentation via coordinate changes.
    pub fn reindex(&self, source: &Simplified, target: &Simplified) -> AbMap {
        AbMap {
            source: source.group.clone(),
            target: target.group.clone(),
            matrix: target.to.mul(&self.matrix).mul(&source.from),
        }
    }
}

/// For relations whose columns each have at most one nonzero entry, the
/// order of each generator (0 = free).
fn diagonal_moduli(rel: &IntMatrix) -> Option<Vec<BigInt>> {
    let mut m = vec![BigInt::zero(); rel.rows()];
    for j in 0..rel.cols() {
        let mut hit = None;
        for i in 0..rel.rows() {
            if !rel.is_entry_zero(i, j) {
                if hit.is_some() {
                    return None;
                }
                hit = Some(i);
            }
        }
        if let Some(i) = hit {
            m[i] = m[i].gcd(&rel.get(i, j));
        }
    }
    Some(m)
}

/// Find X with `a * X = b` over Z, or `None` if no integral solution exists.
pub fn solve(a: &IntMatrix, b: &IntMatrix) -> Option<IntMatrix> {
    assert_eq!(a.rows(), b.rows(), "solve: row mismatch");
    let (r, c) = a.shape();
    if b.is_zero() {
        return Some(IntMatrix::zero(c, b.cols()));
    }
    let s = smith_normal_form(a);
    let ub = s.u.mul(b);
    let mut y = IntMatrix::zero(c, b.cols());
    for i in 0..r {
        let d = s.d.get(i).cloned().unwrap_or_else(BigInt::zero);
        for j in 0..b.cols() {
            if ub.is_entry_zero(i, j) {
                continue;
            }
            let x = ub.get(i, j);
            if d.is_zero() {
                return None;
            }
            let (q, rem) = x.div_rem(&d);
            if !rem.is_zero() {
                return None;
            }
            y.set(i, j, q);
        }
    }
    Some(s.v.mul(&y))
}

/// Basis (as columns) of the integer kernel of `a`.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let s = smith_normal_form(a);
    let rank = s.rank();
    let cols: Vec<usize> = (rank..a.cols()).collect();
    s.v.select_cols(&cols)
}

/// Basis (as columns) of the lattice spanned by the columns of `a`.
pub fn column_lattice_basis(a: &IntMatrix) -> IntMatrix {
    if a.cols() == 0 {
        return IntMatrix::zero(a.rows(), 0);
    }
    // u a v = d  =>  column span of a = u^{-1} * (column span of d)
    let s = smith_normal_form(a);
    let rank = s.rank();
    let uinv = unimodular_inverse(&s.u);
    let mut out = uinv.select_cols(&(0..rank).collect::<Vec<_>>());
    for (j, d) in s.d.iter().take(rank).enumerate() {
        if !d.is_one() {
            for i in 0..out.rows() {
                if !out.is_entry_zero(i, j) {
                    out.set(i, j, out.get(i, j) * d);
                }
            }
        }
    }
    out
}

/// Basis of the column lattice of `a` in echelon form, built one column at a
/// time with extended-gcd steps. Memory stays `O(rows^2)` however many
/// columns `a` has.
pub fn echelon_lattice_basis(a: &IntMatrix) -> IntMatrix {
    let r = a.rows();
    let mut basis: Vec<Option<Vec<BigInt>>> = vec![None; r];
    for j in 0..a.cols() {
        let mut v: Vec<BigInt> = (0..r).map(|i| a.get(i, j)).collect();
        while let Some(i) = v.iter().position(|x| !x.is_zero()) {
            let Some(b) = basis[i].take() else {
                basis[i] = Some(v);
                break;
            };
            let e = b[i].extended_gcd(&v[i]);
            let (bq, vq) = (&b[i] / &e.gcd, &v[i] / &e.gcd);
            let new_b: Vec<BigInt> = b.iter().zip(&v).map(|(x, y)| &e.x * x + &e.y * y).collect();
            v = b.iter().zip(&v).map(|(x, y)| &bq * y - &vq * x).collect();
            basis[i] = Some(new_b);
        }
    }
    let cols: Vec<Vec<BigInt>> = basis.into_iter().flatten().collect();
    let mut out = IntMatrix::zero(r, cols.len());
    for (j, c) in cols.into_iter().enumerate() {
        for (i, x) in c.into_iter().enumerate() {
            if !x.is_zero() {
                out.set(i, j, x);
            }
        }
    }
    out
}

/// Generators of `{x : a x in span(rel)}`, as columns (possibly dependent).
fn preimage_of_relations(a: &IntMatrix, rel: &IntMatrix) -> IntMatrix {
    let g = a.cols();
    let stacked = IntMatrix::hstack(a.rows(), &[a, rel]);
    let k = integer_kernel(&stacked);
    k.select_rows(&(0..g).collect::<Vec<_>>())
}

/// Kernel of `f` with its inclusion into the source.
pub fn kernel(f: &AbMap) -> (FgAbGroup, AbMap) {
    let pre = preimage_of_relations(&f.matrix, f.target.relations());
    let basis = column_lattice_basis(&pre);
    let rel = solve(&basis, f.source.relations()).expect("source relations lie in the kernel lattice");
    let k = FgAbGroup::new(basis.cols(), rel);
    let s = k.simplify();
    let incl = AbMap { source: s.group.clone(), target: f.source.clone(), matrix: basis.mul(&s.from) };
    (s.group, incl)
}

/// Image of `f` with its inclusion into the target.
pub fn image(f: &AbMap) -> (FgAbGroup, AbMap) {
    let pre = preimage_of_relations(&f.matrix, f.target.relations());
    let g = FgAbGroup::new(f.matrix.cols(), pre);
    let s = g.simplify();
    let incl = AbMap { source: s.group.clone(), target: f.target.clone(), matrix: f.matrix.mul(&s.from) };
    (s.group, incl)
}

/// Cokernel of `f` with the quotient map from the target.
pub fn cokernel(f: &AbMap) -> (FgAbGroup, AbMap) {
    let (g, proj, _) = cokernel_with_section(f);
    (g, proj)
}

/// As [`cokernel`], also returning lifts of the quotient generators to the
/// target (columns), so maps out of the cokernel can be written down.
pub fn cokernel_with_section(f: &AbMap) -> (FgAbGroup, AbMap, IntMatrix) {
    let n = f.target.ngens();
    let rel = IntMatrix::hstack(n, &[f.target.relations(), &f.matrix]);
    let q = FgAbGroup::new(n, rel);
    let s = q.simplify();
    let proj = AbMap { source: f.target.clone(), target: s.group.clone(), matrix: s.to.clone() };
    (s.group, proj, s.from)
}

/// Intersection of subgroups given by injective maps into one ambient group.
pub fn intersect_subgroups(inclusions: &[AbMap]) -> Result<(FgAbGroup, AbMap), LinalgError> {
    let Some(first) = inclusions.first() else {
        return Err(LinalgError::Shape("no subgroups given".into()));
    };
    for (i, m) in inclusions.iter().enumerate() {
        if !m.target.same_presentation(&first.target) {
            return Err(LinalgError::TargetMismatch);
        }
        if !m.is_injective() {
            return Err(LinalgError::NotInjective(i));
        }
    }
    let mut cur = first.clone();
    for next in &inclusions[1..] {
        cur = intersect_two(&cur, next);
    }
    Ok((cur.source.clone(), cur))
}

fn intersect_two(a: &AbMap, b: &AbMap) -> AbMap {
    let sum = FgAbGroup::direct_sum(&[&a.source, &b.source]);
    let diff = IntMatrix::hstack(a.target.ngens(), &[&a.matrix, &b.matrix.neg()]);
    let d = AbMap { source: sum, target: a.target.clone(), matrix: diff };
    let (k, kin) = kernel(&d);
    let rows: Vec<usize> = (0..a.source.ngens()).collect();
    let to_a = kin.matrix.select_rows(&rows);
    AbMap { source: k, target: a.target.clone(), matrix: a.matrix.mul(&to_a) }
}

/// Is the image of `small` contained in the image of `big` (same target)?
pub fn image_contained(small: &AbMap, big: &AbMap) -> bool {
    if small.matrix.is_zero() {
        return true;
    }
    let n = big.target.ngens();
    let span = IntMatrix::hstack(n, &[&big.matrix, big.target.relations()]);
    solve(&span, &small.matrix).is_some()
}

/// Equality of the images of two maps into one target, by double inclusion.
pub fn same_subgroup(a: &AbMap, b: &AbMap) -> bool {
    image_contained(a, b) && image_contained(b, a)
}

/// Lift `f: A -> C` through an injective `i: K -> C` whose image contains im f.
pub fn lift_through(f: &AbMap, i: &AbMap) -> Option<AbMap> {
    let n = i.target.ngens();
    let span = IntMatrix::hstack(n, &[&i.matrix, i.target.relations()]);
    let x = solve(&span, &f.matrix)?;
    let m = x.select_rows(&(0..i.source.ngens()).collect::<Vec<_>>());
    Some(AbMap { source: f.source.clone(), target: i.source.clone(), matrix: m })
}

/// Coefficient ring for homology and functor values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ring {
    Z,
    Q,
    Fp(u64),
}

impl Ring {
    /// Base change of a group: `G (x) Z/p` for `Fp`; unchanged otherwise
    /// (rational results are read off the free part).
    pub fn base_change(&self, g: &FgAbGroup) -> FgAbGroup {
        match self {
            Ring::Fp(p) => g.mod_p(*p),
            _ => g.clone(),
        }
    }

    /// Free module of rank `r` over the ring, as a presentation over Z.
    pub fn free_module(&self, r: usize) -> FgAbGroup {
        self.base_change(&FgAbGroup::free(r))
    }

    /// Is `g (x) R` zero? (Over Q only the free rank counts.)
    pub fn is_zero_group(&self, g: &FgAbGroup) -> bool {
        match self {
            Ring::Q => g.rank() == 0,
            _ => g.is_zero(),
        }
    }

    pub fn base_change_map(&self, f: &AbMap) -> AbMap {
        AbMap { source: self.base_change(&f.source), target: self.base_change(&f.target), matrix: f.matrix.clone() }
    }

    /// Invariants of `G (x) R` read from a presentation that was already base-changed.
    pub fn reduce_invariants(&self, inv: &Invariants) -> Invariants {
        match self {
            Ring::Q => Invariants { torsion: vec![], free_rank: inv.free_rank },
            _ => inv.clone(),
        }
    }

    /// Dimension over the ring (rank for Z, dimension for fields).
    pub fn dimension(&self, inv: &Invariants) -> usize {
        match self {
            Ring::Z | Ring::Q => inv.free_rank,
            Ring::Fp(p) => {
                let pb = BigInt::from(*p);
                inv.free_rank + inv.torsion.iter().filter(|t| (*t % &pb).is_zero()).count()
            }
        }
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, Ring::Z)
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Z => write!(f, "Z"),
            Ring::Q => write!(f, "Q"),
            Ring::Fp(p) => write!(f, "Fp:{p}"),
        }
    }
}

impl std::str::FromStr for Ring {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "Z" => Ok(Ring::Z),
            "Q" => Ok(Ring::Q),
            _ => {
                let p = s
                    .strip_prefix("Fp:")
                    .or_else(|| s.strip_prefix('F'))
                    .ok_or_else(|| format!("unknown ring `{s}` (expected Z, Q or Fp:<p>)"))?;
                let p: u64 = p.parse().map_err(|_| format!("bad prime in `{s}`"))?;
                if p < 2 || !is_prime(p) || p >= 1 << 31 {
                    return Err(format!("{p} is not a prime below 2^31"));
                }
                Ok(Ring::Fp(p))
            }
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Homology `ker(d_here) / im(d_next)` of `C_{k+1} -> C_k -> C_{k-1}`, over `ring`.
pub fn homology_of_complex(d_next: &AbMap, d_here: &AbMap, ring: Ring) -> Result<FgAbGroup, LinalgError> {
    let (h, _, _) = homology_with_cycles(d_next, d_here, ring)?;
    Ok(h)
}

/// As [`homology_of_complex`], also returning the inclusion of cycles and the
/// projection from cycles onto homology.
pub fn homology_with_cycles(d_next: &AbMap, d_here: &AbMap, ring: Ring) -> Result<(FgAbGroup, AbMap, AbMap), LinalgError> {
    let h = homology_with_section(d_next, d_here, ring)?;
    Ok((h.group, h.cycles, h.proj))
}

/// Homology of `C' -> C -> C''` at `C` with the data needed to push classes
/// through chain maps.
#[derive(Clone, Debug)]
pub struct HomologyData {
    pub group: FgAbGroup,
    /// Cycles `Z` with their inclusion into the chain group.
    pub cycles: AbMap,
    /// `Z -> H`.
    pub proj: AbMap,
    /// Columns are cycles (in `Z` coordinates) representing the generators of `H`.
    pub section: IntMatrix,
    /// Over F_p with vector-space chain groups: solver for `[boundaries | representatives]`.
    modp: Option<Arc<(ModPSolver, usize)>>,
}

impl HomologyData {
    /// Chain-group representatives of the generators of `H`, as columns.
    pub fn representatives(&self) -> IntMatrix {
        self.cycles.matrix.mul(&self.section)
    }

    /// Class of chain-group vectors (columns of `c`) that are cycles.
    pub fn class_of(&self, c: &IntMatrix) -> Option<IntMatrix> {
        if let Some(fast) = &self.modp {
            let (solver, nb) = &**fast;
            let p = match self.group.invariants().torsion.first() {
                Some(p) => p.to_u64().unwrap(),
                None => return Some(IntMatrix::zero(0, c.cols())),
            };
            let cm = ModPMatrix::from_int(p, c);
            let mut out = IntMatrix::zero(self.group.ngens(), c.cols());
            for j in 0..c.cols() {
                let x = solver.solve(&cm.column(j))?;
                for (i, &v) in x[*nb..].iter().enumerate() {
                    out.set_i64(i, j, v as i64);
                }
            }
            return Some(out);
        }
        let src = FgAbGroup::free(c.cols());
        let f = AbMap { source: src, target: self.cycles.target.clone(), matrix: c.clone() };
        let z = lift_through(&f, &self.cycles)?;
        Some(self.proj.matrix.mul(&z.matrix))
    }
}

pub fn homology_with_section(d_next: &AbMap, d_here: &AbMap, ring: Ring) -> Result<HomologyData, LinalgError> {
    if d_next.target.ngens() != d_here.source.ngens() {
        return Err(LinalgError::Shape("differentials do not compose".into()));
    }
    if let Ring::Fp(p) = ring {
        let pb = BigInt::from(p);
        let vector_space = |g: &FgAbGroup| {
            let r = g.relations();
            (0..r.rows()).all(|i| (0..r.cols()).all(|j| r.is_entry_zero(i, j) || r.get(i, j).is_multiple_of(&pb)))
        };
        if [&d_next.source, &d_here.source, &d_here.target].into_iter().all(vector_space) {
            return homology_mod_p(d_next, d_here, p);
        }
    }
    let d_next = ring.base_change_map(d_next);
    let d_here = ring.base_change_map(d_here);
    if !d_here.compose(&d_next)?.is_zero() {
        return Err(LinalgError::NonzeroComposite);
    }
    let (_, zin) = kernel(&d_here);
    let lifted = lift_through(&d_next, &zin).expect("boundaries are cycles");
    let (h, proj, section) = cokernel_with_section(&lifted);
    if ring == Ring::Q {
        // drop torsion: keep the free coordinates of the Smith presentation
        let inv = h.invariants();
        let nt = inv.torsion.len();
        let free = FgAbGroup::free(inv.free_rank);
        let keep: Vec<usize> = (nt..nt + inv.free_rank).collect();
        let p = AbMap { source: proj.source.clone(), target: free.clone(), matrix: proj.matrix.select_rows(&keep) };
        return Ok(HomologyData { group: free, cycles: zin, proj: p, section: section.select_cols(&keep), modp: None });
    }
    Ok(HomologyData { group: h, cycles: zin, proj, section, modp: None })
}

/// Homology when every chain group is an F_p-vector space in its standard
/// coordinates: dense elimination mod p instead of Smith forms.
fn homology_mod_p(d_next: &AbMap, d_here: &AbMap, p: u64) -> Result<HomologyData, LinalgError> {
    let space = |n: usize| FgAbGroup::new(n, IntMatrix::identity(n).scale(&BigInt::from(p)));
    let dn = ModPMatrix::from_int(p, &d_next.matrix);
    let dh = ModPMatrix::from_int(p, &d_here.matrix);
    if dh.mul(&dn).rank() != 0 {
        return Err(LinalgError::NonzeroComposite);
    }
    let z = dh.kernel();
    let nb = dn.cols();
    let both = ModPMatrix::from_columns(p, dn.rows(), &(0..nb).map(|j| dn.column(j)).chain((0..z.cols()).map(|j| z.column(j))).collect::<Vec<_>>());
    let pivots = both.clone().rref(None);
    let reps: Vec<usize> = pivots.iter().filter(|&&c| c >= nb).map(|c| c - nb).collect();
    let span = ModPMatrix::from_columns(p, dn.rows(), &(0..nb).map(|j| dn.column(j)).chain(reps.iter().map(|&j| z.column(j))).collect::<Vec<_>>());
    let solver = ModPSolver::new(&span);
    let h = reps.len();
    let mut proj = IntMatrix::zero(h, z.cols());
    for j in 0..z.cols() {
        let x = solver.solve(&z.column(j)).expect("cycles lie in the span");
        for (i, &v) in x[nb..].iter().enumerate() {
            proj.set_i64(i, j, v as i64);
        }
    }
    let mut section = IntMatrix::zero(z.cols(), h);
    for (i, &j) in reps.iter().enumerate() {
        section.set_i64(j, i, 1);
    }
    let zg = space(z.cols());
    let hg = FgAbGroup::from_invariants(&vec![BigInt::from(p); h], 0);
    let target = d_here.source.mod_p(p);
    Ok(HomologyData {
        group: hg.clone(),
        cycles: AbMap { source: zg.clone(), target, matrix: z.to_int() },
        proj: AbMap { source: zg, target: hg, matrix: proj },
        section,
        modp: Some(Arc::new((solver, nb))),
    })
}

/// A homomorphism `r` with `r . phi = id`, if one exists.
pub fn left_inverse(phi: &AbMap) -> Option<AbMap> {
    let sa = phi.source.simplify();
    let sb = phi.target.simplify();
    let f = sb.to.mul(&phi.matrix).mul(&sa.from);
    let (ra, rb) = (sa.group.relations(), sb.group.relations());
    let (a, b) = (sa.group.ngens(), sb.group.ngens());
    let (pa, pb) = (ra.cols(), rb.cols());
    // unknowns: R (a x b), Y1 (pa x pb), Y2 (pa x a), column-major blocks
    let nx = a * b + pa * pb + pa * a;
    let r_idx = |i: usize, l: usize| l * a + i;
    let y1 = |q: usize, j: usize| a * b + j * pa + q;
    let y2 = |q: usize, j: usize| a * b + pa * pb + j * pa + q;
    let neqs = a * pb + a * a;
    let mut m = IntMatrix::zero(neqs, nx);
    let mut c = IntMatrix::zero(neqs, 1);
    let mut row = 0;
    // R relB = relA Y1
    for i in 0..a {
        for j in 0..pb {
            for l in 0..b {
                if !rb.is_entry_zero(l, j) {
                    m.set(row, r_idx(i, l), rb.get(l, j));
                }
            }
            for q in 0..pa {
                if !ra.is_entry_zero(i, q) {
                    m.set(row, y1(q, j), -ra.get(i, q));
                }
            }
            row += 1;
        }
    }
    // R f - I = relA Y2
    for i in 0..a {
        for j in 0..a {
            for l in 0..b {
                if !f.is_entry_zero(l, j) {
                    m.set(row, r_idx(i, l), f.get(l, j));
                }
            }
            for q in 0..pa {
                if !ra.is_entry_zero(i, q) {
                    m.set(row, y2(q, j), -ra.get(i, q));
                }
            }
            if i == j {
                c.set_i64(row, 0, 1);
            }
            row += 1;
        }
    }
    let x = solve(&m, &c)?;
    let mut r = IntMatrix::zero(a, b);
    for i in 0..a {
        for l in 0..b {
            if !x.is_entry_zero(r_idx(i, l), 0) {
                r.set(i, l, x.get(r_idx(i, l), 0));
            }
        }
    }
    let matrix = sa.from.mul(&r).mul(&sb.to);
    let rho = AbMap { source: phi.target.clone(), target: phi.source.clone(), matrix };
    debug_assert!(rho.compose(phi).map(|x| x.equals(&AbMap::identity(&phi.source))).unwrap_or(false));
    Some(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use num_traits::Signed;

    fn z() -> FgAbGroup {
        FgAbGroup::free(1)
    }
    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }
    fn inv(t: &[i64], r: usize) -> Invariants {
        Invariants { torsion: t.iter().map(|&x| BigInt::from(x)).collect(), free_rank: r }
    }

    #[test]
    fn kernel_examples() {
        let times2 = AbMap::new(z(), z(), m(&[vec![2]])).unwrap();
        assert!(kernel(&times2).0.is_zero());

        let red = AbMap::new(z(), FgAbGroup::cyclic(2), m(&[vec![1]])).unwrap();
        let (k, inc) = kernel(&red);
        assert_eq!(k.invariants(), inv(&[], 1));
        assert_eq!(inc.matrix.get(0, 0).abs(), BigInt::from(2));

        let sum = AbMap::new(FgAbGroup::free(2), z(), m(&[vec![1, 1]])).unwrap();
        let (k, inc) = kernel(&sum);
        assert_eq!(k.invariants(), inv(&[], 1));
        let col = inc.matrix.column(0);
        assert_eq!(col[0], -col[1].clone());
        assert_eq!(col[0].abs(), BigInt::from(1));
    }

    #[test]
    fn image_examples() {
        let times2 = AbMap::new(z(), z(), m(&[vec![2]])).unwrap();
        let (g, inc) = image(&times2);
        assert_eq!(g.invariants(), inv(&[], 1));
        assert_eq!(inc.matrix.get(0, 0).abs(), BigInt::from(2));

        let zero = AbMap::zero(&z(), &z());
        assert!(image(&zero).0.is_zero());

        let diag = AbMap::new(FgAbGroup::free(2), FgAbGroup::free(2), m(&[vec![1, 1], vec![1, 1]])).unwrap();
        let (g, inc) = image(&diag);
        assert_eq!(g.invariants(), inv(&[], 1));
        let col = inc.matrix.column(0);
        assert_eq!(col[0], col[1]);
        assert_eq!(col[0].abs(), BigInt::from(1));
    }

    #[test]
    fn cokernel_examples() {
        let times2 = AbMap::new(z(), z(), m(&[vec![2]])).unwrap();
        assert_eq!(cokernel(&times2).0.invariants(), inv(&[2], 0));
        assert!(cokernel(&AbMap::identity(&FgAbGroup::free(3))).0.is_zero());
        let first = AbMap::new(z(), FgAbGroup::free(2), m(&[vec![1], vec![0]])).unwrap();
        assert_eq!(cokernel(&first).0.invariants(), inv(&[], 1));
    }

    #[test]
    fn intersection_examples() {
        let z2 = FgAbGroup::free(2);
        let e1 = AbMap::new(z(), z2.clone(), m(&[vec![1], vec![0]])).unwrap();
        let e2 = AbMap::new(z(), z2.clone(), m(&[vec![0], vec![1]])).unwrap();
        assert!(intersect_subgroups(&[e1.clone(), e2]).unwrap().0.is_zero());
        let (g, inc) = intersect_subgroups(&[e1.clone(), e1.clone()]).unwrap();
        assert_eq!(g.invariants(), inv(&[], 1));
        assert!(same_subgroup(&inc, &e1));

        let two = AbMap::new(z(), z(), m(&[vec![2]])).unwrap();
        let three = AbMap::new(z(), z(), m(&[vec![3]])).unwrap();
        let (g, inc) = intersect_subgroups(&[two, three]).unwrap();
        assert_eq!(g.invariants(), inv(&[], 1));
        assert_eq!(inc.matrix.get(0, 0).abs(), BigInt::from(6));
    }

    #[test]
    fn intersection_rejects_bad_input() {
        let zero_map = AbMap::zero(&z(), &z());
        let id = AbMap::identity(&z());
        assert_eq!(intersect_subgroups(&[id.clone(), zero_map]).unwrap_err(), LinalgError::NotInjective(1));
        let other = AbMap::identity(&FgAbGroup::free(2));
        assert_eq!(intersect_subgroups(&[id, other]).unwrap_err(), LinalgError::TargetMismatch);
    }

    proptest! {
        #[test]
        fn echelon_basis_spans_the_same_lattice(v in prop::collection::vec(-4i64..5, 15)) {
            let a = IntMatrix::from_fn(3, 5, |i, j| v[i * 5 + j]);
            let b = echelon_lattice_basis(&a);
            prop_assert!(b.cols() <= 3);
            prop_assert!(solve(&b, &a).is_some());
            prop_assert!(solve(&a, &b).is_some());
        }
    }

    #[test]
    fn homology_examples() {
        let z3 = FgAbGroup::free(3);
        let zero_in = AbMap::zero(&FgAbGroup::zero(), &z3);
        let zero_out = AbMap::zero(&z3, &FgAbGroup::zero());
        assert_eq!(homology_of_complex(&zero_in, &zero_out, Ring::Z).unwrap().invariants(), inv(&[], 3));

        let times2 = AbMap::new(z(), z(), m(&[vec![2]])).unwrap();
        let out = AbMap::zero(&z(), &FgAbGroup::zero());
        assert_eq!(homology_of_complex(&times2, &out, Ring::Z).unwrap().invariants(), inv(&[2], 0));
        assert_eq!(homology_of_complex(&times2, &out, Ring::Q).unwrap().invariants(), inv(&[], 0));
        assert_eq!(homology_of_complex(&times2, &out, Ring::Fp(2)).unwrap().invariants(), inv(&[2], 0));

        // triangle: vertices a,b,c; edges ab, bc, ca
        let d1 = AbMap::new(z3.clone(), z3.clone(), m(&[vec![-1, 0, 1], vec![1, -1, 0], vec![0, 1, -1]])).unwrap();
        let none = AbMap::zero(&FgAbGroup::zero(), &z3);
        assert_eq!(homology_of_complex(&none, &d1, Ring::Z).unwrap().invariants(), inv(&[], 1));
    }

    #[test]
    fn left_inverses() {
        let two = AbMap::new(z(), z(), m(&[vec![2]])).unwrap();
        assert!(left_inverse(&two).is_none());
        let incl = AbMap::new(z(), FgAbGroup::free(2), m(&[vec![1], vec![3]])).unwrap();
        let r = left_inverse(&incl).unwrap();
        assert!(r.compose(&incl).unwrap().equals(&AbMap::identity(&z())));
        // Z/2 -> Z/4, 1 -> 2 is injective but not split
        let z2 = FgAbGroup::cyclic(2);
        let z4 = FgAbGroup::cyclic(4);
        let i24 = AbMap::new(z2.clone(), z4.clone(), m(&[vec![2]])).unwrap();
        assert!(i24.is_injective());
        assert!(left_inverse(&i24).is_none());
        // Z/2 -> Z/2 + Z/4, 1 -> (1, 2) splits
        let s = FgAbGroup::direct_sum(&[&z2, &z4]);
        let j = AbMap::new(z2.clone(), s, m(&[vec![1], vec![2]])).unwrap();
        let r = left_inverse(&j).unwrap();
        assert!(r.compose(&j).unwrap().equals(&AbMap::identity(&z2)));
    }

    #[test]
    fn homology_classes_round_trip() {
        let z3 = FgAbGroup::free(3);
        let d1 = AbMap::new(z3.clone(), z3.clone(), m(&[vec![-1, 0, 1], vec![1, -1, 0], vec![0, 1, -1]])).unwrap();
        let none = AbMap::zero(&FgAbGroup::zero(), &z3);
        let h = homology_with_section(&none, &d1, Ring::Z).unwrap();
        let reps = h.representatives();
        let back = h.class_of(&reps).unwrap();
        assert_eq!(back, IntMatrix::identity(1));
        assert!(h.class_of(&m(&[vec![1], vec![0], vec![0]])).is_none());
    }

    #[test]
    fn nonzero_composite_rejected() {
        let id = AbMap::identity(&z());
        assert_eq!(homology_of_complex(&id, &id, Ring::Z).unwrap_err(), LinalgError::NonzeroComposite);
    }

    #[test]
    fn ring_parsing() {
        assert_eq!("Fp:7".parse::<Ring>().unwrap(), Ring::Fp(7));
        assert!("Fp:8".parse::<Ring>().is_err());
        assert_eq!(Ring::Fp(5).to_string(), "Fp:5");
    }
}
