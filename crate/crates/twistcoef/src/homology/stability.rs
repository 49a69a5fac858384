//! Stabilisation maps `H_d(Sigma_n; T_n) -> H_d(Sigma_{n+1}; T_{n+1})`,
//! reports on their range of stability, and the reduction of induced
//! coefficients to Young subgroups.

use super::perm::{GModule, PermGroup};
use super::{coinvariants_over, Caps, HomologyError, TwistedComplex};
use crate::functor::TruncatedFunctor;
use crate::linalg::{image, left_inverse, AbMap, FgAbGroup, HomologyData, IntMatrix, Invariants, Ring};
use crate::sigma::iota;
use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

/// Checks `f rho(s_i) = rho'(s_{i+1}) f` for every generator of the source group.
pub fn check_equivariance(src: &GModule, tgt: &GModule, f: &AbMap) -> Result<(), HomologyError> {
    let tl = tgt.group().letters();
    for (k, &i) in src.group().letters().iter().enumerate() {
        let kt = tl.iter().position(|&j| j == i + 1).ok_or_else(|| HomologyError::NotEquivariant(format!("target group lacks s_{}", i + 1)))?;
        let lhs = AbMap { source: f.source.clone(), target: f.target.clone(), matrix: f.matrix.mul(src.generator_action(k)) };
        let rhs = AbMap { source: f.source.clone(), target: f.target.clone(), matrix: tgt.generator_action(kt).mul(&f.matrix) };
        if !lhs.equals(&rhs) {
            return Err(HomologyError::NotEquivariant(format!("fails for s_{i}")));
        }
    }
    Ok(())
}

/// Map on homology with the homology data of both ends.
#[derive(Clone, Debug)]
pub struct StabilisationMap {
    pub d: usize,
    pub source: HomologyData,
    pub target: HomologyData,
    pub map: AbMap,
}

/// `e_j (x) m -> e_{shift j} (x) f m` in degree `k`.
fn chain_map(cx: &TwistedComplex, cx1: &TwistedComplex, f: &AbMap, k: usize) -> Result<AbMap, HomologyError> {
    let src = cx.chain_group(k as isize);
    let tgt = cx1.chain_group(k as isize);
    let (m, m1) = (f.source.ngens(), f.target.ngens());
    let mut mat = IntMatrix::zero(tgt.ngens(), src.ngens());
    if k <= 3 {
        let cells = cx.resolution().shifted_cells(cx1.resolution(), k).ok_or(HomologyError::NotChainMap(k))?;
        for (j, &t) in cells.iter().enumerate() {
            mat.paste(t * m1, j * m, &f.matrix);
        }
    }
    Ok(AbMap { source: src, target: tgt, matrix: mat })
}

fn check_chain_map(cx: &TwistedComplex, cx1: &TwistedComplex, f: &AbMap, k: usize) -> Result<(), HomologyError> {
    if k == 0 {
        return Ok(());
    }
    let lhs = cx1.boundary(k).compose(&chain_map(cx, cx1, f, k)?)?;
    let rhs = chain_map(cx, cx1, f, k - 1)?.compose(&cx.boundary(k))?;
    if !lhs.equals(&rhs) {
        return Err(HomologyError::NotChainMap(k));
    }
    Ok(())
}

pub(crate) fn induced(cx: &TwistedComplex, h: &HomologyData, cx1: &TwistedComplex, h1: &HomologyData, f: &AbMap, d: usize) -> Result<AbMap, HomologyError> {
    check_chain_map(cx, cx1, f, d)?;
    check_chain_map(cx, cx1, f, d + 1)?;
    let img = chain_map(cx, cx1, f, d)?.matrix.mul(&h.representatives());
    let m = h1.class_of(&img).ok_or(HomologyError::NotChainMap(d))?;
    Ok(AbMap::new(h.group.clone(), h1.group.clone(), m)?)
}

/// The map induced by a coefficient map `f: M -> M'` along the shift of
/// letters `s_i -> s_{i+1}`. `f` must be equivariant; this is checked.
pub fn stabilisation_map_with(src: &GModule, tgt: &GModule, f: &AbMap, d: usize, ring: Ring) -> Result<StabilisationMap, HomologyError> {
    check_equivariance(src, tgt, f)?;
    let cx = TwistedComplex::new(src)?;
    let cx1 = TwistedComplex::new(tgt)?;
    let h = cx.homology(d, ring)?;
    let h1 = cx1.homology(d, ring)?;
    let map = induced(&cx, &h, &cx1, &h1, f, d)?;
    Ok(StabilisationMap { d, source: h, target: h1, map })
}

/// `(s_n, T(iota_n))_*` in degree `d`.
pub fn stabilisation_map(t: &TruncatedFunctor, n: usize, d: usize, ring: Ring) -> Result<StabilisationMap, HomologyError> {
    if n + 1 > t.truncation() {
        return Err(HomologyError::Invalid(format!("T_{} is beyond the truncation {}", n + 1, t.truncation())));
    }
    let caps = Caps::default();
    let g = Arc::new(PermGroup::symmetric(n)?);
    let g1 = Arc::new(PermGroup::symmetric(n + 1)?);
    caps.check(g1.order(), d, ring)?;
    let src = GModule::from_functor(t, g)?;
    let tgt = GModule::from_functor(t, g1)?;
    stabilisation_map_with(&src, &tgt, &t.apply(&iota(n))?, d, ring)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapClass {
    Iso,
    Injective,
    Neither,
}

impl fmt::Display for MapClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapClass::Iso => "iso",
            MapClass::Injective => "injective",
            MapClass::Neither => "neither",
        })
    }
}

#[derive(Clone, Debug)]
pub struct StabilityRecord {
    pub n: usize,
    pub d: usize,
    pub source: Invariants,
    pub target: Invariants,
    pub class: MapClass,
    /// `d <= (n - deg T) / 2`.
    pub in_range: bool,
    /// A left inverse was found.
    pub split: bool,
}

impl StabilityRecord {
    pub fn ok(&self) -> bool {
        self.split && (!self.in_range || self.class == MapClass::Iso)
    }
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub ring: Ring,
    /// Degree used for the predicted range.
    pub degree: i64,
    pub max_n: usize,
    pub max_d: usize,
    pub groups: BTreeMap<(usize, usize), Invariants>,
    /// `(n, H_0 agrees with coinvariants)`.
    pub h0_checks: Vec<(usize, bool)>,
    pub maps: Vec<StabilityRecord>,
}

impl StabilityReport {
    pub fn passed(&self) -> bool {
        self.maps.iter().all(StabilityRecord::ok) && self.h0_checks.iter().all(|x| x.1)
    }

    /// Records violating the predicted range.
    pub fn violations(&self) -> impl Iterator<Item = &StabilityRecord> {
        self.maps.iter().filter(|r| !r.ok())
    }

    /// One line per `(n, d)`.
    pub fn records(&self) -> String {
        let mut s = String::new();
        for (&(n, d), h) in &self.groups {
            let _ = write!(s, "n={n}\td={d}\tH={}", inv_text(h, self.ring));
            if let Some(r) = self.maps.iter().find(|r| r.n == n && r.d == d) {
                let _ = write!(s, "\tmap={}\tin_range={}\tsplit={}", r.class, r.in_range, r.split);
            }
            s.push('\n');
        }
        s
    }

    pub fn text(&self) -> String {
        let mut s = format!("ring {}, degree {}, predicted iso range d <= (n - {})/2\n", self.ring, self.degree, self.degree);
        let _ = write!(s, "{:>3}", "n");
        for d in 0..=self.max_d {
            let _ = write!(s, " | {:<24}", format!("H_{d}"));
        }
        s.push('\n');
        for n in 0..=self.max_n {
            let _ = write!(s, "{n:>3}");
            for d in 0..=self.max_d {
                let h = self.groups.get(&(n, d)).map(|h| inv_text(h, self.ring)).unwrap_or_else(|| "-".into());
                let m = self.maps.iter().find(|r| r.n == n && r.d == d);
                let tag = match m {
                    Some(r) => format!(" {}{}{}", r.class, if r.in_range { "*" } else { "" }, if r.split { "" } else { "!" }),
                    None => String::new(),
                };
                let _ = write!(s, " | {:<24}", format!("{h}{tag}"));
            }
            s.push('\n');
        }
        s.push_str("map tags refer to H_d(n) -> H_d(n+1); * inside predicted range; ! no left inverse\n");
        for (n, ok) in &self.h0_checks {
            if !ok {
                let _ = writeln!(s, "H_0 differs from coinvariants at n={n}");
            }
        }
        let _ = writeln!(s, "{}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }
}

fn inv_text(h: &Invariants, ring: Ring) -> String {
    match ring {
        Ring::Z => h.to_string(),
        _ => format!("{}^{}", if let Ring::Fp(p) = ring { format!("F{p}") } else { "Q".into() }, ring.dimension(h)),
    }
}

/// Homology of `Sigma_n` with coefficients `T_n` for `n <= max_n`, `d <= max_d`,
/// and every stabilisation map between them. `degree` overrides the degree of `T`.
pub fn stability_report(t: &TruncatedFunctor, max_d: usize, ring: Ring, max_n: usize, degree: Option<i64>) -> Result<StabilityReport, HomologyError> {
    if max_n > t.truncation() {
        return Err(HomologyError::Invalid(format!("n = {max_n} is beyond the truncation {}", t.truncation())));
    }
    let caps = Caps::default();
    let top = PermGroup::symmetric(max_n)?;
    caps.check(top.order(), max_d, ring)?;
    drop(top);
    let degree = match degree {
        Some(d) => d,
        None => t.degree()?.value(),
    };
    let per_n = parallel_map((0..=max_n).collect(), |n| -> Result<_, HomologyError> {
        let m = GModule::from_functor(t, Arc::new(PermGroup::symmetric(n)?))?;
        let cx = TwistedComplex::new(&m)?;
        let hs = (0..=max_d).map(|d| cx.homology(d, ring)).collect::<Result<Vec<_>, _>>()?;
        let h0 = ring.reduce_invariants(&hs[0].group.invariants()) == coinvariants_over(&m, ring);
        Ok((cx, hs, h0))
    });
    let per_n = per_n.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut groups = BTreeMap::new();
    let mut h0_checks = Vec::new();
    for (n, (_, hs, h0)) in per_n.iter().enumerate() {
        for (d, h) in hs.iter().enumerate() {
            groups.insert((n, d), ring.reduce_invariants(&h.group.invariants()));
        }
        h0_checks.push((n, *h0));
    }
    let pairs: Vec<(usize, usize)> = (0..max_n).flat_map(|n| (0..=max_d).map(move |d| (n, d))).collect();
    let maps = parallel_map(pairs, |(n, d)| -> Result<StabilityRecord, HomologyError> {
        let (cx, hs, _) = &per_n[n];
        let (cx1, hs1, _) = &per_n[n + 1];
        let f = t.apply(&iota(n))?;
        check_equivariance(cx.module(), cx1.module(), &f)?;
        let map = induced(cx, &hs[d], cx1, &hs1[d], &f, d)?;
        Ok(classify(n, d, &map, ring, degree))
    });
    let maps = maps.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(StabilityReport { ring, degree, max_n, max_d, groups, h0_checks, maps })
}

/// `items.map(f)` on at most `available_parallelism` threads, in order.
fn parallel_map<I: Send, O: Send>(items: Vec<I>, f: impl Fn(I) -> O + Sync) -> Vec<O> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len());
    if workers <= 1 {
        return items.into_iter().map(f).collect();
    }
    let n = items.len();
    let queue = std::sync::Mutex::new(items.into_iter().enumerate());
    let mut out: Vec<Option<O>> = (0..n).map(|_| None).collect();
    let done = std::sync::Mutex::new(&mut out);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let next = queue.lock().unwrap().next();
                let Some((i, x)) = next else { break };
                let y = f(x);
                done.lock().unwrap()[i] = Some(y);
            });
        }
    });
    out.into_iter().map(|o| o.expect("every item is processed")).collect()
}

fn classify(n: usize, d: usize, map: &AbMap, ring: Ring, degree: i64) -> StabilityRecord {
    let class = match (map.is_injective(), map.is_surjective()) {
        (true, true) => MapClass::Iso,
        (true, false) => MapClass::Injective,
        _ => MapClass::Neither,
    };
    StabilityRecord {
        n,
        d,
        source: ring.reduce_invariants(&map.source.invariants()),
        target: ring.reduce_invariants(&map.target.invariants()),
        class,
        in_range: 2 * d as i64 <= n as i64 - degree,
        split: left_inverse(map).is_some(),
    }
}

/// One comparison of `H_d(Sigma_n; Ind T_n^k)` with `H_d(Sigma_{n-k} x Sigma_k; T_n^k)`.
#[derive(Clone, Debug)]
pub struct ShapiroCell {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    /// Over `Sigma_n` on the sum of the pieces `T_n[S]`, `|S| = k`; `None` beyond caps.
    pub induced: Option<Invariants>,
    /// Over the Young subgroup on the top piece.
    pub reduced: Invariants,
}

impl ShapiroCell {
    pub fn agree(&self) -> Option<bool> {
        self.induced.as_ref().map(|i| i == &self.reduced)
    }
}

/// Computes `H_d(Sigma_{n-k} x Sigma_k; T_n^k)` for `d <= max_d`, where
/// `T_n^k` is the piece of `T_n` supported on the last `k` points, and compares
/// it with `H_d(Sigma_n; I)` for `I` the sum of the pieces on all `k`-subsets
/// (which is the induced module) whenever that fits in the caps.
pub fn shapiro_reduce(t: &TruncatedFunctor, n: usize, k: usize, max_d: usize, ring: Ring) -> Result<Vec<ShapiroCell>, HomologyError> {
    if k > n {
        return Err(HomologyError::Invalid(format!("k = {k} > n = {n}")));
    }
    let caps = Caps::default();
    let young = Arc::new(PermGroup::young(&[n - k, k])?);
    caps.check(young.order(), max_d, ring)?;
    let full = Arc::new(PermGroup::symmetric(n)?);
    let tn = GModule::from_functor(t, full.clone())?;
    let top = t.top_piece(n, k)?;
    let reduced_module = tn.restrict(young)?.submodule(&top.inclusion)?;
    let reduced = super::bar_homology_with(&reduced_module, max_d, ring, &caps)?;
    let induced = if caps.check(full.order(), max_d, ring).is_ok() {
        let mut incl = Vec::new();
        for mask in 0u32..1 << n {
            if mask.count_ones() as usize == k {
                let s: Vec<Vec<usize>> = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).map(|i| vec![i]).collect();
                incl.push(t.cross_effect(n, &s)?.inclusion);
            }
        }
        let parts: Vec<&FgAbGroup> = incl.iter().map(|c| &c.source).collect();
        let mats: Vec<&IntMatrix> = incl.iter().map(|c| &c.matrix).collect();
        let sum = AbMap { source: FgAbGroup::direct_sum(&parts), target: tn.carrier().clone(), matrix: IntMatrix::hstack(tn.carrier().ngens(), &mats) };
        let (_, inclusion) = image(&sum);
        let module = tn.submodule(&inclusion)?;
        Some(super::bar_homology_with(&module, max_d, ring, &caps)?)
    } else {
        None
    };
    Ok((0..=max_d)
        .map(|d| ShapiroCell {
            n,
            k,
            d,
            induced: induced.as_ref().map(|h| ring.reduce_invariants(&h[d].group.invariants())),
            reduced: ring.reduce_invariants(&reduced[d].group.invariants()),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{constant_functor, partition_functor};

    #[test]
    fn trivial_coefficients_stabilise() {
        let c = constant_functor(&FgAbGroup::free(1), Ring::Z, 4).unwrap();
        let m = stabilisation_map(&c, 2, 1, Ring::Z).unwrap();
        assert!(m.map.is_iso());
        assert_eq!(m.source.group.invariants().torsion, vec![2.into()]);
    }

    #[test]
    fn corrupted_coefficient_map_is_rejected() {
        let t = partition_functor(&"1".parse().unwrap(), Ring::Z, 4).unwrap();
        let src = GModule::from_functor(&t, Arc::new(PermGroup::symmetric(3).unwrap())).unwrap();
        let tgt = GModule::from_functor(&t, Arc::new(PermGroup::symmetric(4).unwrap())).unwrap();
        let good = t.apply(&iota(3)).unwrap();
        assert!(stabilisation_map_with(&src, &tgt, &good, 1, Ring::Z).is_ok());
        let mut bad = good.clone();
        bad.matrix.set_i64(0, 0, 1);
        assert!(matches!(stabilisation_map_with(&src, &tgt, &bad, 1, Ring::Z), Err(HomologyError::NotEquivariant(_))));
    }

    #[test]
    fn shapiro_for_points() {
        let t = partition_functor(&"1".parse().unwrap(), Ring::Z, 4).unwrap();
        for c in shapiro_reduce(&t, 4, 1, 2, Ring::Z).unwrap() {
            assert_eq!(c.agree(), Some(true), "{c:?}");
        }
    }

    #[test]
    fn report_for_points() {
        let t = partition_functor(&"1".parse().unwrap(), Ring::Z, 5).unwrap();
        let r = stability_report(&t, 1, Ring::Z, 5, None).unwrap();
        assert!(r.passed(), "{}", r.text());
        assert_eq!(r.groups[&(4, 1)].torsion, vec![2.into()]);
    }
}
