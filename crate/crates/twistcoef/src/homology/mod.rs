//! Group homology of parabolic subgroups of symmetric groups with twisted
//! coefficients, stabilisation maps between them, and splittings.

pub mod bar;
pub mod dold;
pub mod perm;
pub mod resolution;
pub mod stability;

pub use bar::normalized_bar_homology;
pub use dold::{degree_zero_dold_data, dold_splitting, DoldData};
pub use perm::{GModule, PermGroup};
pub use resolution::{Cell, Exactness, Resolution};
pub use stability::{
    check_equivariance, shapiro_reduce, stabilisation_map, stabilisation_map_with, stability_report, MapClass, ShapiroCell, StabilisationMap,
    StabilityRecord, StabilityReport,
};

use crate::functor::FunctorError;
use crate::linalg::{homology_with_section, AbMap, FgAbGroup, HomologyData, IntMatrix, LinalgError, Ring};
use crate::sigma::SigmaError;
use num_bigint::BigInt;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum HomologyError {
    #[error("bad group: {0}")]
    BadGroup(String),
    #[error("bad module: {0}")]
    BadModule(String),
    #[error("{what} {size} exceeds the cap {cap}")]
    Cap { what: String, size: usize, cap: usize },
    #[error("resolution of {group} fails in degree {degree}: {detail}")]
    NotExact { group: String, degree: usize, detail: String },
    #[error("coefficient map is not equivariant: {0}")]
    NotEquivariant(String),
    #[error("not a chain map in degree {0}")]
    NotChainMap(usize),
    #[error("hypothesis fails for k={k}, n={n}: witness {witness:?}")]
    DoldHypothesis { k: usize, n: usize, witness: Vec<BigInt> },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    Sigma(#[from] SigmaError),
}

/// Size limits for homology computations.
#[derive(Clone, Copy, Debug)]
pub struct Caps {
    pub field_order: usize,
    pub integral_order: usize,
    pub max_degree: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { field_order: 720, integral_order: 720, max_degree: 2 }
    }
}

impl Caps {
    pub fn check(&self, order: usize, degree: usize, ring: Ring) -> Result<(), HomologyError> {
        let cap = if ring.is_field() { self.field_order } else { self.integral_order };
        if order > cap {
            return Err(HomologyError::Cap { what: format!("group order over {ring}"), size: order, cap });
        }
        // the resolution stops at degree 3, so H_2 is the last computable degree
        let dcap = self.max_degree.min(2);
        if degree > dcap {
            return Err(HomologyError::Cap { what: "homological degree".into(), size: degree, cap: dcap });
        }
        Ok(())
    }
}

fn exactness_for(ring: Ring) -> Exactness {
    match ring {
        Ring::Z => Exactness::Integral,
        Ring::Fp(p) => Exactness::ModP(p),
        // exact mod some prime implies exact over Q
        Ring::Q => Exactness::ModP(2),
    }
}

/// `F (x)_G M` for the resolution `F` of the module's group.
pub struct TwistedComplex {
    res: Arc<Resolution>,
    module: GModule,
}

impl TwistedComplex {
    pub fn new(module: &GModule) -> Result<Self, HomologyError> {
        Ok(TwistedComplex { res: Resolution::of(module.group())?, module: module.clone() })
    }

    pub fn resolution(&self) -> &Arc<Resolution> {
        &self.res
    }

    pub fn module(&self) -> &GModule {
        &self.module
    }

    /// `C_k = M^{r_k}`; zero outside `0..=3`.
    pub fn chain_group(&self, k: isize) -> FgAbGroup {
        if !(0..=3).contains(&k) {
            return FgAbGroup::zero();
        }
        let r = self.res.ranks()[k as usize];
        let c = self.module.carrier();
        FgAbGroup::direct_sum(&vec![c; r])
    }

    /// `d_k: C_k -> C_{k-1}`. A boundary `sum g e_i` of `e_j` gives the block
    /// `sum g^{-1}` acting on `M` (tensoring over G with a left module).
    pub fn boundary(&self, k: usize) -> AbMap {
        let src = self.chain_group(k as isize);
        let tgt = self.chain_group(k as isize - 1);
        let m = self.module.carrier().ngens();
        let mut mat = IntMatrix::zero(tgt.ngens(), src.ngens());
        if k >= 1 && k <= 3 {
            let g = self.res.group();
            for j in 0..self.res.ranks()[k] {
                for (i, x) in self.res.boundary(k, j) {
                    let mut block = IntMatrix::zero(m, m);
                    for &(a, c) in x {
                        block = block.add(&self.module.action(g.inv(a)).scale(&c.into()));
                    }
                    mat.paste(i * m, j * m, &block);
                }
            }
        }
        AbMap { source: src, target: tgt, matrix: mat }
    }

    /// `H_d` with representatives, over `ring`.
    pub fn homology(&self, d: usize, ring: Ring) -> Result<HomologyData, HomologyError> {
        self.res.verify(exactness_for(ring))?;
        Ok(homology_with_section(&self.boundary(d + 1), &self.boundary(d), ring)?)
    }
}

/// `H_d(G; M)` for `d = 0..=max_d`, with caps checked first.
pub fn bar_homology(module: &GModule, max_d: usize, ring: Ring) -> Result<Vec<HomologyData>, HomologyError> {
    bar_homology_with(module, max_d, ring, &Caps::default())
}

pub fn bar_homology_with(module: &GModule, max_d: usize, ring: Ring, caps: &Caps) -> Result<Vec<HomologyData>, HomologyError> {
    caps.check(module.group().order(), max_d, ring)?;
    let cx = TwistedComplex::new(module)?;
    (0..=max_d).map(|d| cx.homology(d, ring)).collect()
}

/// Coinvariants over `ring`, for comparison with `H_0`.
pub fn coinvariants_over(module: &GModule, ring: Ring) -> crate::linalg::Invariants {
    let (c, _) = module.coinvariants();
    ring.reduce_invariants(&ring.base_change(&c).invariants())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::partition_functor;
    use crate::linalg::Invariants;

    fn inv(torsion: &[i64], free_rank: usize) -> Invariants {
        Invariants { torsion: torsion.iter().map(|&x| x.into()).collect(), free_rank }
    }

    #[test]
    fn trivial_coefficients() {
        let z = FgAbGroup::free(1);
        let s3 = Arc::new(PermGroup::symmetric(3).unwrap());
        let h = bar_homology(&GModule::trivial(s3, z.clone()), 2, Ring::Z).unwrap();
        assert_eq!(h[0].group.invariants(), inv(&[], 1));
        assert_eq!(h[1].group.invariants(), inv(&[2], 0));
        assert_eq!(h[2].group.invariants(), inv(&[], 0));
        let s4 = Arc::new(PermGroup::symmetric(4).unwrap());
        let h = bar_homology(&GModule::trivial(s4, z), 2, Ring::Z).unwrap();
        assert_eq!(h[1].group.invariants(), inv(&[2], 0));
        assert_eq!(h[2].group.invariants(), inv(&[2], 0));
    }

    #[test]
    fn permutation_module_h1() {
        for n in 3..=5 {
            let t = partition_functor(&"1".parse().unwrap(), Ring::Z, n).unwrap();
            let g = Arc::new(PermGroup::symmetric(n).unwrap());
            let m = GModule::from_functor(&t, g).unwrap();
            let h = bar_homology(&m, 1, Ring::Z).unwrap();
            assert_eq!(h[1].group.invariants(), inv(&[2], 0), "n = {n}");
        }
    }

    #[test]
    fn h0_is_coinvariants() {
        let t = partition_functor(&"1,1".parse().unwrap(), Ring::Z, 4).unwrap();
        for ring in [Ring::Z, Ring::Q, Ring::Fp(2)] {
            let m = GModule::from_functor(&t, Arc::new(PermGroup::symmetric(4).unwrap())).unwrap();
            let h = bar_homology(&m, 0, ring).unwrap();
            assert_eq!(ring.reduce_invariants(&h[0].group.invariants()), coinvariants_over(&m, ring));
        }
    }

    #[test]
    fn caps() {
        let s7 = Arc::new(PermGroup::symmetric(7).unwrap());
        let m = GModule::trivial(s7, FgAbGroup::free(1));
        assert!(matches!(bar_homology(&m, 1, Ring::Z), Err(HomologyError::Cap { .. })));
        assert!(matches!(bar_homology(&m, 1, Ring::Q), Err(HomologyError::Cap { .. })));
        let s3 = Arc::new(PermGroup::symmetric(3).unwrap());
        assert!(matches!(bar_homology(&GModule::trivial(s3, FgAbGroup::free(1)), 3, Ring::Fp(2)), Err(HomologyError::Cap { .. })));
    }
}
