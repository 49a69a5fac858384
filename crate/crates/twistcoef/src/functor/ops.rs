//! Delta (cokernel of stabilisation), degree, and objectwise sums and tensor products.

use super::{FunctorError, Generators, TruncatedFunctor};
use crate::linalg::{cokernel_with_section, AbMap, FgAbGroup, IntMatrix, Ring};
use crate::sigma::{stabilize_morphism, Atom};
use std::fmt;

/// Degree or height computed from truncated data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Truncated {
    /// Everything vanishes within the truncation; the value is -1.
    Zero,
    /// Determined from the available objects. `witness` is the pair (n, k)
    /// of a nonzero group realising the value.
    Exact { value: usize, witness: (usize, usize) },
    /// The truncation ran out before the value was pinned down.
    AtLeast { value: usize, witness: (usize, usize) },
}

impl Truncated {
    /// Exact value (or lower bound), with -1 for zero.
    pub fn value(&self) -> i64 {
        match self {
            Truncated::Zero => -1,
            Truncated::Exact { value, .. } | Truncated::AtLeast { value, .. } => *value as i64,
        }
    }

    pub fn exact(&self) -> Option<i64> {
        match self {
            Truncated::AtLeast { .. } => None,
            _ => Some(self.value()),
        }
    }
}

impl fmt::Display for Truncated {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truncated::Zero => write!(f, "-1 (zero within truncation)"),
            Truncated::Exact { value, witness: (n, k) } => write!(f, "{value} (witness n={n}, k={k})"),
            Truncated::AtLeast { value, witness: (n, k) } => {
                write!(f, ">= {value} (indeterminate at truncation; witness n={n}, k={k})")
            }
        }
    }
}

/// Cokernel over the ring with quotient matrix `to` and section `from`.
/// Over Q the torsion of the quotient is discarded.
fn ring_cokernel(ring: Ring, f: &AbMap) -> (FgAbGroup, IntMatrix, IntMatrix) {
    let (g, proj, from) = cokernel_with_section(f);
    if ring != Ring::Q {
        return (g, proj.matrix, from);
    }
    let inv = g.invariants();
    let nt = inv.torsion.len();
    let keep: Vec<usize> = (nt..nt + inv.free_rank).collect();
    (FgAbGroup::free(inv.free_rank), proj.matrix.select_rows(&keep), from.select_cols(&keep))
}

impl TruncatedFunctor {
    /// `(Delta T)_n = coker(T_n -> T_{n+1})` for n < N, with morphisms induced
    /// by the stabilised morphism. The result is validated.
    pub fn delta(&self) -> Result<TruncatedFunctor, FunctorError> {
        let n_top = self.truncation();
        if n_top == 0 {
            return Err(FunctorError::DeltaAtZero);
        }
        let mut groups = Vec::new();
        let mut to = Vec::new();
        let mut from = Vec::new();
        for n in 0..n_top {
            let (g, t, s) = ring_cokernel(self.ring(), &self.atom_map(&Atom::Iota(n))?.clone());
            groups.push(g);
            to.push(t);
            from.push(s);
        }
        let induced = |a: Atom| -> Result<IntMatrix, FunctorError> {
            let sa = stabilize_morphism(&a.morphism());
            let m = self.matrix(&sa)?;
            Ok(to[a.target()].mul(&m).mul(&from[a.source()]))
        };
        let n1 = n_top - 1;
        let gens = Generators {
            iota: (0..n1).map(|n| induced(Atom::Iota(n))).collect::<Result<_, _>>()?,
            pi: (1..=n1).map(|n| induced(Atom::Pi(n))).collect::<Result<_, _>>()?,
            sigma: (0..=n1)
                .map(|n| (1..n).map(|i| induced(Atom::Transposition(i, n))).collect::<Result<Vec<_>, _>>())
                .collect::<Result<_, _>>()?,
        };
        let mut d = TruncatedFunctor::from_generators(self.ring(), groups, gens)?;
        if let Some(fam) = self.family() {
            d = d.with_family(format!("delta({fam})"));
        }
        Ok(d)
    }

    /// T, Delta T, Delta^2 T, ... while the truncation allows.
    pub fn delta_chain(&self) -> Result<Vec<TruncatedFunctor>, FunctorError> {
        let mut out = vec![self.clone()];
        while out.last().unwrap().truncation() > 0 {
            let next = out.last().unwrap().delta()?;
            let stop = next.is_zero();
            out.push(next);
            if stop {
                break;
            }
        }
        Ok(out)
    }

    /// Smallest d with Delta^(d+1) T zero, read off the truncation.
    pub fn degree(&self) -> Result<Truncated, FunctorError> {
        if self.is_zero() {
            return Ok(Truncated::Zero);
        }
        let mut cur = self.clone();
        let mut d = 0;
        loop {
            let witness = (0..=cur.truncation()).find(|&n| !cur.ring().is_zero_group(cur.group(n))).unwrap_or(0);
            if cur.truncation() == 0 {
                return Ok(Truncated::AtLeast { value: d, witness: (witness, d) });
            }
            let next = cur.delta()?;
            if next.is_zero() {
                return Ok(Truncated::Exact { value: d, witness: (witness, d) });
            }
            cur = next;
            d += 1;
        }
    }

    fn same_shape(&self, o: &TruncatedFunctor) -> Result<(), FunctorError> {
        if self.truncation() != o.truncation() {
            return Err(FunctorError::TruncationMismatch(self.truncation(), o.truncation()));
        }
        if self.ring() != o.ring() {
            return Err(FunctorError::RingMismatch(self.ring(), o.ring()));
        }
        Ok(())
    }

    fn combine(
        &self,
        o: &TruncatedFunctor,
        group: impl Fn(&FgAbGroup, &FgAbGroup) -> FgAbGroup,
        map: impl Fn(&IntMatrix, &IntMatrix) -> IntMatrix,
    ) -> Result<TruncatedFunctor, FunctorError> {
        self.same_shape(o)?;
        let groups = self.groups().iter().zip(o.groups()).map(|(a, b)| group(a, b)).collect();
        let (g1, g2) = (self.generators(), o.generators());
        let zip = |a: &[IntMatrix], b: &[IntMatrix]| a.iter().zip(b).map(|(x, y)| map(x, y)).collect::<Vec<_>>();
        let gens = Generators {
            iota: zip(&g1.iota, &g2.iota),
            pi: zip(&g1.pi, &g2.pi),
            sigma: g1.sigma.iter().zip(&g2.sigma).map(|(a, b)| zip(a, b)).collect(),
        };
        TruncatedFunctor::from_generators(self.ring(), groups, gens)
    }

    /// Objectwise direct sum.
    pub fn direct_sum(&self, o: &TruncatedFunctor) -> Result<TruncatedFunctor, FunctorError> {
        self.combine(o, |a, b| FgAbGroup::direct_sum(&[a, b]), |x, y| IntMatrix::block_diag(&[x, y]))
    }

    /// Objectwise tensor product over Z (presentations tensored, torsion included).
    pub fn tensor(&self, o: &TruncatedFunctor) -> Result<TruncatedFunctor, FunctorError> {
        self.combine(o, |a, b| a.tensor(b), |x, y| x.kron(y))
    }

    /// `T (x) A` for a fixed abelian group A.
    pub fn tensor_with_group(&self, a: &FgAbGroup) -> Result<TruncatedFunctor, FunctorError> {
        let id = IntMatrix::identity(a.ngens());
        let groups = self.groups().iter().map(|g| g.tensor(a)).collect();
        let g = self.generators();
        let k = |v: &[IntMatrix]| v.iter().map(|x| x.kron(&id)).collect::<Vec<_>>();
        let gens = Generators { iota: k(&g.iota), pi: k(&g.pi), sigma: g.sigma.iter().map(|r| k(r)).collect() };
        TruncatedFunctor::from_generators(self.ring(), groups, gens)
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::points;
    use super::*;
    use crate::linalg::Invariants;

    fn constant(a: FgAbGroup, trunc: usize) -> TruncatedFunctor {
        let groups = vec![a.clone(); trunc + 1];
        TruncatedFunctor::from_action(Ring::Z, groups, |_| IntMatrix::identity(a.ngens())).unwrap()
    }

    #[test]
    fn delta_of_constant_is_zero() {
        let t = constant(FgAbGroup::free(1), 4);
        assert!(t.delta().unwrap().is_zero());
        assert_eq!(t.degree().unwrap(), Truncated::Exact { value: 0, witness: (0, 0) });
    }

    #[test]
    fn delta_of_points_is_constant() {
        let t = points(Ring::Z, 4);
        let d = t.delta().unwrap();
        assert_eq!(d.truncation(), 3);
        for n in 0..=3 {
            assert_eq!(d.invariants(n), Invariants { torsion: vec![], free_rank: 1 });
        }
        // every morphism acts by +-1 on Z, and the functor is constant up to that
        for n in 1..=3 {
            assert!(d.atom_map(&Atom::Pi(n)).unwrap().is_iso());
            assert!(d.atom_map(&Atom::Iota(n - 1)).unwrap().is_iso());
        }
        assert!(d.delta().unwrap().is_zero());
        assert_eq!(t.degree().unwrap().exact(), Some(1));
    }

    #[test]
    fn zero_functor_and_delta_at_zero() {
        let z = constant(FgAbGroup::zero(), 3);
        assert_eq!(z.degree().unwrap(), Truncated::Zero);
        let single = constant(FgAbGroup::free(1), 0);
        assert!(matches!(single.delta(), Err(FunctorError::DeltaAtZero)));
        assert_eq!(single.degree().unwrap(), Truncated::AtLeast { value: 0, witness: (0, 0) });
    }

    #[test]
    fn degree_of_sum_and_products() {
        let p = points(Ring::Z, 4);
        let c = constant(FgAbGroup::free(1), 4);
        assert_eq!(p.direct_sum(&c).unwrap().degree().unwrap().exact(), Some(1));
        let t2 = p.tensor_with_group(&FgAbGroup::cyclic(2)).unwrap();
        assert!(t2.degree().unwrap().exact().unwrap() <= 1);
        let pp = p.tensor(&p).unwrap();
        assert!(pp.degree().unwrap().exact().unwrap() <= 2);
        let other = points(Ring::Z, 3);
        assert!(matches!(p.direct_sum(&other), Err(FunctorError::TruncationMismatch(4, 3))));
    }
}
