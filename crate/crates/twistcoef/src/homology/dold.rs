//! Splittings of a chain `A_s -> A_{s+1} -> ...` from maps `tau_{k,n}: A_n -> A_k`.
//!
//! If `im(tau_{k,n} - tau_{k,n+1} phi_n)` lies in `im(phi_{k-1})` (with
//! `A_{s-1} = 0`), the maps `Q_n = (tau_{k,n} mod im phi_{k-1})_{k <= n}` are
//! isomorphisms onto `sum_k coker(phi_{k-1})` and
//! `rho_n = Q_n^{-1} pr Q_{n+1}` satisfies `rho_n phi_n = id`.

use super::perm::{GModule, PermGroup};
use super::stability::induced;
use super::{HomologyError, TwistedComplex};
use crate::functor::TruncatedFunctor;
use crate::linalg::{cokernel, image_contained, left_inverse, AbMap, FgAbGroup, IntMatrix, Ring};
use crate::sigma::{iota, order_preserving_projection};
use num_bigint::BigInt;
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct DoldData {
    /// Index of the first group.
    pub start: usize,
    /// `groups[i] = A_{start + i}`.
    pub groups: Vec<FgAbGroup>,
    /// `phi[i]: A_{start+i} -> A_{start+i+1}`.
    pub phi: Vec<AbMap>,
    /// `tau[(k, n)]: A_n -> A_k` for `start <= k <= n`.
    pub tau: BTreeMap<(usize, usize), AbMap>,
}

impl DoldData {
    pub fn end(&self) -> usize {
        self.start + self.groups.len() - 1
    }

    fn group(&self, n: usize) -> &FgAbGroup {
        &self.groups[n - self.start]
    }

    fn phi(&self, n: usize) -> &AbMap {
        &self.phi[n - self.start]
    }

    fn tau(&self, k: usize, n: usize) -> Result<&AbMap, HomologyError> {
        self.tau.get(&(k, n)).ok_or_else(|| HomologyError::Invalid(format!("tau_{{{k},{n}}} missing")))
    }

    fn check_shapes(&self) -> Result<(), HomologyError> {
        if self.groups.is_empty() || self.phi.len() + 1 != self.groups.len() {
            return Err(HomologyError::Invalid(format!("{} groups but {} maps", self.groups.len(), self.phi.len())));
        }
        for n in self.start..self.end() {
            let p = self.phi(n);
            if &p.source != self.group(n) || &p.target != self.group(n + 1) {
                return Err(HomologyError::Invalid(format!("phi_{n} has the wrong ends")));
            }
        }
        for n in self.start..=self.end() {
            for k in self.start..=n {
                let t = self.tau(k, n)?;
                if &t.source != self.group(n) || &t.target != self.group(k) {
                    return Err(HomologyError::Invalid(format!("tau_{{{k},{n}}} has the wrong ends")));
                }
            }
            if !self.tau(n, n)?.equals(&AbMap::identity(self.group(n))) {
                return Err(HomologyError::Invalid(format!("tau_{{{n},{n}}} is not the identity")));
            }
        }
        Ok(())
    }

    /// Checks `im(tau_{k,n} - tau_{k,n+1} phi_n) <= im(phi_{k-1})` on every
    /// generator of `A_n`; the error carries the first failing generator.
    pub fn check_hypothesis(&self) -> Result<(), HomologyError> {
        self.check_shapes()?;
        for n in self.start..self.end() {
            for k in self.start..=n {
                let diff = self.tau(k, n)?.sub(&self.tau(k, n + 1)?.compose(self.phi(n))?);
                for j in 0..diff.source.ngens() {
                    let col = AbMap { source: FgAbGroup::free(1), target: diff.target.clone(), matrix: diff.matrix.select_cols(&[j]) };
                    let inside = if k == self.start { col.target.is_zero_element(&col.matrix.column(0)) } else { image_contained(&col, self.phi(k - 1)) };
                    if !inside {
                        let mut witness = vec![BigInt::from(0); diff.source.ngens()];
                        witness[j] = 1.into();
                        return Err(HomologyError::DoldHypothesis { k, n, witness });
                    }
                }
            }
        }
        Ok(())
    }

    /// `Q_n: A_n -> sum_{k <= n} coker(phi_{k-1})` with the cokernel projections.
    fn q(&self, n: usize, quotients: &[(FgAbGroup, AbMap)]) -> Result<AbMap, HomologyError> {
        let parts: Vec<&FgAbGroup> = (self.start..=n).map(|k| &quotients[k - self.start].0).collect();
        let target = FgAbGroup::direct_sum(&parts);
        let blocks: Vec<IntMatrix> = (self.start..=n)
            .map(|k| Ok(quotients[k - self.start].1.compose(self.tau(k, n)?)?.matrix))
            .collect::<Result<_, HomologyError>>()?;
        let refs: Vec<&IntMatrix> = blocks.iter().collect();
        Ok(AbMap { source: self.group(n).clone(), target, matrix: IntMatrix::vstack(self.group(n).ngens(), &refs) })
    }
}

/// Left inverses `rho_n` of `phi_n` for `n = start..end`, each verified.
pub fn dold_splitting(data: &DoldData) -> Result<Vec<AbMap>, HomologyError> {
    data.check_hypothesis()?;
    let quotients: Vec<(FgAbGroup, AbMap)> = (data.start..=data.end())
        .map(|k| if k == data.start { (data.group(k).clone(), AbMap::identity(data.group(k))) } else { cokernel(data.phi(k - 1)) })
        .collect();
    let mut out = Vec::new();
    for n in data.start..data.end() {
        let qn = data.q(n, &quotients)?;
        if !qn.is_iso() {
            return Err(HomologyError::Invalid(format!("Q_{n} is not an isomorphism")));
        }
        let qinv = left_inverse(&qn).ok_or_else(|| HomologyError::Invalid(format!("Q_{n} has no inverse")))?;
        let qn1 = data.q(n + 1, &quotients)?;
        let rows = qn.target.ngens();
        let pr = AbMap { source: qn1.target.clone(), target: qn.target.clone(), matrix: IntMatrix::identity(qn1.target.ngens()).select_rows(&(0..rows).collect::<Vec<_>>()) };
        let rho = qinv.compose(&pr.compose(&qn1)?)?;
        if !rho.compose(data.phi(n))?.equals(&AbMap::identity(data.group(n))) {
            return Err(HomologyError::Invalid(format!("rho_{n} phi_{n} != id")));
        }
        out.push(rho);
    }
    Ok(out)
}

/// Degree-zero data for a functor: `A_n = H_0(Sigma_n; T_n)`, `phi_n` the
/// stabilisation map, and `tau_{k,n}[x] = sum_{|S| = k} [T(pi_S) x]` with
/// `pi_S: n -> k` the order-preserving partial bijection defined on `S`.
pub fn degree_zero_dold_data(t: &TruncatedFunctor, ring: Ring, max_n: usize) -> Result<DoldData, HomologyError> {
    if max_n > t.truncation() {
        return Err(HomologyError::Invalid(format!("n = {max_n} is beyond the truncation {}", t.truncation())));
    }
    let mut cxs = Vec::new();
    let mut hs = Vec::new();
    for n in 0..=max_n {
        let cx = TwistedComplex::new(&GModule::from_functor(t, Arc::new(PermGroup::symmetric(n)?))?)?;
        hs.push(cx.homology(0, ring)?);
        cxs.push(cx);
    }
    let mut phi = Vec::new();
    for n in 0..max_n {
        phi.push(induced(&cxs[n], &hs[n], &cxs[n + 1], &hs[n + 1], &t.apply(&iota(n))?, 0)?);
    }
    let mut tau = BTreeMap::new();
    for n in 0..=max_n {
        let reps = hs[n].representatives();
        for k in 0..=n {
            let mut sum = IntMatrix::zero(t.group(k).ngens(), reps.cols());
            for mask in 0u32..1 << n {
                if mask.count_ones() as usize == k {
                    let s: Vec<usize> = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
                    sum = sum.add(&t.apply(&order_preserving_projection(n, &s)?)?.matrix.mul(&reps));
                }
            }
            let m = hs[k].class_of(&sum).ok_or_else(|| HomologyError::Invalid(format!("tau_{{{k},{n}}} not defined on classes")))?;
            tau.insert((k, n), AbMap::new(hs[n].group.clone(), hs[k].group.clone(), m)?);
        }
    }
    Ok(DoldData { start: 0, groups: hs.into_iter().map(|h| h.group).collect(), phi, tau })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::partition_functor;

    fn z() -> FgAbGroup {
        FgAbGroup::free(1)
    }

    fn scalar(k: i64) -> AbMap {
        AbMap { source: z(), target: z(), matrix: IntMatrix::from_rows(&[vec![k]]) }
    }

    #[test]
    fn identity_chain() {
        let tau = BTreeMap::from([((0, 0), scalar(1)), ((0, 1), scalar(1)), ((1, 1), scalar(1))]);
        let data = DoldData { start: 0, groups: vec![z(), z()], phi: vec![scalar(1)], tau };
        let rho = dold_splitting(&data).unwrap();
        assert!(rho[0].equals(&scalar(1)));
    }

    #[test]
    fn doubling_is_rejected_with_witness() {
        let tau = BTreeMap::from([((0, 0), scalar(1)), ((0, 1), scalar(1)), ((1, 1), scalar(1))]);
        let data = DoldData { start: 0, groups: vec![z(), z()], phi: vec![scalar(2)], tau };
        match dold_splitting(&data) {
            Err(HomologyError::DoldHypothesis { witness, .. }) => assert_eq!(witness, vec![BigInt::from(1)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn points_in_degree_zero() {
        let t = partition_functor(&"1".parse().unwrap(), Ring::Z, 5).unwrap();
        let data = degree_zero_dold_data(&t, Ring::Z, 5).unwrap();
        let rho = dold_splitting(&data).unwrap();
        assert_eq!(rho.len(), 5);
    }
}
