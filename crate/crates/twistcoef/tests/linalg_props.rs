use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use std::collections::HashSet;
use twistcoef::linalg::*;

fn small_matrix(max_r: usize, max_c: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max_r, 1..=max_c).prop_flat_map(|(r, c)| {
        proptest::collection::vec(-4i64..=4, r * c).prop_map(move |v| IntMatrix::from_fn(r, c, |i, j| v[i * c + j]))
    })
}

fn diag(r: usize, c: usize, d: &[BigInt]) -> IntMatrix {
    let mut m = IntMatrix::zero(r, c);
    for (i, x) in d.iter().enumerate() {
        m.set(i, i, x.clone());
    }
    m
}

/// Elements of `span(gens) / d Z^4`, by breadth-first closure.
fn residues(gens: &[[i64; 4]], d: i64) -> HashSet<[i64; 4]> {
    let mut seen = HashSet::new();
    let mut stack = vec![[0i64; 4]];
    seen.insert([0; 4]);
    while let Some(x) = stack.pop() {
        for g in gens {
            let mut y = [0; 4];
            for k in 0..4 {
                y[k] = (x[k] + g[k]).rem_euclid(d);
            }
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen
}

fn det4(g: &[[i64; 4]]) -> i64 {
    let m = IntMatrix::from_fn(4, 4, |i, j| g[j][i]);
    let f = invariant_factors(&m);
    if f.len() < 4 {
        return 0;
    }
    f.iter().fold(BigInt::from(1), |a, b| a * b).to_i64().unwrap()
}

fn lattice_map(g: &[[i64; 4]]) -> AbMap {
    let m = IntMatrix::from_fn(4, g.len(), |i, j| g[j][i]);
    let (_, inc) = image(&AbMap::new(FgAbGroup::free(g.len()), FgAbGroup::free(4), m).unwrap());
    inc
}

fn full_rank_lattice() -> impl Strategy<Value = Vec<[i64; 4]>> {
    proptest::collection::vec(proptest::array::uniform4(-2i64..=2), 4..=5)
        .prop_filter("full rank, small index", |g| {
            let d = det4(&g[..4]);
            d != 0 && d.abs() <= 6
        })
}

fn index_of(inc: &AbMap) -> BigInt {
    let f = invariant_factors(&inc.matrix);
    assert_eq!(f.len(), 4);
    f.iter().fold(BigInt::from(1), |a, b| a * b)
}

fn in_lattice(inc: &AbMap, x: &[i64; 4]) -> bool {
    let v: Vec<BigInt> = x.iter().map(|&a| BigInt::from(a)).collect();
    solve(&inc.matrix, &IntMatrix::column_vector(&v)).is_some()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_reconstructs(a in small_matrix(6, 6)) {
        let s = smith_normal_form(&a);
        let (r, c) = a.shape();
        let d = diag(r, c, &s.d);
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), d.clone());
        let uinv = twistcoef::linalg::snf::unimodular_inverse(&s.u);
        let vinv = twistcoef::linalg::snf::unimodular_inverse(&s.v);
        prop_assert_eq!(uinv.mul(&d).mul(&vinv), a);
        for w in s.d.windows(2) {
            if !w[1].is_zero() {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
        prop_assert!(s.d.iter().all(|x| !x.is_negative()));
    }

    #[test]
    fn rank_nullity(a in small_matrix(5, 6)) {
        let f = AbMap::new(FgAbGroup::free(a.cols()), FgAbGroup::free(a.rows()), a.clone()).unwrap();
        let k = kernel(&f).0.rank();
        let i = image(&f).0.rank();
        prop_assert_eq!(k + i, a.cols());
    }

    #[test]
    fn kernel_and_cokernel_of_trivial_maps(n in 0usize..5) {
        let g = FgAbGroup::free(n);
        prop_assert!(cokernel(&AbMap::identity(&g)).0.is_zero());
        prop_assert_eq!(kernel(&AbMap::zero(&g, &FgAbGroup::free(2))).0.rank(), n);
    }

    #[test]
    fn intersection_matches_bruteforce(g1 in full_rank_lattice(), g2 in full_rank_lattice()) {
        let (a, b) = (lattice_map(&g1), lattice_map(&g2));
        let d1 = det4(&g1[..4]).abs();
        let d2 = det4(&g2[..4]).abs();
        let d = num_integer::lcm(d1, d2);
        let (_, both) = intersect_subgroups(&[a.clone(), b.clone()]).unwrap();
        // computed generators lie in both lattices
        for j in 0..both.matrix.cols() {
            let x: Vec<i64> = both.matrix.column(j).iter().map(|v| v.to_i64().unwrap()).collect();
            let x = [x[0], x[1], x[2], x[3]];
            prop_assert!(in_lattice(&a, &x) && in_lattice(&b, &x));
        }
        // index agrees with the brute-force count of residues mod d
        let r1 = residues(&g1, d);
        let r2 = residues(&g2, d);
        let common = r1.intersection(&r2).count() as i64;
        let expected = BigInt::from(d.pow(4) / common);
        prop_assert_eq!(index_of(&both), expected);
        // commutativity
        let (_, ba) = intersect_subgroups(&[b.clone(), a.clone()]).unwrap();
        prop_assert!(same_subgroup(&both, &ba));
    }

    #[test]
    fn intersection_is_associative(g1 in full_rank_lattice(), g2 in full_rank_lattice(), g3 in full_rank_lattice()) {
        let (a, b, c) = (lattice_map(&g1), lattice_map(&g2), lattice_map(&g3));
        let (_, ab) = intersect_subgroups(&[a.clone(), b.clone()]).unwrap();
        let (_, ab_c) = intersect_subgroups(&[ab, c.clone()]).unwrap();
        let (_, bc) = intersect_subgroups(&[b, c]).unwrap();
        let (_, a_bc) = intersect_subgroups(&[a, bc]).unwrap();
        prop_assert!(same_subgroup(&ab_c, &a_bc));
    }
}
