use proptest::prelude::*;
use twistcoef::sigma::*;

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).map(|mask| (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect()).collect()
}

fn arb_morphism(max: usize) -> impl Strategy<Value = PartialInjection> {
    (0..=max, 0..=max, any::<u64>()).prop_map(move |(m, n, seed)| {
        let homs = SigmaCategory::new(max).enumerate_hom(m, n).unwrap();
        homs[(seed % homs.len() as u64) as usize].clone()
    })
}

#[test]
fn hom_count_matches_formula() {
    let cat = SigmaCategory::new(6);
    for m in 0..=6 {
        for n in 0..=6 {
            let homs = cat.enumerate_hom(m, n).unwrap();
            assert_eq!(homs.len() as u128, hom_count(m, n), "Hom({m},{n})");
            let mut sorted: Vec<_> = homs.iter().cloned().collect();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), homs.len());
        }
    }
}

#[test]
fn composition_is_associative_up_to_four() {
    let cat = SigmaCategory::new(4);
    for a in 0..=4 {
        for b in 0..=4 {
            let fs = cat.enumerate_hom(a, b).unwrap();
            for c in 0..=4 {
                let gs = cat.enumerate_hom(b, c).unwrap();
                // precompose once per (f, g)
                let gf: Vec<Vec<PartialInjection>> =
                    gs.iter().map(|g| fs.iter().map(|f| g.compose(f).unwrap()).collect()).collect();
                for d in 0..=4 {
                    for h in cat.enumerate_hom(c, d).unwrap().iter() {
                        for (gi, g) in gs.iter().enumerate() {
                            let hg = h.compose(g).unwrap();
                            for (fi, f) in fs.iter().enumerate() {
                                assert_eq!(h.compose(&gf[gi][fi]).unwrap(), hg.compose(f).unwrap());
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn every_morphism_has_an_inverse_witness() {
    let cat = SigmaCategory::new(4);
    for m in 0..=4 {
        for n in 0..=4 {
            for f in cat.enumerate_hom(m, n).unwrap().iter() {
                let g = find_inverse_witness(&cat, f).unwrap().expect("witness exists");
                assert_eq!(f.compose(&g.compose(f).unwrap()).unwrap(), *f);
            }
        }
    }
}

#[test]
fn projection_facts_up_to_five() {
    for n in 0..=5 {
        for s in subsets(n + 1) {
            let lhs = order_preserving_projection(n + 1, &s).unwrap().compose(&iota(n)).unwrap();
            if !s.contains(&1) {
                let shifted: Vec<usize> = s.iter().map(|x| x - 1).collect();
                assert_eq!(lhs, order_preserving_projection(n, &shifted).unwrap(), "fact (a), S={s:?}");
            } else {
                let rest: Vec<usize> = s.iter().filter(|&&x| x != 1).map(|x| x - 1).collect();
                let rhs = iota(s.len() - 1).compose(&order_preserving_projection(n, &rest).unwrap()).unwrap();
                assert_eq!(lhs, rhs, "fact (b), S={s:?}");
            }
        }
    }
}

#[test]
fn forgetful_idempotents_commute() {
    for n in 0..=5 {
        let all = subsets(n);
        for s1 in &all {
            let a = forget_morphism(n, s1).unwrap();
            assert_eq!(a.compose(&a).unwrap(), a);
            for s2 in &all {
                let b = forget_morphism(n, s2).unwrap();
                let mut u = s1.clone();
                u.extend(s2);
                let union = forget_morphism(n, &u).unwrap();
                assert_eq!(a.compose(&b).unwrap(), union);
                assert_eq!(b.compose(&a).unwrap(), union);
            }
        }
    }
}

#[test]
fn generator_words_recompose_exhaustively() {
    let cat = SigmaCategory::new(4);
    for m in 0..=4 {
        for n in 0..=4 {
            for f in cat.enumerate_hom(m, n).unwrap().iter() {
                let w = decompose_into_generators(f);
                assert_eq!(w.evaluate(m).unwrap(), *f, "{f} via {w}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn stabilisation_is_natural(f in arb_morphism(6)) {
        let lhs = stabilize_morphism(&f).compose(&iota(f.source())).unwrap();
        let rhs = iota(f.target()).compose(&f).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn stabilisation_is_a_functor(f in arb_morphism(5), seed in any::<u64>()) {
        let homs = SigmaCategory::new(5).enumerate_hom(f.target(), (seed % 6) as usize).unwrap();
        let g = &homs[(seed % homs.len() as u64) as usize];
        prop_assert_eq!(stabilize_morphism(&g.compose(&f).unwrap()),
            stabilize_morphism(g).compose(&stabilize_morphism(&f)).unwrap());
    }

    #[test]
    fn notation_round_trips(f in arb_morphism(7)) {
        let s = f.to_string();
        prop_assert_eq!(s.parse::<PartialInjection>().unwrap(), f);
    }

    #[test]
    fn words_recompose(f in arb_morphism(7)) {
        prop_assert_eq!(decompose_into_generators(&f).evaluate(f.source()).unwrap(), f);
    }
}
