use std::sync::Arc;
use twistcoef::examples::*;
use twistcoef::homology::*;
use twistcoef::linalg::*;

fn part(s: &str) -> PartitionType {
    s.parse().unwrap()
}

fn inv(torsion: &[i64], free_rank: usize) -> Invariants {
    Invariants { torsion: torsion.iter().map(|&x| x.into()).collect(), free_rank }
}

fn sym(n: usize) -> Arc<PermGroup> {
    Arc::new(PermGroup::symmetric(n).unwrap())
}

fn sign_module(n: usize) -> GModule {
    let g = sym(n);
    let k = g.letters().len();
    GModule::new(g, FgAbGroup::free(1), vec![IntMatrix::from_rows(&[vec![-1]]); k]).unwrap()
}

#[test]
fn integral_homology_of_symmetric_groups() {
    for n in 2..=6 {
        let cx = TwistedComplex::new(&GModule::trivial(sym(n), FgAbGroup::free(1))).unwrap();
        assert_eq!(cx.homology(0, Ring::Z).unwrap().group.invariants(), inv(&[], 1));
        assert_eq!(cx.homology(1, Ring::Z).unwrap().group.invariants(), inv(&[2], 0), "n={n}");
        let h2 = if n >= 4 { inv(&[2], 0) } else { inv(&[], 0) };
        assert_eq!(cx.homology(2, Ring::Z).unwrap().group.invariants(), h2, "n={n}");
    }
}

#[test]
fn permutation_module_h1_is_z2() {
    let t = partition_functor(&part("1"), Ring::Z, 6).unwrap();
    for n in 3..=6 {
        let cx = TwistedComplex::new(&GModule::from_functor(&t, sym(n)).unwrap()).unwrap();
        assert_eq!(cx.homology(1, Ring::Z).unwrap().group.invariants(), inv(&[2], 0), "n={n}");
    }
}

/// The literal bar complex and the small resolution, wherever the bar
/// complex fits in its caps.
#[test]
fn bar_oracle_agrees_with_resolution() {
    let mut compared = 0;
    for n in 1..=4 {
        let mut modules = vec![GModule::trivial(sym(n), FgAbGroup::free(1)), sign_module(n)];
        // rank-6 modules at n = 4 make the degree-3 bar complex too slow for a unit test
        let lambdas: &[&str] = if n == 4 { &["1"] } else { &["1", "1,1", "2"] };
        for lambda in lambdas {
            modules.push(GModule::from_functor(&partition_functor(&part(lambda), Ring::Z, 4).unwrap(), sym(n)).unwrap());
        }
        for m in &modules {
            let cx = TwistedComplex::new(m).unwrap();
            for ring in [Ring::Z, Ring::Fp(2), Ring::Fp(3), Ring::Q] {
                for d in 0..=2 {
                    match normalized_bar_homology(m, d, ring) {
                        Ok(bar) => {
                            let small = ring.reduce_invariants(&cx.homology(d, ring).unwrap().group.invariants());
                            assert_eq!(ring.reduce_invariants(&bar), small, "n={n} d={d} {ring:?}");
                            compared += 1;
                        }
                        Err(HomologyError::Cap { .. }) => {}
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
    }
    assert!(compared >= 100, "{compared}");
}

#[test]
fn h0_matches_coinvariants() {
    let t = partition_functor(&part("1,1"), Ring::Z, 5).unwrap();
    for n in 0..=5 {
        let m = GModule::from_functor(&t, sym(n)).unwrap();
        let cx = TwistedComplex::new(&m).unwrap();
        for ring in [Ring::Z, Ring::Fp(2), Ring::Q] {
            assert_eq!(ring.reduce_invariants(&cx.homology(0, ring).unwrap().group.invariants()), coinvariants_over(&m, ring));
        }
    }
}

#[test]
fn shapiro_dual_path() {
    let mut agreed = 0;
    let functors = [partition_functor(&part("1"), Ring::Z, 5).unwrap(), partition_functor(&part("1,1"), Ring::Z, 5).unwrap(), partition_functor(&part("2"), Ring::Z, 5).unwrap()];
    for t in &functors {
        for n in 1..=5 {
            for k in 1..=n {
                for ring in [Ring::Z, Ring::Fp(2)] {
                    for c in shapiro_reduce(t, n, k, 2, ring).unwrap() {
                        assert_ne!(c.agree(), Some(false), "{c:?}");
                        agreed += usize::from(c.agree() == Some(true));
                    }
                }
            }
        }
    }
    assert!(agreed >= 20, "{agreed}");
}

#[test]
fn stability_reports_pass() {
    let c = constant_functor(&FgAbGroup::free(1), Ring::Z, 5).unwrap();
    let p11 = partition_functor(&part("1,1"), Ring::Fp(2), 5).unwrap();
    for (t, ring) in [(&c, Ring::Z), (&p11, Ring::Fp(2))] {
        let r = stability_report(t, 2, ring, 5, None).unwrap();
        assert!(r.passed(), "{}", r.text());
        assert_eq!(r.maps.len(), 5 * 3);
    }
}

#[test]
fn stabilisation_is_not_iso_below_the_range() {
    // H_1(Sigma_1; Z) = 0 -> H_1(Sigma_2; Z) = Z/2 is outside d <= n/2.
    let c = constant_functor(&FgAbGroup::free(1), Ring::Z, 3).unwrap();
    let m = stabilisation_map(&c, 1, 1, Ring::Z).unwrap();
    assert!(m.map.is_injective() && !m.map.is_surjective());
}

#[test]
fn degree_zero_splittings() {
    for lambda in ["1", "1,1", "2"] {
        let t = partition_functor(&part(lambda), Ring::Z, 5).unwrap();
        for ring in [Ring::Z, Ring::Fp(2), Ring::Q] {
            let data = degree_zero_dold_data(&t, ring, 5).unwrap();
            let rho = dold_splitting(&data).unwrap();
            assert_eq!(rho.len(), 5);
        }
    }
}
