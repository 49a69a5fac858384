//! One PASS/FAIL line per acceptance criterion, written straight to stderr
//! so it shows without `--nocapture`. The test fails if any criterion does.

use num_bigint::BigInt;
use num_rational::BigRational;
use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};
use twistcoef::burau::*;
use twistcoef::examples::*;
use twistcoef::functor::{LemmaBounds, TruncatedFunctor};
use twistcoef::homology::*;
use twistcoef::linalg::{FgAbGroup, Invariants, Ring};

const DEGREE_BUDGET: Duration = Duration::from_secs(10);
const DECOMPOSITION_BUDGET: Duration = Duration::from_secs(60);
const BURAU_BUDGET: Duration = Duration::from_secs(5);
const STABILITY_BUDGET: Duration = Duration::from_secs(600);
const MIN_SHAPIRO_CELLS: usize = 20;

fn part(s: &str) -> PartitionType {
    s.parse().unwrap()
}

fn circle() -> GradedBasis {
    GradedBasis::new(vec![1, 1]).unwrap()
}

fn sphere2() -> GradedBasis {
    GradedBasis::new(vec![1, 0, 1]).unwrap()
}

/// Every example family, at several rings.
fn library(trunc: usize) -> Vec<TruncatedFunctor> {
    let mut out = vec![
        constant_functor(&FgAbGroup::free(1), Ring::Z, trunc).unwrap(),
        constant_functor(&FgAbGroup::from_invariants(&[BigInt::from(2)], 1), Ring::Z, trunc).unwrap(),
        constant_functor(&FgAbGroup::free(1), Ring::Fp(3), trunc).unwrap(),
        kunneth_functor(&circle(), 1, Ring::Q, trunc).unwrap(),
        kunneth_functor(&circle(), 2, Ring::Z, trunc).unwrap(),
        kunneth_functor(&sphere2(), 2, Ring::Z, trunc).unwrap(),
        kunneth_functor(&GradedBasis::new(vec![1, 2, 1]).unwrap(), 2, Ring::Fp(2), trunc).unwrap(),
        interval_partition_functor(&part("1"), &part("2"), Ring::Z, trunc).unwrap(),
        specialize(&burau_assignment(trunc).unwrap(), &BigRational::from_integer(1.into())).unwrap().to_functor(trunc).unwrap(),
    ];
    for lambda in ["1", "2", "1,1", "2,1"] {
        out.push(partition_functor(&part(lambda), Ring::Z, trunc).unwrap());
    }
    out.push(partition_functor(&part("1,1"), Ring::Q, trunc).unwrap());
    out
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(t0: Instant, budget: Duration, failures: &mut Vec<String>) -> String {
    let e = t0.elapsed();
    if e > budget {
        failures.push(format!("took {e:.1?} > {budget:?}"));
    }
    format!("{:.1?} (budget {budget:?})", e)
}

fn degree_ledger() -> Outcome {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let mut count = 0;
    let mut check = |name: String, t: &TruncatedFunctor, want: i64, exact: bool| {
        count += 1;
        let d = t.degree().unwrap();
        let ok = if exact { d.exact() == Some(want) } else { d.exact().is_some_and(|v| v <= want) };
        if !ok {
            failures.push(format!("{name}: {d}, wanted {}{want}", if exact { "" } else { "<= " }));
        }
    };
    check("const".into(), &constant_functor(&FgAbGroup::free(1), Ring::Z, 6).unwrap(), 0, true);
    for lambda in ["1", "2", "1,1", "3", "2,1", "1,2", "1,1,1"] {
        let l = part(lambda);
        check(format!("P({lambda})"), &partition_functor(&l, Ring::Z, 6).unwrap(), l.size() as i64, true);
    }
    // circle: h = 0, bound q; exact value q (T_n is the signed span of q-subsets)
    for q in 0..=3 {
        let t = kunneth_functor(&circle(), q, Ring::Z, 6).unwrap();
        check(format!("kunneth(circle, {q})"), &t, q as i64, false);
        check(format!("kunneth(circle, {q}) exact"), &t, q as i64, true);
    }
    // S^2: h = 1, bound q/2; nonzero only for even q, where it is q/2
    for q in 0..=4 {
        let t = kunneth_functor(&sphere2(), q, Ring::Z, 6).unwrap();
        check(format!("kunneth(S2, {q})"), &t, (q / 2) as i64, false);
        let exact = if q % 2 == 0 { (q / 2) as i64 } else { -1 };
        check(format!("kunneth(S2, {q}) exact"), &t, exact, true);
    }
    let time = within(t0, DEGREE_BUDGET, &mut failures);
    outcome(failures.is_empty(), format!("{count} checks at N=6, {time}{}", fmt_failures(&failures)))
}

fn fmt_failures(f: &[String]) -> String {
    if f.is_empty() {
        String::new()
    } else {
        format!("; failures: {}", f.join("; "))
    }
}

fn decomposition_suite() -> Outcome {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let mut checks = 0;
    let lib = library(5);
    for t in &lib {
        let name = t.family().unwrap_or("?").to_string();
        for n in 0..=4 {
            let d = t.decompose(n).unwrap();
            checks += 1;
            if !d.passed() {
                failures.push(format!("{name} decomposition at n={n}"));
            }
        }
        let s = t.verify_lemma_suite_with(LemmaBounds { bijection: 5, splitting: 4, decomposition: 4 });
        checks += s.bijection.checked + s.splitting.checked + s.decomposition.checked;
        if !s.passed() {
            failures.push(format!("{name} lemma suite: {:?} {:?} {:?} {:?}", s.functoriality, s.bijection.failures, s.splitting.failures, s.decomposition.failures));
        }
    }
    let time = within(t0, DECOMPOSITION_BUDGET, &mut failures);
    outcome(failures.is_empty(), format!("{checks} checks on {} functors, {time}{}", lib.len(), fmt_failures(&failures)))
}

fn height_vs_degree() -> Outcome {
    let mut failures = Vec::new();
    let mut compared = 0;
    for t in library(6) {
        let (h, d) = (t.height().unwrap(), t.degree().unwrap());
        if let (Some(h), Some(d)) = (h.exact(), d.exact()) {
            compared += 1;
            if h > d {
                failures.push(format!("{}: height {h} > degree {d}", t.family().unwrap_or("?")));
            }
        }
    }
    let p1 = partition_functor(&part("1"), Ring::Z, 6).unwrap().height().unwrap().exact();
    let c = constant_functor(&FgAbGroup::free(1), Ring::Z, 6).unwrap().height().unwrap().exact();
    if p1 != Some(1) {
        failures.push(format!("height(P(1)) = {p1:?}"));
    }
    if c != Some(0) {
        failures.push(format!("height(const) = {c:?}"));
    }
    outcome(failures.is_empty() && compared > 0, format!("{compared} determinate pairs; height(P(1)) = 1, height(const) = 0{}", fmt_failures(&failures)))
}

fn burau() -> Outcome {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let a = burau_assignment(6).unwrap();
    for n in 1..=5 {
        for k in 0..=8 {
            if let Err(e) = edge_effect_value(&a, k, n) {
                failures.push(format!("k={k} n={n}: {e}"));
            }
        }
    }
    let symbolic = check_relations(&a, 8);
    for r in symbolic.of(RelationId::Edge) {
        let k: usize = r.params.split_whitespace().next().unwrap().trim_start_matches("k=").parse().unwrap();
        if r.holds() != (k <= 1) {
            failures.push(format!("edge {} holds = {}", r.params, r.holds()));
        }
    }
    if symbolic.failures().any(|r| r.relation != RelationId::Edge) {
        failures.push("a relation other than (e) fails".into());
    }
    for (num, den) in [(1, 1), (2, 1), (-1, 1), (1, 2), (-3, 2)] {
        let t = BigRational::new(num.into(), den.into());
        let rep = check_relations(&specialize(&a, &t).unwrap(), 8);
        let edge_fails = rep.of(RelationId::Edge).any(|r| !r.holds());
        if (num, den) == (1, 1) && !rep.all_hold() {
            failures.push("t = 1 does not satisfy the presentation".into());
        }
        if (num, den) != (1, 1) && !edge_fails {
            failures.push(format!("(e) holds at t = {t}"));
        }
    }
    if symbolic.vanishing_locus(RelationId::Edge).map(|l| l.to_string()) != Some("t in {1}".into()) {
        failures.push("vanishing locus of (e) is not {1}".into());
    }
    let time = within(t0, BURAU_BUDGET, &mut failures);
    outcome(failures.is_empty(), format!("k <= 8, n <= 5; (e) fails exactly for k >= 2 unless t = 1; {time}{}", fmt_failures(&failures)))
}

fn stability() -> Outcome {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let mut maps = 0;
    let mut cases: Vec<(TruncatedFunctor, Ring, usize)> = Vec::new();
    for (ring, max_n) in [(Ring::Z, 5), (Ring::Fp(2), 6), (Ring::Q, 6)] {
        cases.push((constant_functor(&FgAbGroup::free(1), ring, 6).unwrap(), ring, max_n));
        for lambda in ["1", "1,1", "2"] {
            cases.push((partition_functor(&part(lambda), ring, 6).unwrap(), ring, max_n));
        }
    }
    cases.push((kunneth_functor(&circle(), 1, Ring::Q, 6).unwrap(), Ring::Q, 6));
    for (t, ring, max_n) in &cases {
        let r = stability_report(t, 2, *ring, *max_n, None).unwrap();
        maps += r.maps.len();
        if !r.passed() {
            failures.push(format!("{} over {ring}:\n{}", t.family().unwrap_or("?"), r.text()));
        }
        if *ring == Ring::Z && t.family() == Some("partition 1") {
            for n in 3..=*max_n {
                let h1 = &r.groups[&(n, 1)];
                if *h1 != (Invariants { torsion: vec![2.into()], free_rank: 0 }) {
                    failures.push(format!("H_1(Sigma_{n}; Z^n) = {h1}"));
                }
            }
        }
    }
    let time = within(t0, STABILITY_BUDGET, &mut failures);
    outcome(failures.is_empty(), format!("{} reports, {maps} maps; H_1(Sigma_n; Z^n) = Z/2 for 3 <= n <= 5; {time}{}", cases.len(), fmt_failures(&failures)))
}

fn shapiro() -> Outcome {
    let mut agree = 0;
    let mut disagree = Vec::new();
    let functors = [
        (partition_functor(&part("1"), Ring::Z, 5).unwrap(), Ring::Z),
        (partition_functor(&part("1,1"), Ring::Z, 5).unwrap(), Ring::Z),
        (partition_functor(&part("2"), Ring::Z, 5).unwrap(), Ring::Z),
        (partition_functor(&part("1,1"), Ring::Fp(2), 5).unwrap(), Ring::Fp(2)),
        (kunneth_functor(&circle(), 2, Ring::Q, 5).unwrap(), Ring::Q),
    ];
    for (t, ring) in &functors {
        for n in 1..=5 {
            for k in 1..=n {
                for c in shapiro_reduce(t, n, k, 2, *ring).unwrap() {
                    match c.agree() {
                        Some(true) => agree += 1,
                        Some(false) => disagree.push(format!("{} n={n} k={k} d={}: {:?} vs {}", t.family().unwrap_or("?"), c.d, c.induced, c.reduced)),
                        None => {}
                    }
                }
            }
        }
    }
    outcome(disagree.is_empty() && agree >= MIN_SHAPIRO_CELLS, format!("{agree} cells agree (need >= {MIN_SHAPIRO_CELLS}), {} disagree{}", disagree.len(), fmt_failures(&disagree)))
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_twistcoef")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn negative_control() -> Outcome {
    let mut failures = Vec::new();
    let a = sign_extension_attempt(3).unwrap();
    match (&a.failure, &a.lhs, &a.rhs) {
        (Some(_), Some(l), Some(r)) if l != r => {}
        _ => failures.push("no witness for the sign extension".into()),
    }
    let (code, out) = cli(&["validate", "sign-attempt", "--trunc", "3"]);
    if code != 1 || !out.contains("witness_g") {
        failures.push(format!("validate sign-attempt exited {code}"));
    }
    let dir = std::env::temp_dir().join(format!("twistcoef-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = partition_functor(&part("1"), Ring::Z, 3).unwrap().to_text().unwrap();
    // a wrong entry in T(sigma_1) on 2 breaks functoriality; a dropped block is a parse error
    let wrong_entry = good.replacen("map sigma 1 2\nrow 0 1", "map sigma 1 2\nrow 1 1", 1);
    let missing = good.replacen("map pi 1\n", "", 1);
    for (name, text, want) in [("wrong_entry", wrong_entry, 1), ("missing_generator", missing, 2)] {
        assert_ne!(text, good);
        let path = dir.join(format!("{name}.txt"));
        std::fs::write(&path, text).unwrap();
        let (code, _) = cli(&["validate", path.to_str().unwrap()]);
        if code != want {
            failures.push(format!("{name}: exit {code}, expected {want}"));
        }
    }
    std::fs::remove_dir_all(&dir).ok();
    outcome(failures.is_empty(), format!("sign extension witness found; corrupted files rejected{}", fmt_failures(&failures)))
}

fn determinism() -> Outcome {
    let mut failures = Vec::new();
    let runs: [&[&str]; 4] = [
        &["validate", "partition:1,1", "--trunc", "6", "--bound", "3", "--seed", "11"],
        &["invariants", "kunneth:circle,q=2,Q", "--format", "records"],
        &["stability", "partition:1", "--trunc", "5", "--deg", "2"],
        &["burau", "--max-n", "4", "--k", "4"],
    ];
    for args in runs {
        let (a, b) = (cli(args), cli(args));
        if a != b || a.0 != 0 {
            failures.push(format!("{args:?}: exit {} / {}, identical = {}", a.0, b.0, a.1 == b.1));
        }
    }
    let lib = library(4);
    for t in &lib {
        let text = t.to_text().unwrap();
        let back = TruncatedFunctor::from_text(&text).unwrap();
        let canon = t.canonical().unwrap();
        if back.generators() != canon.generators() || back.groups() != canon.groups() || back.to_text().unwrap() != text {
            failures.push(format!("round trip of {}", t.family().unwrap_or("?")));
        }
    }
    outcome(failures.is_empty(), format!("4 commands byte-identical across runs; {} functors round-trip{}", lib.len(), fmt_failures(&failures)))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("degree ledger", degree_ledger),
        ("decomposition suite", decomposition_suite),
        ("height <= degree", height_vs_degree),
        ("Burau edge effects", burau),
        ("stability at desk scale", stability),
        ("Shapiro dual path", shapiro),
        ("negative control", negative_control),
        ("determinism and round trip", determinism),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        all &= o.pass;
        let _ = writeln!(std::io::stderr(), "criterion {} {name}: {} - {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    assert!(all, "some acceptance criteria failed");
}
