use crate::family::Loaded;
use crate::out::{Format, Report};
use anyhow::Result;
use num_rational::BigRational;
use twistcoef::burau::{burau_assignment, check_relations, edge_effect_value, specialize, RelationId};
use twistcoef::examples::sign_extension_attempt;
use twistcoef::functor::{FunctorError, LemmaBounds, Truncated, TruncatedFunctor};
use twistcoef::homology::{degree_zero_dold_data, dold_splitting, stability_report, HomologyError};
use twistcoef::linalg::Ring;

fn header(r: &mut Report, f: &Loaded) {
    let t = &f.functor;
    r.kv("functor", &f.source);
    if let Some(fam) = t.family() {
        r.kv("family", fam);
    }
    r.kv("ring", t.ring());
    r.kv("truncation", t.truncation());
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn validate(f: &Loaded, bound: usize, samples: usize, seed: u64, format: Format) -> Result<(String, bool)> {
    let mut r = Report::new(format);
    header(&mut r, f);
    let t = &f.functor;
    for n in 0..=t.truncation() {
        r.record(&[&"object", &n, &t.group(n).invariants()]);
        r.text(format!("  T_{n} = {}", t.group(n).invariants()));
    }
    match t.validate_with(bound, samples, seed) {
        Ok(stats) => {
            r.kv("exhaustive_bound", stats.exhaustive_bound);
            r.kv("generator_checks", stats.atom_checks);
            r.kv("sampled_pairs", stats.sampled_pairs);
            r.kv("seed", seed);
            r.check("functoriality", true);
        }
        Err(FunctorError::NotFunctorial { g, f: h }) => {
            r.kv("witness_g", &g);
            r.kv("witness_f", &h);
            r.text(format!("T({g} o {h}) != T({g}) T({h})"));
            r.check("functoriality", false);
        }
        Err(e) => return Err(e.into()),
    }
    if t.family() == Some("sign-attempt") {
        let a = sign_extension_attempt(t.truncation())?;
        if let (Some((g, h)), Some(l), Some(rr)) = (&a.failure, &a.lhs, &a.rhs) {
            r.kv("sign_witness", format!("g = {g}, f = {h}, T(gf) = {l}, T(g)T(f) = {rr}"));
        }
        r.kv("sign_on_permutations_valid", a.permutations_valid);
        r.kv("sign_on_iota_composites_valid", a.iota_only_valid);
    }
    Ok(r.finish())
}

fn tri(r: &mut Report, name: &str, x: &Truncated) {
    match r.format() {
        Format::Text => r.kv(name, x),
        Format::Records => {
            let (kind, w) = match x {
                Truncated::Zero => ("zero", String::from("-")),
                Truncated::Exact { witness: (n, k), .. } => ("exact", format!("{n},{k}")),
                Truncated::AtLeast { witness: (n, k), .. } => ("at_least", format!("{n},{k}")),
            };
            r.record(&[&name, &kind, &x.value(), &w]);
        }
    }
}

pub fn invariants(f: &Loaded, format: Format) -> Result<(String, bool)> {
    let mut r = Report::new(format);
    header(&mut r, f);
    let t = &f.functor;
    let ring = t.ring();
    let degree = t.degree()?;
    let height = t.height()?;
    tri(&mut r, "degree", &degree);
    tri(&mut r, "height", &height);
    match (height.exact(), degree.exact()) {
        (Some(h), Some(d)) => r.check("height_le_degree", h <= d),
        _ => r.kv("height_le_degree", "not determinate"),
    }
    r.text("rank of T_n^k (the piece on {n-k+1..n}); T_n splits into C(n,k) copies of each");
    for n in 0..=t.truncation() {
        let total = ring.dimension(&t.group(n).invariants());
        let mut sum = 0;
        let mut line = format!("  n={n} rank T_n={total} |");
        for k in 0..=n {
            let piece = ring.reduce_invariants(&t.top_piece(n, k)?.group.invariants());
            let rk = ring.dimension(&piece);
            sum += binomial(n, k) * rk;
            line.push_str(&format!(" k={k}: {rk}"));
            r.record(&[&"piece", &n, &k, &piece]);
        }
        r.text(line);
        r.check(&format!("ranks_sum_n{n}"), sum == total);
    }
    Ok(r.finish())
}

pub fn decompose(f: &Loaded, max_n: usize, format: Format) -> Result<(String, bool)> {
    let mut r = Report::new(format);
    header(&mut r, f);
    let t = &f.functor;
    let ring = t.ring();
    let top = max_n.min(t.truncation());
    for n in 0..=top {
        let d = t.decompose(n)?;
        r.text(format!("n={n}: T_n = {}", ring.reduce_invariants(&t.group(n).invariants())));
        for (q, ce) in &d.summands {
            let inv = ring.reduce_invariants(&ce.group.invariants());
            let name = format!("{{{}}}", q.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
            r.record(&[&"summand", &n, &name, &inv]);
            if !ce.is_zero_over(ring) {
                r.text(format!("  T_{n}[{name}^delta] = {inv}"));
            }
        }
        r.check(&format!("n{n}_sum_is_iso"), d.witness_is_iso);
        r.check(&format!("n{n}_invariants_match"), d.invariants_match);
        r.check(&format!("n{n}_permuted_transitively"), d.permuted_transitively);
        r.check(&format!("n{n}_block_stabiliser_invariant"), d.block_stabiliser_invariant);
    }
    let n = t.truncation();
    let suite = t.verify_lemma_suite_with(LemmaBounds { bijection: n.min(5), splitting: n.min(4), decomposition: n.min(4) });
    r.check("functoriality", suite.functoriality.is_ok());
    for (name, c) in [("bijections", &suite.bijection), ("three_term_splittings", &suite.splitting), ("discrete_splittings", &suite.decomposition), ("height_le_degree", &suite.height_le_degree)] {
        r.kv(&format!("{name}_checked"), c.checked);
        for fail in &c.failures {
            r.kv(&format!("{name}_failure"), fail);
        }
        r.check(name, c.passed());
    }
    Ok(r.finish())
}

pub fn stability(f: &Loaded, ring: Ring, max_d: usize, max_n: usize, format: Format) -> Result<(String, bool)> {
    let mut r = Report::new(format);
    header(&mut r, f);
    let t = &f.functor;
    let top = max_n.min(t.truncation());
    let rep = stability_report(t, max_d, ring, top, None)?;
    match format {
        Format::Text => r.text(rep.text()),
        Format::Records => {
            r.kv("homology_ring", ring);
            r.kv("degree", rep.degree);
            for line in rep.records().lines() {
                r.record(&[&line]);
            }
        }
    }
    for v in rep.violations() {
        r.kv("violation", format!("n={} d={} {} -> {} {}", v.n, v.d, v.source, v.target, v.class));
    }
    r.check("stability", rep.passed());
    Ok(r.finish())
}

pub fn dold_demo(f: &Loaded, ring: Ring, max_n: usize, format: Format) -> Result<(String, bool)> {
    let mut r = Report::new(format);
    header(&mut r, f);
    let t = &f.functor;
    let data = degree_zero_dold_data(t, ring, max_n.min(t.truncation()))?;
    for (i, g) in data.groups.iter().enumerate() {
        r.kv(&format!("H_0(n={})", data.start + i), ring.reduce_invariants(&g.invariants()));
    }
    match dold_splitting(&data) {
        Ok(rho) => {
            for (i, (phi, rho)) in data.phi.iter().zip(&rho).enumerate() {
                let n = data.start + i;
                r.kv(&format!("phi_{n}"), &phi.matrix);
                r.kv(&format!("rho_{n}"), &rho.matrix);
            }
            r.check("rho_phi_is_identity", true);
        }
        Err(HomologyError::DoldHypothesis { k, n, witness }) => {
            let w: Vec<String> = witness.iter().map(|x| x.to_string()).collect();
            r.kv("hypothesis_fails", format!("k={k} n={n} generator [{}]", w.join(",")));
            r.check("rho_phi_is_identity", false);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(r.finish())
}

pub fn burau(max_n: usize, k: usize, t0: Option<&BigRational>, format: Format) -> Result<(String, bool)> {
    let mut r = Report::new(format);
    let a = burau_assignment(max_n)?;
    r.kv("max_n", max_n);
    r.kv("k_bound", k);
    match t0 {
        None => {
            let rep = check_relations(&a, k);
            emit_table(&mut r, &rep.table());
            r.kv("all_hold", rep.all_hold());
            if let Some(first) = rep.of(RelationId::Edge).find(|x| !x.holds()) {
                r.kv("first_edge_failure", &first.params);
            }
            if let Some(locus) = rep.vanishing_locus(RelationId::Edge) {
                r.kv("edge_vanishing_locus", locus);
            }
            let mut closed = true;
            for n in 1..max_n {
                for kk in 0..=k {
                    closed &= edge_effect_value(&a, kk, n).is_ok();
                }
            }
            r.check("edge_closed_form", closed);
        }
        Some(t0) => {
            r.kv("t", t0);
            let rep = check_relations(&specialize(&a, t0)?, k);
            emit_table(&mut r, &rep.table());
            r.kv("all_hold", rep.all_hold());
        }
    }
    Ok(r.finish())
}

fn emit_table(r: &mut Report, table: &str) {
    r.text("relation\tinstance\tverdict\tresidual");
    for line in table.lines() {
        match r.format() {
            Format::Text => r.text(line),
            Format::Records => r.record(&[&"relation", &line]),
        }
    }
}

pub fn export(t: &TruncatedFunctor) -> Result<String> {
    Ok(t.to_text()?)
}
