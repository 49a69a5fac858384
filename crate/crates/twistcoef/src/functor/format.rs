//! Plain-text functor files.
//!
//! ```text
//! sigma-functor v1
//! family partition 1
//! truncation 2
//! ring Z
//! object 0 torsion free 0
//! object 1 torsion free 1
//! object 2 torsion free 2
//! map iota 0
//! row
//! map iota 1
//! row 0
//! row 1
//! map pi 1
//! map pi 2
//! row 0 1
//! map sigma 1 2
//! row 0 1
//! row 1 0
//! end
//! ```
//!
//! Each object is `Z/t1 + ... + Z/tk + Z^free` with generators in that order.
//! A `map` block has one `row` per target generator. The `family` line is optional.

use super::{FunctorError, Generators, TruncatedFunctor};
use crate::linalg::{FgAbGroup, IntMatrix, Ring};
use num_bigint::BigInt;
use std::fmt::Write as _;

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid functor: {0}")]
    Functor(#[from] FunctorError),
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

impl TruncatedFunctor {
    /// Same functor with every group in reduced Smith form and generator
    /// entries reduced modulo the torsion orders.
    pub fn canonical(&self) -> Result<TruncatedFunctor, FunctorError> {
        let simp: Vec<_> = self.groups().iter().map(|g| g.simplify()).collect();
        let groups: Vec<FgAbGroup> = simp.iter().map(|s| s.group.clone()).collect();
        let g = self.generators();
        let re = |m: &IntMatrix, s: usize, t: usize| simp[t].to.mul(m).mul(&simp[s].from);
        let gens = Generators {
            iota: g.iota.iter().enumerate().map(|(n, m)| re(m, n, n + 1)).collect(),
            pi: g.pi.iter().enumerate().map(|(k, m)| re(m, k + 1, k)).collect(),
            sigma: g.sigma.iter().enumerate().map(|(n, r)| r.iter().map(|m| re(m, n, n)).collect()).collect(),
        };
        let mut t = TruncatedFunctor::from_generators_unchecked(self.ring(), groups, gens)?;
        t.family = self.family.clone();
        Ok(t)
    }

    /// Serialise in the `sigma-functor v1` format (canonical presentation).
    pub fn to_text(&self) -> Result<String, FunctorError> {
        let t = self.canonical()?;
        let mut out = String::from("sigma-functor v1\n");
        if let Some(f) = t.family() {
            writeln!(out, "family {f}").unwrap();
        }
        writeln!(out, "truncation {}", t.truncation()).unwrap();
        writeln!(out, "ring {}", t.ring()).unwrap();
        for (n, g) in t.groups().iter().enumerate() {
            let inv = g.invariants();
            write!(out, "object {n} torsion").unwrap();
            for x in &inv.torsion {
                write!(out, " {x}").unwrap();
            }
            writeln!(out, " free {}", inv.free_rank).unwrap();
        }
        let block = |out: &mut String, head: String, m: &IntMatrix| {
            writeln!(out, "map {head}").unwrap();
            for i in 0..m.rows() {
                out.push_str("row");
                for j in 0..m.cols() {
                    write!(out, " {}", m.get(i, j)).unwrap();
                }
                out.push('\n');
            }
        };
        let g = t.generators();
        for (n, m) in g.iota.iter().enumerate() {
            block(&mut out, format!("iota {n}"), m);
        }
        for (k, m) in g.pi.iter().enumerate() {
            block(&mut out, format!("pi {}", k + 1), m);
        }
        for (n, row) in g.sigma.iter().enumerate() {
            for (i, m) in row.iter().enumerate() {
                block(&mut out, format!("sigma {} {n}", i + 1), m);
            }
        }
        out.push_str("end\n");
        Ok(out)
    }

    /// Parse and validate a `sigma-functor v1` file.
    pub fn from_text(text: &str) -> Result<TruncatedFunctor, ParseError> {
        let t = Self::from_text_unchecked(text)?;
        t.validate()?;
        Ok(t)
    }

    /// Parse without the functoriality check.
    pub fn from_text_unchecked(text: &str) -> Result<TruncatedFunctor, ParseError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#')).peekable();
        let mut next = |what: &str| lines.next().ok_or_else(|| syntax(0, format!("unexpected end of file, expected {what}")));

        let (ln, l) = next("header")?;
        if l != "sigma-functor v1" {
            return Err(syntax(ln, "expected header `sigma-functor v1`"));
        }
        let (mut ln, mut l) = next("truncation")?;
        let mut family = None;
        if let Some(f) = l.strip_prefix("family ") {
            family = Some(f.trim().to_string());
            (ln, l) = next("truncation")?;
        }
        let trunc: usize = l
            .strip_prefix("truncation ")
            .and_then(|x| x.trim().parse().ok())
            .ok_or_else(|| syntax(ln, "expected `truncation N`"))?;
        let (ln, l) = next("ring")?;
        let ring: Ring = l
            .strip_prefix("ring ")
            .ok_or_else(|| syntax(ln, "expected `ring R`"))?
            .trim()
            .parse()
            .map_err(|e: String| syntax(ln, e))?;

        let mut groups = Vec::new();
        for n in 0..=trunc {
            let (ln, l) = next("object")?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() < 5 || toks[0] != "object" || toks[1] != n.to_string() || toks[2] != "torsion" {
                return Err(syntax(ln, format!("expected `object {n} torsion ... free r`")));
            }
            let fpos = toks.iter().position(|&t| t == "free").ok_or_else(|| syntax(ln, "missing `free`"))?;
            if fpos != toks.len() - 2 {
                return Err(syntax(ln, "`free r` must end the line"));
            }
            let torsion: Vec<BigInt> = toks[3..fpos]
                .iter()
                .map(|t| t.parse::<BigInt>().ok().filter(|x| *x > BigInt::from(1)))
                .collect::<Option<_>>()
                .ok_or_else(|| syntax(ln, "torsion orders must be integers > 1"))?;
            let free: usize = toks[fpos + 1].parse().map_err(|_| syntax(ln, "bad free rank"))?;
            groups.push(FgAbGroup::from_invariants(&torsion, free));
        }

        let dims: Vec<usize> = groups.iter().map(|g| g.ngens()).collect();
        let mut read_block = |head: String, rows: usize, cols: usize| -> Result<IntMatrix, ParseError> {
            let (ln, l) = next(&format!("`map {head}`"))?;
            if l != format!("map {head}") {
                return Err(syntax(ln, format!("expected `map {head}`")));
            }
            let mut data = Vec::with_capacity(rows);
            for _ in 0..rows {
                let (ln, l) = next("row")?;
                let mut toks = l.split_whitespace();
                if toks.next() != Some("row") {
                    return Err(syntax(ln, "expected `row ...`"));
                }
                let r: Vec<BigInt> = toks.map(|t| t.parse::<BigInt>()).collect::<Result<_, _>>().map_err(|_| syntax(ln, "bad integer"))?;
                if r.len() != cols {
                    return Err(syntax(ln, format!("expected {cols} entries, found {}", r.len())));
                }
                data.push(r);
            }
            Ok(IntMatrix::from_big_rows(rows, cols, data))
        };
        let mut iota = Vec::new();
        for n in 0..trunc {
            iota.push(read_block(format!("iota {n}"), dims[n + 1], dims[n])?);
        }
        let mut pi = Vec::new();
        for n in 1..=trunc {
            pi.push(read_block(format!("pi {n}"), dims[n - 1], dims[n])?);
        }
        let mut sigma = Vec::new();
        for n in 0..=trunc {
            let mut row = Vec::new();
            for i in 1..n {
                row.push(read_block(format!("sigma {i} {n}"), dims[n], dims[n])?);
            }
            sigma.push(row);
        }
        let (ln, l) = next("end")?;
        if l != "end" {
            return Err(syntax(ln, "expected `end`"));
        }
        let mut t = TruncatedFunctor::from_generators_unchecked(ring, groups, Generators { iota, pi, sigma })?;
        t.family = family;
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::points;
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let t = points(Ring::Z, 3).with_family("partition 1");
        let s = t.to_text().unwrap();
        let back = TruncatedFunctor::from_text(&s).unwrap();
        assert_eq!(back.to_text().unwrap(), s);
        assert_eq!(back.generators(), t.canonical().unwrap().generators());
        assert_eq!(back.family(), Some("partition 1"));
    }

    #[test]
    fn torsion_round_trip() {
        let t = points(Ring::Fp(5), 2);
        let s = t.to_text().unwrap();
        assert!(s.contains("object 2 torsion 5 5 free 0"));
        assert_eq!(TruncatedFunctor::from_text(&s).unwrap().to_text().unwrap(), s);
    }

    #[test]
    fn doc_example_parses() {
        let text = "sigma-functor v1\nfamily partition 1\ntruncation 2\nring Z\nobject 0 torsion free 0\nobject 1 torsion free 1\nobject 2 torsion free 2\nmap iota 0\nrow\nmap iota 1\nrow 0\nrow 1\nmap pi 1\nmap pi 2\nrow 0 1\nmap sigma 1 2\nrow 0 1\nrow 1 0\nend\n";
        let t = TruncatedFunctor::from_text(text).unwrap();
        assert_eq!(t.to_text().unwrap(), text);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "sigma-functor v1\ntruncation 1\nring Z\nobject 0 torsion free 1\nobject 1 torsion free 1\nmap iota 0\nrow 1 2\n";
        match TruncatedFunctor::from_text(bad) {
            Err(ParseError::Syntax { line, .. }) => assert_eq!(line, 7),
            other => panic!("{other:?}"),
        }
        assert!(TruncatedFunctor::from_text("nope").is_err());
    }
}
