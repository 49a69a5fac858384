//! Built-in functors addressed as `family:params`, or functor files.
//!
//! ```text
//! const:Z            const:Z^2+Z/3
//! partition:2,1      interval:1..2,1
//! kunneth:circle,q=2 kunneth:b=1:0:1,q=4,Q
//! sign-attempt
//! ```
//! Spaces for `kunneth`: `point`, `circle`, `torus`, `sphere<k>`, or Betti
//! numbers `b=b0:b1:...`. A trailing ring token overrides `--ring`.

use anyhow::{anyhow, bail, Context, Result};
use num_bigint::BigInt;
use std::path::Path;
use twistcoef::examples::*;
use twistcoef::functor::TruncatedFunctor;
use twistcoef::linalg::{FgAbGroup, Ring};

/// Bad command-line input (exit code 2).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// A functor as named on the command line.
pub struct Loaded {
    pub functor: TruncatedFunctor,
    pub source: String,
}

/// `arg` is a family spec unless it names an existing file.
pub fn load(arg: &str, ring: Option<Ring>, trunc: usize) -> Result<Loaded> {
    if Path::new(arg).is_file() {
        let text = std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
        let functor = TruncatedFunctor::from_text_unchecked(&text).with_context(|| format!("parsing {arg}"))?;
        return Ok(Loaded { functor, source: arg.to_string() });
    }
    let functor = build(arg, ring, trunc)?;
    Ok(Loaded { functor, source: arg.to_string() })
}

pub fn build(spec: &str, ring: Option<Ring>, trunc: usize) -> Result<TruncatedFunctor> {
    let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
    let ring = ring.unwrap_or(Ring::Z);
    let built = match name {
        "const" => constant_functor(&parse_group(params)?, ring, trunc),
        "partition" => partition_functor(&parse_type(params)?, ring, trunc),
        "interval" => {
            let (lo, hi) = params.split_once("..").ok_or_else(|| usage(format!("interval needs `lambda..mu`, got `{params}`")))?;
            interval_partition_functor(&parse_type(lo)?, &parse_type(hi)?, ring, trunc)
        }
        "kunneth" => {
            let (basis, q, r) = parse_kunneth(params)?;
            kunneth_functor(&basis, q, r.unwrap_or(ring), trunc)
        }
        "sign-attempt" => sign_attempt_functor(trunc),
        _ => return Err(usage(format!("`{spec}` is neither a file nor a family (const, partition, interval, kunneth, sign-attempt)"))),
    };
    built.map_err(|e| usage(format!("{spec}: {e}")))
}

fn parse_type(s: &str) -> Result<PartitionType> {
    s.parse().map_err(usage)
}

/// `Z`, `Z^k`, `Z/n` joined by `+`.
fn parse_group(s: &str) -> Result<FgAbGroup> {
    let s = if s.is_empty() { "Z" } else { s };
    let mut free = 0;
    let mut torsion = Vec::new();
    for part in s.split('+').map(str::trim) {
        if part == "Z" {
            free += 1;
        } else if let Some(k) = part.strip_prefix("Z^") {
            free += k.parse::<usize>().map_err(|_| usage(format!("bad rank in `{part}`")))?;
        } else if let Some(n) = part.strip_prefix("Z/") {
            let n: BigInt = n.parse().map_err(|_| usage(format!("bad order in `{part}`")))?;
            if n < BigInt::from(2) {
                bail!(UsageError(format!("order in `{part}` must be at least 2")));
            }
            torsion.push(n);
        } else {
            bail!(UsageError(format!("cannot read group `{part}`")));
        }
    }
    Ok(FgAbGroup::from_invariants(&torsion, free))
}

fn parse_kunneth(params: &str) -> Result<(GradedBasis, usize, Option<Ring>)> {
    let mut space = None;
    let mut q = None;
    let mut ring = None;
    for tok in params.split(',').map(str::trim) {
        if let Some(v) = tok.strip_prefix("q=") {
            q = Some(v.parse::<usize>().map_err(|_| usage(format!("bad degree `{tok}`")))?);
        } else if let Some(v) = tok.strip_prefix("b=") {
            let b = v.split(':').map(|x| x.parse::<usize>()).collect::<Result<Vec<_>, _>>().map_err(|_| usage(format!("bad Betti numbers `{tok}`")))?;
            space = Some(b);
        } else if let Ok(r) = tok.parse::<Ring>() {
            ring = Some(r);
        } else {
            space = Some(named_space(tok)?);
        }
    }
    let space = space.ok_or_else(|| usage("kunneth needs a space"))?;
    let q = q.ok_or_else(|| usage("kunneth needs q=<degree>"))?;
    let basis = GradedBasis::new(space).map_err(|e| usage(e.to_string()))?;
    Ok((basis, q, ring))
}

fn named_space(name: &str) -> Result<Vec<usize>> {
    Ok(match name {
        "point" => vec![1],
        "circle" => vec![1, 1],
        "torus" => vec![1, 2, 1],
        _ => {
            let k: usize = name
                .strip_prefix("sphere")
                .and_then(|k| k.parse().ok())
                .filter(|&k| k > 0)
                .ok_or_else(|| anyhow!(UsageError(format!("unknown space `{name}`"))))?;
            let mut b = vec![0; k + 1];
            b[0] = 1;
            b[k] = 1;
            b
        }
    })
}
