mod commands;
mod family;
mod out;

use anyhow::Result;
use clap::{Parser, Subcommand};
use family::UsageError;
use num_rational::BigRational;
use out::Format;
use std::process::ExitCode;
use twistcoef::functor::ParseError;
use twistcoef::homology::HomologyError;
use twistcoef::linalg::Ring;

/// Twisted coefficient systems on partial injections: validation,
/// invariants, decompositions and homological stability checks.
///
/// FUNCTOR is a functor file or a family spec: const:Z, partition:2,1,
/// interval:1..2, kunneth:circle,q=2, sign-attempt.
///
/// Exit codes: 0 success, 1 a check failed, 2 usage or parse error,
/// 3 a size cap was exceeded.
#[derive(Parser)]
#[command(name = "twistcoef", version)]
struct Cli {
    /// Coefficient ring: Z, Q or Fp:<p>.
    #[arg(long, global = true)]
    ring: Option<Ring>,
    /// Truncation N for built-in families; largest n used elsewhere.
    #[arg(long, global = true, default_value_t = 6)]
    trunc: usize,
    /// Largest homological degree D.
    #[arg(long, global = true, default_value_t = 2)]
    deg: usize,
    /// Seed for sampled functoriality checks.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check functoriality: exhaustively up to --bound, sampled above.
    Validate {
        functor: String,
        #[arg(long, default_value_t = 5)]
        bound: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Degree, height and the ranks of the subset decomposition.
    Invariants { functor: String },
    /// The pieces T_n[Q^delta] for n <= --max-n and the structural checks.
    Decompose {
        functor: String,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// H_d(Sigma_n; T_n) for d <= --deg, n <= --trunc, and the stabilisation maps.
    Stability { functor: String },
    /// Relation table of the Burau assignment, symbolic or at t = T0.
    Burau {
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        /// Largest exponent k in the edge relation.
        #[arg(long, default_value_t = 8)]
        k: usize,
        /// Rational value for t, e.g. 1 or -1/2.
        #[arg(long, allow_hyphen_values = true)]
        t0: Option<BigRational>,
    },
    /// Degree-zero splittings of the stabilisation maps from the tau maps.
    DoldDemo { functor: String },
    /// Print the functor in the file format.
    Export { functor: String },
}

fn run(cli: &Cli) -> Result<(String, bool)> {
    let load = |s: &str| family::load(s, cli.ring, cli.trunc);
    match &cli.cmd {
        Cmd::Validate { functor, bound, samples } => commands::validate(&load(functor)?, *bound, *samples, cli.seed, cli.format),
        Cmd::Invariants { functor } => commands::invariants(&load(functor)?, cli.format),
        Cmd::Decompose { functor, max_n } => commands::decompose(&load(functor)?, *max_n, cli.format),
        Cmd::Stability { functor } => {
            let f = load(functor)?;
            let ring = cli.ring.unwrap_or(f.functor.ring());
            commands::stability(&f, ring, cli.deg, cli.trunc, cli.format)
        }
        Cmd::Burau { max_n, k, t0 } => {
            if *max_n < 2 {
                return Err(UsageError("--max-n must be at least 2".into()).into());
            }
            commands::burau(*max_n, *k, t0.as_ref(), cli.format)
        }
        Cmd::DoldDemo { functor } => {
            let f = load(functor)?;
            let ring = cli.ring.unwrap_or(f.functor.ring());
            commands::dold_demo(&f, ring, cli.trunc, cli.format)
        }
        Cmd::Export { functor } => Ok((commands::export(&load(functor)?.functor)?, true)),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if matches!(cause.downcast_ref::<HomologyError>(), Some(HomologyError::Cap { .. })) {
            return 3;
        }
        if cause.is::<UsageError>() || cause.is::<ParseError>() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, ok)) => {
            print!("{text}");
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("error: {e:#}");
            if code == 3 {
                eprintln!("hint: lower --trunc or --deg");
            }
            ExitCode::from(code)
        }
    }
}
