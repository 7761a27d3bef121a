//! `nsa`: batch front end for type checking, interpretation, normalization,
//! numeric verification and the fixture corpus.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nsa_core::verifier::DEFAULT_SEED;

#[derive(Parser, Debug)]
#[command(name = "nsa", version, about = "Term extraction workbench")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Input file or directory.
    #[arg(long = "in", global = true, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Write results here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 100)]
    pub trials: u64,
    /// Extra declarations `NAME:TYPE` for free names in the input.
    #[arg(long = "decl", global = true, value_name = "NAME:TYPE")]
    pub decls: Vec<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    JsonLines,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and type-check a formula file.
    Typecheck,
    /// Interpret a formula file and print the raw and simplified results.
    Ust,
    /// Rewrite a formula file to normal form.
    Normalform {
        /// Print every rewrite step.
        #[arg(long)]
        trace: bool,
        /// Step budget.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, value_enum)]
        role: Option<RoleArg>,
        /// Rule order: `default` or `eager-bounds`.
        #[arg(long, default_value = "default")]
        strategy: String,
    },
    /// Check an extracted bound numerically.
    Verify {
        #[command(subcommand)]
        theorem: Theorem,
    },
    /// Reproduce every fixture against its golden transcript.
    Corpus {
        /// A category (`pipeline`, `ust`) or a fixture name.
        #[arg(long)]
        only: Option<String>,
        /// Rewrite the golden transcripts under `--in` instead of comparing.
        #[arg(long)]
        bless: bool,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum RoleArg {
    Hypothesis,
    Claim,
}

#[derive(Args, Debug, Clone)]
pub struct FnArgs {
    /// Function on [0, 1] in the expression language over `x`.
    #[arg(long = "f", value_name = "EXPR")]
    pub f: String,
    /// Modulus of uniform continuity over `k`; derived from `--f` if absent.
    #[arg(long = "g", value_name = "EXPR")]
    pub g: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Theorem {
    /// Riemann sums over fine partitions are close.
    Cri {
        #[command(flatten)]
        func: FnArgs,
        #[arg(long, default_value_t = 10)]
        n: u64,
    },
    /// Difference quotients of the integral approximate the integrand.
    Ftc {
        #[command(flatten)]
        func: FnArgs,
        #[arg(long, default_value_t = 4)]
        k: u64,
        #[arg(long, default_value_t = 4)]
        l: u64,
    },
    /// The integral of the difference quotient approximates f(1) - f(0).
    FtcSecond {
        #[command(flatten)]
        func: FnArgs,
        #[arg(long, default_value_t = 4)]
        k: u64,
    },
    /// Modulus of the uniform limit of a sequence of functions.
    Ulc {
        /// Limit function.
        #[arg(long = "f", value_name = "EXPR")]
        f: String,
        /// Moduli of the sequence, over `n` and `k`.
        #[arg(long, value_name = "EXPR")]
        family: String,
        /// Modulus of uniform convergence.
        #[arg(long, value_name = "EXPR")]
        h: String,
        /// The sequence itself, over `n` and `x`; also checks convergence.
        #[arg(long, value_name = "EXPR")]
        sequence: Option<String>,
        #[arg(long, default_value_t = 10)]
        k: u64,
    },
    /// Approximate maximum on a grid.
    Wei {
        #[command(flatten)]
        func: FnArgs,
        #[arg(long, default_value_t = 10)]
        k: u64,
    },
    /// Approximate root by bisection on a grid.
    Ivt {
        #[command(flatten)]
        func: FnArgs,
        #[arg(long, default_value_t = 10)]
        k: u64,
    },
    /// Approximate fixed point.
    FixedPoint {
        #[command(flatten)]
        func: FnArgs,
        #[arg(long, default_value_t = 10)]
        k: u64,
    },
    /// Samples the modulus of uniform continuity itself.
    Modulus {
        #[command(flatten)]
        func: FnArgs,
        #[arg(long, default_value_t = 10)]
        k: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(commands::run(&cli))
}
