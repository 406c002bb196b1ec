//! `prym`: invariants, fiber samples, curve equations and exact verification
//! for the degree-4 Prym map of genus-2 curves. Data goes to stdout, logs to
//! stderr.

mod commands;
mod parse;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{CliError, Output};

#[derive(Parser, Debug)]
#[command(name = "prym", version, about = "Degree-4 Prym map of genus-2 curves")]
struct Cli {
    /// Tolerances as "abs,rel"; overrides PRYM_TOL.
    #[arg(long, global = true)]
    tol: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Prym descriptor (j-invariants and canonical λ-pair) of a moduli point.
    Invariants {
        /// Triple "re,im;re,im;re,im".
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Seeded sample of the fiber over a λ-pair.
    Fiber {
        #[arg(long, allow_hyphen_values = true)]
        l1: String,
        #[arg(long, allow_hyphen_values = true)]
        l2: String,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        out: Format,
    },
    /// Branch loci of the curves attached to a cover.
    Curves {
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        /// Signs of (t1, t2, t3), e.g. "+,-,+".
        #[arg(long, allow_hyphen_values = true, default_value = "+,+,+")]
        signs: String,
    },
    /// Run a verification suite; exits 1 if any assertion fails.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

fn dispatch(cli: Cli) -> Result<Output, CliError> {
    let cfg = parse::tolerance(cli.tol.as_deref(), std::env::var("PRYM_TOL").ok().as_deref())?;
    match cli.command {
        Command::Invariants { t } => commands::invariants(&t, &cfg),
        Command::Fiber { l1, l2, count, seed, out } => {
            commands::fiber(&l1, &l2, count, seed, out == Format::Csv, &cfg)
        }
        Command::Curves { t, signs } => commands::curves(&t, &signs, &cfg),
        Command::Verify { suite, seed, samples } => commands::verify(&suite, seed, samples, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.exit)
        }
        Err(e) => {
            eprintln!("error: {}: {}", e.code, e.message);
            println!("{}", e.to_json());
            ExitCode::from(e.exit)
        }
    }
}
