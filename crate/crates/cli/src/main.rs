//! `cumbounds`: coefficient tables, moment/cumulant transforms, bound reports,
//! rate constants and tail calculators.
//!
//! Exit codes: 0 success, 1 a checked inequality failed, 2 usage error.

mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "cumbounds",
    version,
    about = "Universal cumulant bounds calculator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct FormatArgs {
    /// Output format
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact coefficient masses C_n for n = 2..max-n
    Coeffs {
        /// raw, cen, sym or all-three
        #[arg(long, default_value = "all-three")]
        class: String,
        #[arg(long, default_value_t = 9)]
        max_n: usize,
        /// Add the leading-order approximant and the exact/approximant ratio
        #[arg(long)]
        asymptotic: bool,
        /// Render floats in exponent form; approximants are taken from log space
        #[arg(long)]
        scientific: bool,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Convert between raw moments and cumulants, or center raw moments
    Transform {
        /// Comma-separated raw moments m_1,m_2,... (integers, a/b or decimals)
        #[arg(
            long,
            conflicts_with = "cumulants",
            required_unless_present = "cumulants"
        )]
        moments: Option<String>,
        /// Comma-separated cumulants k_1,k_2,...
        #[arg(long)]
        cumulants: Option<String>,
        /// to-cumulants, to-moments or center; inferred from the input when omitted
        #[arg(long)]
        direction: Option<String>,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Forward bounds (and optionally converse checks) for a law or moment list
    Bound {
        /// Registry law, e.g. gaussian:sigma=1, poisson:lambda=2, rademacher
        #[arg(long, conflicts_with = "moments", required_unless_present = "moments")]
        law: Option<String>,
        /// Comma-separated raw moments
        #[arg(long)]
        moments: Option<String>,
        /// Comma-separated absolute moments E|X|^k
        #[arg(long, requires = "moments")]
        abs_moments: Option<String>,
        /// Comma-separated central absolute moments E|X - EX|^k
        #[arg(long, requires = "moments")]
        central_abs_moments: Option<String>,
        /// Declare the moment list symmetric (odd moments vanish)
        #[arg(long, requires = "moments")]
        symmetric: bool,
        /// Declare the moment list centered (m_1 = 0)
        #[arg(long, requires = "moments")]
        centered: bool,
        /// Highest order; defaults to 8 for laws and the list length otherwise
        #[arg(long)]
        max_n: Option<usize>,
        /// Add converse envelope rows |m_n| <= B_n K_n
        #[arg(long)]
        converse: bool,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Bernstein tail bounds from cumulant parameters (v, b)
    Tail {
        #[arg(long, required_unless_present = "derive", conflicts_with = "derive")]
        v: Option<f64>,
        #[arg(long, required_unless_present = "derive", conflicts_with = "derive")]
        b: Option<f64>,
        /// Comma-separated deviations x > 0
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        two_sided: bool,
        /// Derive (v', b) from "v,L" under E|X - EX|^n <= v L^(n-2)
        #[arg(long)]
        derive: Option<String>,
        /// Check the growth condition against this registry law first
        #[arg(long, requires = "derive")]
        law: Option<String>,
        /// Sweep depth for A_cen
        #[arg(long, default_value_t = 64)]
        n_max: usize,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Rate constants and the efficiency gap
    Rates {
        /// Digits after the decimal point
        #[arg(long, default_value_t = 6)]
        precision: usize,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Seeded samples and their empirical moments
    Sample {
        #[arg(long)]
        law: String,
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Forward and converse verification of every registry law
    Check {
        #[arg(long, default_value_t = 16)]
        max_n: usize,
        #[command(flatten)]
        fmt: FormatArgs,
    },
}

fn run(cli: Cli) -> Result<(output::Record, Format), commands::CliError> {
    use commands::*;
    Ok(match cli.command {
        Command::Coeffs {
            class,
            max_n,
            asymptotic,
            scientific,
            fmt,
        } => (coeffs(&class, max_n, asymptotic, scientific)?, fmt.format),
        Command::Transform {
            moments,
            cumulants,
            direction,
            fmt,
        } => (
            transform(
                moments.as_deref(),
                cumulants.as_deref(),
                direction.as_deref(),
            )?,
            fmt.format,
        ),
        Command::Bound {
            law,
            moments,
            abs_moments,
            central_abs_moments,
            symmetric,
            centered,
            max_n,
            converse,
            fmt,
        } => {
            let input = match law {
                Some(law) => BoundInput::Law(law),
                None => BoundInput::Moments {
                    moments: moments.expect("clap enforces one input"),
                    abs: abs_moments,
                    central_abs: central_abs_moments,
                    symmetric,
                    centered,
                },
            };
            (bound(input, max_n, converse)?, fmt.format)
        }
        Command::Tail {
            v,
            b,
            x,
            two_sided,
            derive,
            law,
            n_max,
            fmt,
        } => (
            tail(TailInput {
                v,
                b,
                x,
                two_sided,
                derive,
                law,
                n_max,
            })?,
            fmt.format,
        ),
        Command::Rates { precision, fmt } => (rates(precision)?, fmt.format),
        Command::Sample {
            law,
            count,
            seed,
            max_n,
            fmt,
        } => (sample(&law, count, seed, max_n)?, fmt.format),
        Command::Check { max_n, fmt } => (check(max_n)?, fmt.format),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((record, format)) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(record.render(format).as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            if record.violations.is_empty() {
                return ExitCode::SUCCESS;
            }
            for v in &record.violations {
                eprintln!("invariant violation: {v}");
            }
            ExitCode::from(1)
        }
        Err(commands::CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
