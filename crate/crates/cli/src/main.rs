//! `dilatox`: evaluate dilatation functionals, run the inequality suite,
//! summarise limit proxies and solve radial Beltrami equations.
//!
//! Exit codes: 0 all checks hold, 1 an inequality is violated, 2 bad
//! configuration, 3 numerical failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{AsymArgs, BeltramiArgs, EvalArgs, VerifyArgs};
use dilatox_core::Error;

#[derive(Parser)]
#[command(
    name = "dilatox",
    version,
    about = "Numerics for the p-angular dilatation of planar maps",
    after_help = "Exit codes: 0 all checks hold, 1 inequality violated, 2 configuration error, \
                  3 numerical failure.\n\nThe environment variable DILATOX_SEED is reserved for \
                  future stochastic features and is currently ignored."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate D_p, disc means, area, length and modulus bounds on the ladder.
    Eval(EvalArgs),
    /// Run the inequality checks and write the verification matrix.
    Verify(VerifyArgs),
    /// Summarise limit proxies and the asymptotic bounds.
    Asym(AsymArgs),
    /// Solve the radial Beltrami equation and check the growth bound.
    Beltrami(BeltramiArgs),
}

/// Whether a run ended with every check holding.
pub enum Verdict {
    Holds,
    Violated,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidRadius(_)
        | Error::InvalidOrder(..)
        | Error::EmptyRange { .. }
        | Error::InvalidConfig(_)
        | Error::InvalidProfile(_)
        | Error::OutsideProfile(_)
        | Error::UnknownModel(_)
        | Error::BadParameter(_)
        | Error::Csv(_)
        | Error::Json(_)
        | Error::Io(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(a) => commands::eval(a),
        Command::Verify(a) => commands::verify(a),
        Command::Asym(a) => commands::asym(a),
        Command::Beltrami(a) => commands::beltrami(a),
    };
    match result {
        Ok(Verdict::Holds) => ExitCode::SUCCESS,
        Ok(Verdict::Violated) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
