//! `hypercurv`: batch driver for the curvature, mass and flow checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;
mod spec;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::output::{write_outputs, Outcome};
use crate::spec::{resolve, CliError, Common, Settings, EXIT_INVALID_SPEC};

#[derive(Parser, Debug)]
#[command(name = "hypercurv", version, about = "Numerical checks for graph hypersurfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Trace/minor identity on random matrices
    IdentityCheck(commands::identity::Args),
    /// Gauss-equation and divergence-form scalar curvature at sampled points
    Curvature(commands::curvature::Args),
    /// Level-set mean curvature inequality on sampled or traced levels
    HhrCheck(commands::hhr::Args),
    /// Sign patterns of the rotational example families
    ExamplesSweep(commands::sweep::Args),
    /// Graphical mass from boundary integrals on growing spheres
    Mass(commands::mass::Args),
    /// Boundary = interior + inner-boundary decomposition of the mass flux
    PmtCheck(commands::pmt::Args),
    /// Mean curvature flow of a surface of revolution
    Mcf(commands::mcf::Args),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::IdentityCheck(_) => "identity-check",
            Command::Curvature(_) => "curvature",
            Command::HhrCheck(_) => "hhr-check",
            Command::ExamplesSweep(_) => "examples-sweep",
            Command::Mass(_) => "mass",
            Command::PmtCheck(_) => "pmt-check",
            Command::Mcf(_) => "mcf",
        }
    }
}

/// Independent, reproducible stream for item `stream` of a run seeded with
/// `seed`.
pub fn item_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn configure_workers(flag: Option<usize>) -> Result<(), CliError> {
    let workers = match flag {
        Some(w) => Some(w),
        None => match std::env::var("HYPERCURV_WORKERS") {
            Ok(v) if !v.trim().is_empty() => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::spec(format!("HYPERCURV_WORKERS=`{v}` is not a count")))?,
            ),
            _ => None,
        },
    };
    if let Some(w) = workers {
        if w == 0 {
            return Err(CliError::spec("worker count must be at least 1"));
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    Ok(())
}

fn dispatch<A, F>(name: &str, args: &A, common: &Common, run: F) -> Result<(Outcome, Settings), CliError>
where
    A: serde::Serialize + serde::de::DeserializeOwned,
    F: FnOnce(A) -> Result<Outcome, CliError>,
{
    let (args, settings) = resolve(name, args, common)?;
    configure_workers(settings.workers)?;
    Ok((run(args)?, settings))
}

fn execute(command: &Command) -> Result<(Outcome, Settings), CliError> {
    let name = command.name();
    match command {
        Command::IdentityCheck(a) => dispatch(name, a, &a.common, commands::identity::run),
        Command::Curvature(a) => dispatch(name, a, &a.common, commands::curvature::run),
        Command::HhrCheck(a) => dispatch(name, a, &a.common, commands::hhr::run),
        Command::ExamplesSweep(a) => dispatch(name, a, &a.common, commands::sweep::run),
        Command::Mass(a) => dispatch(name, a, &a.common, commands::mass::run),
        Command::PmtCheck(a) => dispatch(name, a, &a.common, commands::pmt::run),
        Command::Mcf(a) => dispatch(name, a, &a.common, commands::mcf::run),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID_SPEC as u8 } else { 0 });
        }
    };
    let start = Instant::now();
    let code = match execute(&cli.command) {
        Ok((outcome, settings)) => {
            let written = match &settings.out {
                Some(dir) => write_outputs(dir, &outcome, settings.format),
                None => std::io::stdout()
                    .lock()
                    .write_all(outcome.report.as_bytes())
                    .map_err(|e| CliError::Io(format!("stdout: {e}"))),
            };
            match written {
                Ok(()) => {
                    eprintln!("{} (wall {:.3}s)", outcome.headline, start.elapsed().as_secs_f64());
                    output::exit_code(outcome.passed, outcome.breakdown)
                }
                Err(e) => {
                    eprintln!("hypercurv: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            eprintln!("hypercurv {}: {e}", cli.command.name());
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
