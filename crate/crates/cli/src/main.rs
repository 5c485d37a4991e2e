use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use chancert::correlations::WitnessSet;
use chancert_cli::commands::{self, CertifySet, Context, Example, SeesawArgs};
use chancert_cli::{CliError, Output};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chancert", version, about = "Certify nonlocality of bipartite quantum channels")]
struct Cli {
    /// Worker threads for grid commands (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check CPTP, QNS, superchannel or other invariants of a file.
    Validate { path: PathBuf },
    /// Emit the decoherent action (stochastic matrix) of a channel.
    Decohere { path: PathBuf },
    /// Membership test for a distribution, or for a channel's decoherent action.
    Certify {
        path: PathBuf,
        #[arg(long, value_enum)]
        set: CertifySet,
    },
    /// Evaluate Tr(J W) for the witness built from a Bell functional.
    Witness {
        path: PathBuf,
        /// `chsh` or a functional file.
        #[arg(long, default_value = "chsh")]
        functional: String,
        /// L, Q or NS.
        #[arg(long, default_value = "L")]
        set: WitnessSet,
    },
    /// Negativity of the dephased |++> state on a p, q grid (CSV).
    NoiseSweep {
        #[arg(long, default_value_t = 101)]
        resolution: usize,
    },
    /// Region labels on the s R + t S + (1 - s - t) 1 cross section (CSV).
    CrossSection {
        #[arg(long, default_value_t = 201)]
        resolution: usize,
    },
    /// Run a measurement protocol on a channel.
    Simulate {
        protocol: PathBuf,
        #[arg(long)]
        channel: Option<PathBuf>,
    },
    /// See-saw lower bound on the Bell value reachable with fixed inputs.
    Seesaw {
        channel: PathBuf,
        inputs: PathBuf,
        #[arg(long, default_value = "chsh")]
        functional: String,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        max_sweeps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build the LOSE channel realising a quantum strategy.
    LoseFromStrategy { path: PathBuf },
    /// Print one of the built-in example files.
    Example {
        #[arg(value_enum)]
        name: Example,
    },
}

fn run(cli: &Cli, ctx: &Context) -> Result<Output, CliError> {
    match &cli.command {
        Command::Validate { path } => commands::validate(ctx, path),
        Command::Decohere { path } => commands::decohere(path),
        Command::Certify { path, set } => commands::certify(ctx, path, *set),
        Command::Witness { path, functional, set } => commands::witness(ctx, path, functional, *set),
        Command::NoiseSweep { resolution } => commands::noise_sweep(*resolution),
        Command::CrossSection { resolution } => commands::cross_section(*resolution),
        Command::Simulate { protocol, channel } => commands::simulate(protocol, channel.as_deref()),
        Command::Seesaw { channel, inputs, functional, restarts, max_sweeps, seed } => commands::seesaw(
            ctx,
            &SeesawArgs {
                channel,
                inputs,
                functional,
                restarts: *restarts,
                max_sweeps: *max_sweeps,
                seed: *seed,
            },
        ),
        Command::LoseFromStrategy { path } => commands::lose_from_strategy(path),
        Command::Example { name } => commands::example(*name),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(chancert_cli::EXIT_INPUT_ERROR as u8);
        }
    }
    let ctx = Context::new(std::env::args().collect());
    match run(&cli, &ctx) {
        Ok(out) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &out.stdout),
                None => std::io::stdout().write_all(out.stdout.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(chancert_cli::EXIT_INPUT_ERROR as u8);
            }
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
