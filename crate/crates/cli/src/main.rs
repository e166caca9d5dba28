//! `bellmap`: scriptable front end to the bellmap library.
//!
//! Every invocation prints one JSON document
//! `{"status": ..., "payload": ..., "elapsed_ms": ...}` and exits with
//! 0 (ok), 2 (input, domain or bounds error) or 3 (numerical or
//! verification failure).

mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use bellmap::Error;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use commands::{parse_angle, Search3Args};

#[derive(Parser)]
#[command(
    name = "bellmap",
    version,
    about = "Bell-basis intertwiners and friends"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Worker threads for parallel sections (0 = rayon default).
    #[arg(long, env = "BELLMAP_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Bell-basis intertwiner R for n qubits.
    GenR {
        #[arg(long, default_value_t = 2)]
        qubits: usize,
        /// Comma-separated phases; a trailing `pi` multiplies by π.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_angle)]
        phases: Option<Vec<f64>>,
        /// Use the phases that solve the two-qubit problem.
        #[arg(long, conflicts_with = "phases")]
        canonical: bool,
    },
    /// Check SU(2) ⊗ SU(2) → SO(4) on seeded random pairs.
    VerifyIso {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search Bell-phase intertwiners on three qubits.
    Search3 {
        #[arg(long, default_value_t = 8)]
        grid: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Coordinate-descent sweeps per starting point.
        #[arg(long, default_value_t = 100)]
        refine: usize,
        #[arg(long, default_value_t = bellmap::phase_search::DEFAULT_TOP_K)]
        top_k: usize,
        /// Also solve the two-qubit case on a quarter-turn grid.
        #[arg(long)]
        two_qubit_sanity: bool,
    },
    /// Evaluate abelian actions for a batch of curvatures or a lattice potential.
    Yangmills {
        /// JSON file, `-` for stdin, or inline JSON.
        input: String,
        /// Coupling used for lattice input.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        coupling: f64,
        /// Wrap lattice indices instead of skipping edge sites.
        #[arg(long)]
        periodic: bool,
    },
    /// Chart identities on symmetric unitary matrices.
    Grassmann {
        #[arg(value_enum)]
        action: GrassmannAction,
        #[arg(long = "n", default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Spin representation SU(2) → SO(3) and its tensor-square identity.
    Spinrep {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GrassmannAction {
    Roundtrip,
    Transition,
}

#[derive(Serialize, Clone, Copy, PartialEq, Eq, Debug)]
#[serde(rename_all = "kebab-case")]
enum Status {
    Ok,
    DomainError,
    NumericalError,
    BoundsError,
}

impl Status {
    fn of(err: &Error) -> Self {
        match err {
            Error::Bounds(_) => Status::BoundsError,
            Error::Numerical(_) | Error::Reconstruction(_) => Status::NumericalError,
            Error::Dimension(_)
            | Error::Domain(_)
            | Error::OutOfChart(_)
            | Error::TransitionDomain(_) => Status::DomainError,
        }
    }

    fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::DomainError | Status::BoundsError => 2,
            Status::NumericalError => 3,
        }
    }
}

#[derive(Serialize)]
struct CommandResult {
    status: Status,
    payload: Value,
    elapsed_ms: f64,
}

fn emit(status: Status, payload: Value, start: Instant, pretty: bool) -> ExitCode {
    let result = CommandResult {
        status,
        payload,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    let text = output::to_string(&result, pretty).expect("JSON values serialise");
    // a closed pipe downstream is not our failure
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::from(status.exit_code())
}

fn error_payload(kind: &str, message: String) -> Value {
    json!({ "error": kind, "message": message })
}

fn run(command: Command) -> commands::CmdResult {
    match command {
        Command::GenR {
            qubits,
            phases,
            canonical,
        } => commands::gen_r(qubits, phases, canonical),
        Command::VerifyIso { samples, seed } => commands::verify_iso(samples, seed),
        Command::Search3 {
            grid,
            seed,
            refine,
            top_k,
            two_qubit_sanity,
        } => commands::search3(&Search3Args {
            grid,
            seed,
            refine,
            top_k,
            two_qubit_sanity,
        }),
        Command::Yangmills {
            input,
            coupling,
            periodic,
        } => commands::yangmills(&input, coupling, periodic),
        Command::Grassmann {
            action,
            n,
            samples,
            seed,
        } => match action {
            GrassmannAction::Roundtrip => commands::grassmann_roundtrip(n, samples, seed),
            GrassmannAction::Transition => commands::grassmann_transition(n, samples, seed),
        },
        Command::Spinrep { samples, seed } => commands::spinrep(samples, seed),
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let pretty = std::env::args().any(|a| a == "pretty" || a == "--format=pretty");
            let message = e.render().to_string();
            return emit(
                Status::DomainError,
                error_payload("usage", message.trim_end().to_owned()),
                start,
                pretty,
            );
        }
    };
    let pretty = cli.format == Format::Pretty;

    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            return emit(
                Status::DomainError,
                error_payload("threads", e.to_string()),
                start,
                pretty,
            );
        }
    }

    match run(cli.command) {
        Ok(outcome) if outcome.passed => emit(Status::Ok, outcome.payload, start, pretty),
        Ok(outcome) => emit(Status::NumericalError, outcome.payload, start, pretty),
        Err(err) => {
            let status = Status::of(&err);
            let kind = match status {
                Status::BoundsError => "bounds",
                Status::NumericalError => "numerical",
                _ => "domain",
            };
            emit(status, error_payload(kind, err.to_string()), start, pretty)
        }
    }
}
