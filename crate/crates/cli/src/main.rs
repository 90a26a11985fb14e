//! `tracelab`: seeded experiment runs over the tracelab library.
//!
//! Every command writes one JSON report `{command, config, gates, result}`
//! and exits 0 when all gates pass, 1 when a gate fails, 2 on unreadable
//! input and 3 when the input violates a precondition.

mod commands;
mod inputs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;
use tracelab::{Error, Gate, Tolerance};

/// Environment variable naming the directory for reports written without `--out`.
const OUT_DIR_VAR: &str = "TRACELAB_OUT_DIR";

#[derive(Parser)]
#[command(name = "tracelab", version, about = "Finite-dimensional trace experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every command.
#[derive(Args, Serialize, Clone, Debug)]
pub struct Common {
    /// Seed for every random choice made by the command.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Residual threshold for structural checks.
    #[arg(long, default_value_t = 1e-9)]
    pub tol_structural: f64,
    /// Threshold for numerical rank decisions.
    #[arg(long, default_value_t = 1e-9)]
    pub tol_rank: f64,
    /// Report path (default: $TRACELAB_OUT_DIR/<command>.json, or ./<command>.json).
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Common {
    pub fn tolerance(&self) -> tracelab::Result<Tolerance> {
        Tolerance::new(self.tol_structural, self.tol_rank)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check that U_{k,n}, V_{k+1,n} and E_11 generate M_n for every k < n.
    GenCheck(commands::GenCheck),
    /// Decide whether a tuple of matrices generates the full matrix algebra.
    SurjectiveCheck(commands::MatrixInput),
    /// Decide whether a tuple of matrices generates a factor.
    FactorCheck(commands::MatrixInput),
    /// Approximate the midpoint of two free-group traces by a surjective representation.
    MidpointF2(commands::MidpointF2),
    /// Amplify a representation and perturb it to a surjective one.
    Amplify(commands::Amplify),
    /// Build a pair of matrix-unit systems from unitaries.
    MnmnBuild(commands::MnmnBuild),
    /// Construct the corner-amplification perturbation of a joint representation and verify it.
    MnmnPerturb(commands::MnmnPerturb),
    /// Validate a saved pair of matrix-unit systems.
    MnmnVerify(commands::MnmnVerify),
    /// Transfer channel of a pair of matrix-unit systems.
    Channel(commands::ChannelCmd),
    /// Check a channel file for unitality, trace preservation and complete positivity.
    ChannelVerify(commands::ChannelVerify),
    /// Approximate the midpoint of two channels by a surjectively factorizing channel.
    MidpointChannel(commands::MidpointChannel),
    /// Isolation gap of the trivial character of a finite group.
    EtGap(commands::EtGap),
    /// Check the trivial-weight bound on random traces of a finite group.
    EtBound(commands::EtBound),
    /// Parse, serialize and reparse a data file.
    Roundtrip(commands::Roundtrip),
}

/// What a command hands back for the report.
pub struct Outcome {
    pub gates: Vec<Gate>,
    pub result: Value,
    /// Printed to stdout.
    pub summary: String,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    config: Value,
    gates: &'a [Gate],
    result: Value,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse(_) | Error::Json(_) | Error::Io(_) | Error::InvalidTolerance(_) => 2,
        _ => 3,
    }
}

fn run(name: &str, common: &Common, config: Value, outcome: tracelab::Result<Outcome>) -> ExitCode {
    let outcome = match outcome {
        Ok(o) => o,
        Err(err) => {
            eprintln!("tracelab {name}: {err}");
            return ExitCode::from(exit_code_for(&err));
        }
    };
    let report = Report { command: name, config, gates: &outcome.gates, result: outcome.result };
    let path = common.out.clone().unwrap_or_else(|| {
        let dir = std::env::var_os(OUT_DIR_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
        dir.join(format!("{name}.json"))
    });
    let written = tracelab::io::to_json(&report).and_then(|text| tracelab::io::write_atomic(&path, text.as_bytes()));
    if let Err(err) = written {
        eprintln!("tracelab {name}: cannot write report {}: {err}", path.display());
        return ExitCode::from(exit_code_for(&err));
    }
    println!("{}", outcome.summary);
    for g in outcome.gates.iter().filter(|g| !g.pass) {
        eprintln!("gate failed: {} (value {:e}, threshold {:e})", g.name, g.value, g.threshold);
    }
    if tracelab::gate::all_pass(&outcome.gates) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

macro_rules! dispatch {
    ($name:literal, $args:expr, $f:path) => {{
        let args = $args;
        let config = serde_json::to_value(&args).expect("arguments serialize");
        run($name, &args.common, config, $f(&args))
    }};
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::GenCheck(a) => dispatch!("gen-check", a, commands::gen_check),
        Command::SurjectiveCheck(a) => dispatch!("surjective-check", a, commands::surjective_check),
        Command::FactorCheck(a) => dispatch!("factor-check", a, commands::factor_check),
        Command::MidpointF2(a) => dispatch!("midpoint-f2", a, commands::midpoint_f2),
        Command::Amplify(a) => dispatch!("amplify", a, commands::amplify),
        Command::MnmnBuild(a) => dispatch!("mnmn-build", a, commands::mnmn_build),
        Command::MnmnPerturb(a) => dispatch!("mnmn-perturb", a, commands::mnmn_perturb),
        Command::MnmnVerify(a) => dispatch!("mnmn-verify", a, commands::mnmn_verify),
        Command::Channel(a) => dispatch!("channel", a, commands::channel),
        Command::ChannelVerify(a) => dispatch!("channel-verify", a, commands::channel_verify),
        Command::MidpointChannel(a) => dispatch!("midpoint-channel", a, commands::midpoint_channel),
        Command::EtGap(a) => dispatch!("et-gap", a, commands::et_gap),
        Command::EtBound(a) => dispatch!("et-bound", a, commands::et_bound),
        Command::Roundtrip(a) => dispatch!("roundtrip", a, commands::roundtrip),
    }
}
