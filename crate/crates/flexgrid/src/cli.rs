//! The `flexgrid` command-line front end.
//!
//! Four subcommands: `lattice` (inspect a slot-interval lattice), `rsa`
//! (replay a request trace through the layered engine), `simulate` (run
//! the dynamic-traffic simulator) and `verify` (drive the layered and
//! slot-by-slot engines in lockstep and report the check ratio).
//!
//! Machine-readable output is CSV or DOT; human-readable remarks go to
//! standard error. Exit codes are a stable contract: 0 success, 1 input
//! error, 2 argument error, 3 verification failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::lattice::{Lattice, RequestPattern};
use crate::rsa::{decision_log_csv, parse_trace, EngineChoice, RsaError};
use crate::sim::{replay_trace, SimConfig, SimError, Simulation, TopologySource};
use crate::topology::Topology;

#[derive(Parser)]
#[command(
    name = "flexgrid",
    version,
    about = "Layered-model RSA for flexible-grid networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print lattice statistics and optionally export the Hasse diagram.
    Lattice {
        /// Request pattern, e.g. uniform:4 or pow2:2.
        #[arg(long)]
        pattern: RequestPattern,
        /// Slots per link.
        #[arg(short = 'T', long = "slots")]
        slots: usize,
        /// Write the Hasse diagram as DOT to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Print `nodes=... levels=...` to stdout (default without --dot).
        #[arg(long)]
        stats: bool,
    },
    /// Replay a request trace through the layered engine and write the
    /// decision log.
    Rsa {
        /// Topology file: one link per line, two node labels.
        #[arg(long)]
        topology: PathBuf,
        #[arg(long)]
        pattern: RequestPattern,
        #[arg(short = 'T', long = "slots")]
        slots: usize,
        /// Trace file (id,event,src,dst,b).
        #[arg(long)]
        trace: PathBuf,
        /// Decision log output (id,decision,start_slot,path).
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the dynamic-traffic simulator.
    Simulate {
        /// key=value config file.
        #[arg(long)]
        config: PathBuf,
        /// Metrics CSV output.
        #[arg(long)]
        out: PathBuf,
        /// Optional per-event log CSV.
        #[arg(long)]
        events: Option<PathBuf>,
    },
    /// Run both engines on one random trace; fail on any disagreement.
    Verify {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long)]
        pattern: RequestPattern,
        #[arg(short = 'T', long = "slots")]
        slots: usize,
        /// Number of requests to offer.
        #[arg(long, default_value_t = 1000)]
        requests: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Poisson arrival rate.
        #[arg(long, default_value_t = 1.0)]
        arrival_rate: f64,
        /// Mean exponential holding time.
        #[arg(long, default_value_t = 100.0)]
        mean_holding: f64,
    },
}

enum Failure {
    /// Unreadable or malformed input files: exit 1.
    Input(String),
    /// Structurally valid flags with invalid values: exit 2.
    Args(String),
    /// Engine disagreement: exit 3.
    Verify(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Args(_) => 2,
            Failure::Verify(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Args(m) | Failure::Verify(m) => m,
        }
    }
}

impl From<SimError> for Failure {
    fn from(err: SimError) -> Self {
        match err {
            SimError::Rsa(RsaError::EngineMismatch { .. }) => Failure::Verify(err.to_string()),
            // Flag-level pattern/slot validation happens before any run,
            // so an invalid pattern surfacing here came from an input file.
            other => Failure::Input(other.to_string()),
        }
    }
}

/// Entry point for the `flexgrid` binary. Argument syntax errors exit
/// with code 2 via clap.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Lattice {
            pattern,
            slots,
            dot,
            stats,
        } => cmd_lattice(pattern, slots, dot.as_deref(), stats),
        Command::Rsa {
            topology,
            pattern,
            slots,
            trace,
            out,
        } => cmd_rsa(&topology, pattern, slots, &trace, &out),
        Command::Simulate {
            config,
            out,
            events,
        } => cmd_simulate(&config, &out, events.as_deref()),
        Command::Verify {
            topology,
            pattern,
            slots,
            requests,
            seed,
            arrival_rate,
            mean_holding,
        } => cmd_verify(
            &topology,
            pattern,
            slots,
            requests,
            seed,
            arrival_rate,
            mean_holding,
        ),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn load_topology(path: &Path) -> Result<Topology, Failure> {
    let text = read_file(path)?;
    let topology =
        Topology::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    if !topology.is_connected() {
        eprintln!("warning: topology {} is not connected", path.display());
    }
    Ok(topology)
}

fn cmd_lattice(
    pattern: RequestPattern,
    slots: usize,
    dot: Option<&Path>,
    stats: bool,
) -> Result<(), Failure> {
    let lattice = Lattice::build(pattern, slots).map_err(|e| Failure::Args(e.to_string()))?;
    if stats || dot.is_none() {
        let levels = lattice
            .levels()
            .iter()
            .map(|&w| format!("{w}:{}", lattice.level_nodes(w).unwrap().len()))
            .collect::<Vec<_>>()
            .join(",");
        println!("nodes={} levels={levels}", lattice.len());
    }
    if let Some(path) = dot {
        write_file(path, &lattice.to_dot())?;
        eprintln!("wrote Hasse diagram to {}", path.display());
    }
    Ok(())
}

fn cmd_rsa(
    topology_path: &Path,
    pattern: RequestPattern,
    slots: usize,
    trace_path: &Path,
    out: &Path,
) -> Result<(), Failure> {
    pattern
        .validate(slots)
        .map_err(|e| Failure::Args(e.to_string()))?;
    load_topology(topology_path)?;

    let trace_text = read_file(trace_path)?;
    let events = parse_trace(&trace_text)
        .map_err(|e| Failure::Input(format!("{}: {e}", trace_path.display())))?;

    let mut config = SimConfig::new(TopologySource::File(topology_path.to_path_buf()));
    config.pattern = pattern;
    config.slot_count = slots;
    config.engine = EngineChoice::Layered;

    let output = replay_trace(&config, &events)?;
    write_file(out, &decision_log_csv(&output.decisions))?;
    eprintln!(
        "replayed {} events: {} admitted, {} blocked",
        events.len(),
        output.metrics.offered - output.metrics.blocked,
        output.metrics.blocked
    );
    Ok(())
}

fn cmd_simulate(config_path: &Path, out: &Path, events: Option<&Path>) -> Result<(), Failure> {
    let config_text = read_file(config_path)?;
    let config = SimConfig::parse(&config_text)
        .map_err(|e| Failure::Input(format!("{}: {e}", config_path.display())))?;
    if !config.load_topology()?.is_connected() {
        eprintln!("warning: simulation topology is not connected");
    }

    let mut sim = Simulation::new(config)?;
    if events.is_some() {
        sim.enable_event_log();
    }
    let metrics = sim.run()?;
    write_file(out, &metrics.to_csv())?;
    if let Some(events_path) = events {
        write_file(
            events_path,
            &sim.event_log_csv().expect("recording enabled"),
        )?;
    }
    eprintln!(
        "offered {} requests, blocking probability {:.6}",
        metrics.offered, metrics.blocking_probability
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    topology_path: &Path,
    pattern: RequestPattern,
    slots: usize,
    requests: u64,
    seed: u64,
    arrival_rate: f64,
    mean_holding: f64,
) -> Result<(), Failure> {
    pattern
        .validate(slots)
        .map_err(|e| Failure::Args(e.to_string()))?;
    load_topology(topology_path)?;

    let mut config = SimConfig::new(TopologySource::File(topology_path.to_path_buf()));
    config.pattern = pattern;
    config.slot_count = slots;
    config.engine = EngineChoice::Both;
    config.num_requests = requests;
    config.seed = seed;
    config.arrival_rate = arrival_rate;
    config.mean_holding = mean_holding;
    config.validate()?;

    match run_verify(config) {
        Ok(ratio) => {
            println!("mismatches=0 ratio={ratio:.6}");
            Ok(())
        }
        Err(SimError::Rsa(RsaError::EngineMismatch {
            id,
            layered,
            oracle,
        })) => {
            eprintln!("first diverging step: request {id}");
            eprintln!("  layered: {layered:?}");
            eprintln!("  oracle:  {oracle:?}");
            Err(Failure::Verify(format!("engines disagree on request {id}")))
        }
        Err(other) => Err(other.into()),
    }
}

fn run_verify(config: SimConfig) -> Result<f64, SimError> {
    let mut sim = Simulation::new(config)?;
    let metrics = sim.run()?;
    if metrics.layered_checks == 0 {
        return Err(SimError::Rsa(RsaError::NoChecks));
    }
    Ok(metrics.oracle_checks as f64 / metrics.layered_checks as f64)
}
