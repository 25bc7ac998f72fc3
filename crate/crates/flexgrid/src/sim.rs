//! Dynamic-traffic discrete-event simulation and deterministic trace replay.
//!
//! Arrivals form a Poisson process (exponential inter-arrival times at
//! rate `arrival_rate`); endpoints are uniform over ordered distinct node
//! pairs; admitted connections hold their spectrum for an exponential
//! time with mean `mean_holding` and are then released. Blocked requests
//! are lost, never retried. A run is fully reproducible
//! from its seed: the generator is ChaCha8 and each random quantity gets
//! its own stream of the same seed (stream 0 inter-arrivals, 1 holding
//! times, 2 endpoints, 3 widths), with exactly one draw per request from
//! each stream, so decision sequences survive refactoring of unrelated
//! sampling.
//!
//! Utilization and fragmentation are integrated exactly between events,
//! not sampled. Per link, fragmentation is `1 - largest free contiguous
//! block / total free slots` (0 when no slots are free); the reported
//! metric averages it over links, then over time.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use thiserror::Error;

use crate::lattice::RequestPattern;
use crate::rsa::{
    ConnectionRecord, ConnectionRequest, Decision, EngineChoice, Engines, RsaError, TraceError,
    TraceEvent,
};
use crate::topology::{Topology, TopologyError};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Rsa(#[from] RsaError),
    #[error("trace event {id}: {message}")]
    Replay { id: u64, message: String },
}

/// Where the simulation's network graph comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologySource {
    File(PathBuf),
    /// Edge-list text with `;` accepted as a line separator.
    Inline(String),
}

/// Full description of one simulation run.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub slot_count: usize,
    pub pattern: RequestPattern,
    pub topology: TopologySource,
    /// Requests per time unit (Poisson rate).
    pub arrival_rate: f64,
    /// Mean of the exponential holding time.
    pub mean_holding: f64,
    pub num_requests: u64,
    /// `None` samples uniformly over the pattern's admissible widths.
    /// Explicit weights may name inadmissible widths; such requests are
    /// offered and counted as blocked.
    pub width_weights: Option<Vec<(usize, f64)>>,
    pub seed: u64,
    pub engine: EngineChoice,
}

impl SimConfig {
    pub fn new(topology: TopologySource) -> Self {
        Self {
            slot_count: 64,
            pattern: RequestPattern::uniform(4),
            topology,
            arrival_rate: 1.0,
            mean_holding: 10.0,
            num_requests: 1000,
            width_weights: None,
            seed: 1,
            engine: EngineChoice::Layered,
        }
    }

    /// Parses the flat `key=value` config format. Unknown and repeated
    /// keys are errors; `#` lines and blank lines are ignored. One of
    /// `topology_file` / `topology_inline` is required.
    pub fn parse(text: &str) -> Result<Self, SimError> {
        let mut config = Self::new(TopologySource::Inline(String::new()));
        let mut topology = None;
        let mut seen: Vec<String> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                SimError::Config(format!("line {}: expected key=value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if seen.iter().any(|k| k == key) {
                return Err(SimError::Config(format!(
                    "line {}: repeated key {key}",
                    lineno + 1
                )));
            }
            seen.push(key.to_string());

            let bad = |what: &str| SimError::Config(format!("line {}: {what}", lineno + 1));
            match key {
                "slots" => {
                    config.slot_count =
                        value.parse().map_err(|_| bad("slots must be an integer"))?
                }
                "pattern" => {
                    config.pattern = value.parse().map_err(|e| bad(&format!("{e}")))?;
                }
                "topology_file" => topology = Some(TopologySource::File(PathBuf::from(value))),
                "topology_inline" => {
                    topology = Some(TopologySource::Inline(value.replace(';', "\n")))
                }
                "arrival_rate" => {
                    config.arrival_rate = value
                        .parse()
                        .map_err(|_| bad("arrival_rate must be a number"))?
                }
                "mean_holding" => {
                    config.mean_holding = value
                        .parse()
                        .map_err(|_| bad("mean_holding must be a number"))?
                }
                "num_requests" => {
                    config.num_requests = value
                        .parse()
                        .map_err(|_| bad("num_requests must be an integer"))?
                }
                "width_weights" => {
                    let mut weights = Vec::new();
                    for part in value.split(',') {
                        let (w, weight) = part
                            .split_once(':')
                            .ok_or_else(|| bad("width_weights entries are WIDTH:WEIGHT"))?;
                        let w = w
                            .trim()
                            .parse()
                            .map_err(|_| bad("width_weights width must be an integer"))?;
                        let weight = weight
                            .trim()
                            .parse()
                            .map_err(|_| bad("width_weights weight must be a number"))?;
                        weights.push((w, weight));
                    }
                    config.width_weights = Some(weights);
                }
                "seed" => {
                    config.seed = value.parse().map_err(|_| bad("seed must be an integer"))?
                }
                "engine" => config.engine = value.parse().map_err(|e: String| bad(&e))?,
                other => return Err(bad(&format!("unknown key {other:?}"))),
            }
        }

        config.topology = topology.ok_or_else(|| {
            SimError::Config("topology_file or topology_inline is required".into())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.arrival_rate > 0.0 && self.arrival_rate.is_finite()) {
            return Err(SimError::Config("arrival_rate must be positive".into()));
        }
        if !(self.mean_holding > 0.0 && self.mean_holding.is_finite()) {
            return Err(SimError::Config("mean_holding must be positive".into()));
        }
        if self.num_requests < 1 {
            return Err(SimError::Config("num_requests must be at least 1".into()));
        }
        if let Some(weights) = &self.width_weights {
            if weights.is_empty() {
                return Err(SimError::Config("width_weights must not be empty".into()));
            }
            if weights.iter().any(|&(w, weight)| w == 0 || weight < 0.0) {
                return Err(SimError::Config(
                    "width_weights need positive widths and nonnegative weights".into(),
                ));
            }
            if weights.iter().all(|&(_, weight)| weight == 0.0) {
                return Err(SimError::Config(
                    "width_weights must not all be zero".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn load_topology(&self) -> Result<Topology, SimError> {
        let text = match &self.topology {
            TopologySource::File(path) => {
                std::fs::read_to_string(path).map_err(|e| SimError::Io {
                    path: path.display().to_string(),
                    message: e.to_string(),
                })?
            }
            TopologySource::Inline(text) => text.clone(),
        };
        Ok(Topology::parse(&text)?)
    }
}

/// Aggregate results of a run or replay.
#[derive(Debug, Clone, PartialEq)]
pub struct SimMetrics {
    pub offered: u64,
    pub blocked: u64,
    pub blocking_probability: f64,
    pub mean_slot_utilization: f64,
    pub mean_fragmentation: f64,
    pub layered_checks: u64,
    pub oracle_checks: u64,
}

pub const METRICS_HEADER: &str =
    "offered,blocked,blocking_probability,mean_slot_utilization,mean_fragmentation,layered_checks,oracle_checks";

impl SimMetrics {
    /// Single-row CSV with header.
    pub fn to_csv(&self) -> String {
        format!(
            "{METRICS_HEADER}\n{},{},{:.6},{:.6},{:.6},{},{}\n",
            self.offered,
            self.blocked,
            self.blocking_probability,
            self.mean_slot_utilization,
            self.mean_fragmentation,
            self.layered_checks,
            self.oracle_checks,
        )
    }
}

pub const EVENT_LOG_HEADER: &str = "timestamp,event,id,decision,start_slot";

#[derive(Debug, Clone)]
struct EventLogRow {
    timestamp: f64,
    kind: &'static str,
    id: u64,
    decision: &'static str,
    start_slot: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EventKind {
    Arrival {
        src: usize,
        dst: usize,
        width: usize,
    },
    Departure,
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    seq: u64,
    id: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}
impl Eq for Event {}
impl Ord for Event {
    // Reversed for the max-heap: earliest time first, schedule order on ties.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Tracks per-link fragmentation and the occupied `(link, slot)` count,
/// with time integration between events.
struct MetricTracker {
    slot_count: usize,
    link_count: usize,
    frag: Vec<f64>,
    frag_sum: f64,
    occupied_pairs: u64,
    util_area: f64,
    frag_area: f64,
    last_time: f64,
}

impl MetricTracker {
    fn new(slot_count: usize, link_count: usize) -> Self {
        Self {
            slot_count,
            link_count,
            frag: vec![0.0; link_count],
            frag_sum: 0.0,
            occupied_pairs: 0,
            util_area: 0.0,
            frag_area: 0.0,
            last_time: 0.0,
        }
    }

    fn advance_to(&mut self, time: f64) {
        let dt = time - self.last_time;
        let capacity = (self.link_count * self.slot_count) as f64;
        if capacity > 0.0 {
            self.util_area += dt * self.occupied_pairs as f64 / capacity;
            self.frag_area += dt * self.frag_sum / self.link_count as f64;
        }
        self.last_time = time;
    }

    /// Re-derives the fragmentation of `record.path`'s links after a
    /// setup (`occupied = true`) or teardown, reading slot occupancy
    /// through `slot_free`.
    fn apply(
        &mut self,
        record: &ConnectionRecord,
        occupied: bool,
        slot_free: impl Fn(usize, usize) -> bool,
    ) {
        let pairs = (record.interval.width() * record.path.len()) as u64;
        if occupied {
            self.occupied_pairs += pairs;
        } else {
            self.occupied_pairs -= pairs;
        }
        for &link in &record.path {
            let mut total_free = 0usize;
            let mut largest = 0usize;
            let mut run = 0usize;
            for slot in 0..self.slot_count {
                if slot_free(link, slot) {
                    total_free += 1;
                    run += 1;
                    largest = largest.max(run);
                } else {
                    run = 0;
                }
            }
            let value = if total_free == 0 {
                0.0
            } else {
                1.0 - largest as f64 / total_free as f64
            };
            self.frag_sum += value - self.frag[link];
            self.frag[link] = value;
        }
    }

    fn finish(&self, offered: u64, blocked: u64, engines: &Engines) -> SimMetrics {
        let horizon = self.last_time;
        let (util, frag) = if horizon > 0.0 {
            (self.util_area / horizon, self.frag_area / horizon)
        } else {
            (0.0, 0.0)
        };
        SimMetrics {
            offered,
            blocked,
            blocking_probability: if offered > 0 {
                blocked as f64 / offered as f64
            } else {
                0.0
            },
            mean_slot_utilization: util,
            mean_fragmentation: frag,
            layered_checks: engines.layered_checks(),
            oracle_checks: engines.oracle_checks(),
        }
    }
}

fn record_slot_free(engines: &Engines) -> impl Fn(usize, usize) -> bool + '_ {
    move |link, slot| match engines.layered() {
        Some(layered) => layered.state().slot_free(link, slot),
        None => engines
            .oracle()
            .expect("at least one engine")
            .state()
            .slot_free(link, slot),
    }
}

/// Routes a request, treating an inadmissible width as an offered-and-
/// blocked request rather than an error; traffic generators and traces
/// are allowed to ask for widths the pattern cannot host.
fn route_or_block(
    engines: &mut Engines,
    pattern: RequestPattern,
    req: &ConnectionRequest,
) -> Result<Option<ConnectionRecord>, RsaError> {
    if !pattern.is_admissible(req.width) {
        return Ok(None);
    }
    engines.route(req)
}

/// One dynamic-traffic run over its own engines and RNG streams.
pub struct Simulation {
    config: SimConfig,
    topology: Arc<Topology>,
    engines: Engines,
    event_log: Option<Vec<EventLogRow>>,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self, SimError> {
        config.validate()?;
        let topology = Arc::new(config.load_topology()?);
        if topology.node_count() < 2 {
            return Err(SimError::Config(
                "topology needs at least 2 nodes to form requests".into(),
            ));
        }
        let engines = Engines::new(
            config.engine,
            config.pattern,
            config.slot_count,
            Arc::clone(&topology),
        )?;
        Ok(Self {
            config,
            topology,
            engines,
            event_log: None,
        })
    }

    /// Record a per-event log row for every arrival and departure.
    pub fn enable_event_log(&mut self) {
        self.event_log = Some(Vec::new());
    }

    pub fn engines(&self) -> &Engines {
        &self.engines
    }

    pub fn topology(&self) -> &Arc<Topology> {
        &self.topology
    }

    /// Runs to completion: `num_requests` arrivals plus the departures of
    /// everything admitted, so the network drains back to empty. Counters
    /// and the event log restart on entry, so a second `run` replays the
    /// identical traffic.
    pub fn run(&mut self) -> Result<SimMetrics, SimError> {
        self.engines.reset_checks();
        if let Some(log) = &mut self.event_log {
            log.clear();
        }
        let config = &self.config;
        let substream = |n: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(n);
            rng
        };
        let mut arrival_rng = substream(0);
        let mut holding_rng = substream(1);
        let mut endpoint_rng = substream(2);
        let mut width_rng = substream(3);

        let interarrival = Exp::new(config.arrival_rate)
            .map_err(|e| SimError::Config(format!("arrival_rate: {e}")))?;
        let holding = Exp::new(1.0 / config.mean_holding)
            .map_err(|e| SimError::Config(format!("mean_holding: {e}")))?;

        let admissible = config.pattern.admissible_widths();
        let weighted = match &config.width_weights {
            Some(weights) => {
                let dist = rand::distributions::WeightedIndex::new(weights.iter().map(|&(_, w)| w))
                    .map_err(|e| SimError::Config(format!("width_weights: {e}")))?;
                Some((dist, weights.iter().map(|&(w, _)| w).collect::<Vec<_>>()))
            }
            None => None,
        };
        let node_count = self.topology.node_count();

        let mut heap: BinaryHeap<Event> = BinaryHeap::new();
        let mut seq = 0u64;
        let mut schedule = |heap: &mut BinaryHeap<Event>, time, id, kind| {
            heap.push(Event {
                time,
                seq,
                id,
                kind,
            });
            seq += 1;
        };

        // Exactly one draw per request and stream, in request order.
        let next_arrival = |time: f64,
                            arrival_rng: &mut ChaCha8Rng,
                            endpoint_rng: &mut ChaCha8Rng,
                            width_rng: &mut ChaCha8Rng| {
            let at = time + interarrival.sample(arrival_rng);
            let pair = endpoint_rng.gen_range(0..node_count * (node_count - 1));
            let src = pair / (node_count - 1);
            let rest = pair % (node_count - 1);
            let dst = rest + usize::from(rest >= src);
            let width = match &weighted {
                Some((dist, widths)) => widths[dist.sample(width_rng)],
                None => admissible[width_rng.gen_range(0..admissible.len())],
            };
            (at, EventKind::Arrival { src, dst, width })
        };

        let mut offered = 0u64;
        let mut blocked = 0u64;
        let mut tracker = MetricTracker::new(config.slot_count, self.topology.link_count());
        let num_requests = config.num_requests;
        let pattern = config.pattern;

        let (at, kind) = next_arrival(0.0, &mut arrival_rng, &mut endpoint_rng, &mut width_rng);
        schedule(&mut heap, at, 1, kind);
        let mut generated = 1u64;

        while let Some(event) = heap.pop() {
            tracker.advance_to(event.time);
            match event.kind {
                EventKind::Arrival { src, dst, width } => {
                    offered += 1;
                    let hold = holding.sample(&mut holding_rng);
                    let req = ConnectionRequest {
                        id: event.id,
                        src,
                        dst,
                        width,
                    };
                    let outcome = route_or_block(&mut self.engines, pattern, &req)?;
                    let (decision, start_slot) = match outcome {
                        Some(record) => {
                            self.engines.setup(&record)?;
                            tracker.apply(&record, true, record_slot_free(&self.engines));
                            schedule(&mut heap, event.time + hold, event.id, EventKind::Departure);
                            ("admit", Some(record.interval.start()))
                        }
                        None => {
                            blocked += 1;
                            ("block", None)
                        }
                    };
                    if let Some(log) = &mut self.event_log {
                        log.push(EventLogRow {
                            timestamp: event.time,
                            kind: "arrive",
                            id: event.id,
                            decision,
                            start_slot,
                        });
                    }
                    if generated < num_requests {
                        generated += 1;
                        let (at, kind) = next_arrival(
                            event.time,
                            &mut arrival_rng,
                            &mut endpoint_rng,
                            &mut width_rng,
                        );
                        schedule(&mut heap, at, generated, kind);
                    }
                }
                EventKind::Departure => {
                    let record = self.engines.teardown(event.id)?;
                    tracker.apply(&record, false, record_slot_free(&self.engines));
                    if let Some(log) = &mut self.event_log {
                        log.push(EventLogRow {
                            timestamp: event.time,
                            kind: "depart",
                            id: event.id,
                            decision: "",
                            start_slot: None,
                        });
                    }
                }
            }
        }

        Ok(tracker.finish(offered, blocked, &self.engines))
    }

    /// The recorded per-event log as CSV, if recording was enabled.
    pub fn event_log_csv(&self) -> Option<String> {
        self.event_log.as_ref().map(|rows| {
            let mut out = String::from(EVENT_LOG_HEADER);
            out.push('\n');
            for row in rows {
                let start = row.start_slot.map(|s| s.to_string()).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{:.6},{},{},{},{start}",
                    row.timestamp, row.kind, row.id, row.decision
                );
            }
            out
        })
    }
}

/// One-shot convenience wrapper around [`Simulation`].
pub fn run_simulation(config: SimConfig) -> Result<SimMetrics, SimError> {
    Simulation::new(config)?.run()
}

/// Decisions and metrics of a deterministic replay.
#[derive(Debug, Clone)]
pub struct ReplayOutput {
    pub decisions: Vec<Decision>,
    pub metrics: SimMetrics,
    pub final_dump: Option<String>,
}

/// Replays a parsed trace with no randomness: every `arrive` is routed in
/// file order, every `depart` releases a previously admitted id. Since
/// traces carry no timestamps, each event advances time by one unit for
/// the integrated metrics.
pub fn replay_trace(config: &SimConfig, events: &[TraceEvent]) -> Result<ReplayOutput, SimError> {
    let topology = Arc::new(config.load_topology()?);
    let mut engines = Engines::new(
        config.engine,
        config.pattern,
        config.slot_count,
        Arc::clone(&topology),
    )?;

    let mut decisions = Vec::new();
    let mut tracker = MetricTracker::new(config.slot_count, topology.link_count());
    let mut offered = 0u64;
    let mut blocked = 0u64;
    let mut seen: HashSet<u64> = HashSet::new();
    let mut now = 0.0;

    for event in events {
        now += 1.0;
        tracker.advance_to(now);
        match event {
            TraceEvent::Arrive {
                id,
                src,
                dst,
                width,
            } => {
                if !seen.insert(*id) {
                    return Err(SimError::Replay {
                        id: *id,
                        message: "arrive id reused".into(),
                    });
                }
                let resolve = |label: &str| {
                    topology.node_index(label).ok_or_else(|| SimError::Replay {
                        id: *id,
                        message: format!("unknown node label {label:?}"),
                    })
                };
                let req = ConnectionRequest {
                    id: *id,
                    src: resolve(src)?,
                    dst: resolve(dst)?,
                    width: *width,
                };
                offered += 1;
                let outcome = route_or_block(&mut engines, config.pattern, &req)?;
                if let Some(record) = &outcome {
                    engines.setup(record)?;
                    tracker.apply(record, true, record_slot_free(&engines));
                } else {
                    blocked += 1;
                }
                decisions.push(Decision::from_outcome(
                    *id,
                    req.src,
                    outcome.as_ref(),
                    &topology,
                ));
            }
            TraceEvent::Depart { id } => {
                let record = engines.teardown(*id).map_err(|e| match e {
                    RsaError::UnknownConnection(_) => SimError::Replay {
                        id: *id,
                        message: "depart does not reference an admitted connection".into(),
                    },
                    other => SimError::Rsa(other),
                })?;
                tracker.apply(&record, false, record_slot_free(&engines));
            }
        }
    }

    let metrics = tracker.finish(offered, blocked, &engines);
    let final_dump = engines.layered().map(|e| e.state().dump());
    Ok(ReplayOutput {
        decisions,
        metrics,
        final_dump,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rsa::parse_trace;

    const FOUR_NODE_INLINE: &str = "topology_inline=W N;N S;N E;W E";

    fn four_node_config() -> SimConfig {
        SimConfig::parse(&format!("{FOUR_NODE_INLINE}\nslots=4\npattern=uniform:4\n")).unwrap()
    }

    #[test]
    fn config_parse_full_and_defaults() {
        let text = "\
# comment
slots=32
pattern=pow2:3
topology_inline=A B;B C
arrival_rate=2.5
mean_holding=4.0
num_requests=500
width_weights=1:1,2:0.5,8:0.25
seed=99
engine=both
";
        let config = SimConfig::parse(text).unwrap();
        assert_eq!(config.slot_count, 32);
        assert_eq!(config.pattern, RequestPattern::pow2(3));
        assert_eq!(config.arrival_rate, 2.5);
        assert_eq!(config.num_requests, 500);
        assert_eq!(
            config.width_weights,
            Some(vec![(1, 1.0), (2, 0.5), (8, 0.25)])
        );
        assert_eq!(config.seed, 99);
        assert_eq!(config.engine, EngineChoice::Both);

        let with_defaults = SimConfig::parse("topology_inline=A B").unwrap();
        assert_eq!(with_defaults.slot_count, 64);
        assert_eq!(with_defaults.pattern, RequestPattern::uniform(4));
        assert_eq!(with_defaults.seed, 1);
        assert_eq!(with_defaults.engine, EngineChoice::Layered);
    }

    #[test]
    fn config_parse_rejects_bad_input() {
        for bad in [
            "slots=4",                                    // no topology
            "topology_inline=A B\nslots=four",            // bad value
            "topology_inline=A B\nmystery=1",             // unknown key
            "topology_inline=A B\nseed=1\nseed=2",        // repeated key
            "topology_inline=A B\narrival_rate=0",        // invariant
            "topology_inline=A B\nmean_holding=-2",       // invariant
            "topology_inline=A B\nnum_requests=0",        // invariant
            "topology_inline=A B\nwidth_weights=1:0,2:0", // all-zero weights
            "topology_inline=A B\nwidth_weights=0:1",     // zero width
            "topology_inline=A B\nwidth_weights=2:-1",    // negative weight
            "topology_inline=A B\nnonsense",              // not key=value
        ] {
            assert!(
                matches!(SimConfig::parse(bad), Err(SimError::Config(_))),
                "accepted {bad:?}"
            );
        }
    }

    #[test]
    fn trivial_load_never_blocks() {
        let mut config = four_node_config();
        config.mean_holding = 1e-9;
        config.num_requests = 200;
        config.engine = EngineChoice::Both;
        let mut sim = Simulation::new(config).unwrap();
        let metrics = sim.run().unwrap();
        assert_eq!(metrics.blocked, 0);
        assert_eq!(metrics.blocking_probability, 0.0);
        assert_eq!(metrics.offered, 200);

        // Drained: the final state equals a fresh one.
        assert_eq!(sim.engines().active_count(), 0);
        let dump = sim.engines().layered().unwrap().state().dump();
        assert!(dump.lines().all(|l| l.ends_with(" 1111")));
    }

    #[test]
    fn infeasible_width_blocks_everything() {
        let mut config = four_node_config();
        config.width_weights = Some(vec![(9, 1.0)]);
        config.num_requests = 50;
        let metrics = run_simulation(config).unwrap();
        assert_eq!(metrics.blocking_probability, 1.0);
        assert_eq!(metrics.blocked, 50);
    }

    #[test]
    fn fixed_seed_reproduces_everything() {
        let mut config = four_node_config();
        config.num_requests = 300;
        config.mean_holding = 3.0;
        config.engine = EngineChoice::Both;

        let run = |config: SimConfig| {
            let mut sim = Simulation::new(config).unwrap();
            sim.enable_event_log();
            let metrics = sim.run().unwrap();
            (metrics.to_csv(), sim.event_log_csv().unwrap())
        };
        let (metrics_a, log_a) = run(config.clone());
        let (metrics_b, log_b) = run(config.clone());
        assert_eq!(metrics_a, metrics_b);
        assert_eq!(log_a, log_b);

        config.seed = 2;
        let (metrics_c, _) = run(config);
        assert_ne!(metrics_a, metrics_c);
    }

    #[test]
    fn engine_both_agrees_and_measures_ratio() {
        let mut config = four_node_config();
        config.num_requests = 500;
        config.mean_holding = 2.0;
        config.engine = EngineChoice::Both;
        let mut sim = Simulation::new(config).unwrap();
        let metrics = sim.run().unwrap();
        let ratio = metrics.oracle_checks as f64 / metrics.layered_checks as f64;
        assert!(ratio > 1.0 && ratio <= 4.0, "ratio {ratio}");
        assert!(metrics.mean_slot_utilization > 0.0);
        assert!(metrics.mean_slot_utilization <= 1.0);
        assert!((0.0..=1.0).contains(&metrics.mean_fragmentation));
        assert!(metrics.blocked <= metrics.offered);

        // Conservation: every admitted connection departed, so the run
        // drains back to the fresh state.
        assert_eq!(sim.engines().active_count(), 0);
        let dump = sim.engines().layered().unwrap().state().dump();
        assert!(dump.lines().all(|l| l.ends_with(" 1111")));
    }

    #[test]
    fn replay_reproduces_the_walkthrough() {
        let config = four_node_config();
        let events = parse_trace("id,event,src,dst,b\n1,arrive,W,S,1\n2,arrive,S,E,2\n").unwrap();
        let output = replay_trace(&config, &events).unwrap();
        assert_eq!(
            output.decisions,
            vec![
                Decision {
                    id: 1,
                    admitted: Some((0, "W+N+S".into()))
                },
                Decision {
                    id: 2,
                    admitted: Some((1, "S+N+E".into()))
                },
            ]
        );
        assert_eq!(output.metrics.offered, 2);
        assert_eq!(output.metrics.blocked, 0);
    }

    #[test]
    fn replay_empty_trace_is_all_zero() {
        let output = replay_trace(&four_node_config(), &[]).unwrap();
        assert!(output.decisions.is_empty());
        let m = output.metrics;
        assert_eq!((m.offered, m.blocked), (0, 0));
        assert_eq!(m.blocking_probability, 0.0);
        assert_eq!(m.mean_slot_utilization, 0.0);
    }

    #[test]
    fn replay_rejects_malformed_sequences() {
        let config = four_node_config();
        let depart_first = parse_trace("id,event,src,dst,b\n1,depart,,,\n").unwrap();
        assert!(matches!(
            replay_trace(&config, &depart_first),
            Err(SimError::Replay { id: 1, .. })
        ));

        let unknown_label = parse_trace("id,event,src,dst,b\n1,arrive,W,Z,1\n").unwrap();
        assert!(matches!(
            replay_trace(&config, &unknown_label),
            Err(SimError::Replay { id: 1, .. })
        ));

        let reused = parse_trace("id,event,src,dst,b\n1,arrive,W,S,1\n1,arrive,W,S,1\n").unwrap();
        assert!(matches!(
            replay_trace(&config, &reused),
            Err(SimError::Replay { id: 1, .. })
        ));

        // A blocked id is not admitted, so its departure is malformed.
        let mut blocked_config = four_node_config();
        blocked_config.pattern = RequestPattern::uniform(1);
        let blocked_depart =
            parse_trace("id,event,src,dst,b\n1,arrive,W,S,4\n1,depart,,,\n").unwrap();
        assert!(matches!(
            replay_trace(&blocked_config, &blocked_depart),
            Err(SimError::Replay { id: 1, .. })
        ));
    }

    #[test]
    fn replay_inadmissible_width_is_blocked_not_error() {
        let config = four_node_config();
        let events = parse_trace("id,event,src,dst,b\n1,arrive,W,S,9\n").unwrap();
        let output = replay_trace(&config, &events).unwrap();
        assert_eq!(
            output.decisions,
            vec![Decision {
                id: 1,
                admitted: None
            }]
        );
        assert_eq!(output.metrics.blocked, 1);
    }
}
