//! First-fit routing and spectrum assignment, plus the slot-by-slot
//! baseline engine the layered model is measured against.
//!
//! Both engines scan the candidate intervals of the requested width in
//! ascending start order and run the same deterministic shortest-path
//! search on each candidate's link mask, so they must return identical
//! decisions. They differ only in how the mask is produced: the layered
//! engine reads one stored mask per candidate (one counted check per
//! link), the oracle ANDs `b` occupancy columns per link (`b` counted
//! checks per link). The ratio of the two counters is the measured
//! complexity reduction.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use crate::lattice::{Lattice, LatticeError, RequestPattern, SlotInterval};
use crate::netmodel::{LayeredState, NetModelError};
use crate::topology::{LinkIndex, LinkMask, NodeIndex, Topology, TopologyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RsaError {
    #[error("width {width} is not admissible under pattern {pattern}")]
    InadmissibleWidth {
        width: usize,
        pattern: RequestPattern,
    },
    #[error("invalid endpoint: {0}")]
    InvalidEndpoint(String),
    #[error(transparent)]
    Net(#[from] NetModelError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("connection {0} is already active")]
    DuplicateConnection(u64),
    #[error("connection {0} is not active")]
    UnknownConnection(u64),
    #[error("engines disagree on request {id}: layered {layered:?}, oracle {oracle:?}")]
    EngineMismatch {
        id: u64,
        layered: Option<ConnectionRecord>,
        oracle: Option<ConnectionRecord>,
    },
    #[error("no availability checks recorded; check ratio is undefined")]
    NoChecks,
}

impl From<TopologyError> for RsaError {
    fn from(err: TopologyError) -> Self {
        RsaError::InvalidEndpoint(err.to_string())
    }
}

/// A connection request: `width` consecutive slots between two nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConnectionRequest {
    pub id: u64,
    pub src: NodeIndex,
    pub dst: NodeIndex,
    pub width: usize,
}

/// An admitted connection: the unit of setup and teardown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionRecord {
    pub id: u64,
    pub path: Vec<LinkIndex>,
    pub interval: SlotInterval,
}

fn validate_endpoints(topology: &Topology, req: &ConnectionRequest) -> Result<(), RsaError> {
    let n = topology.node_count();
    if req.src >= n || req.dst >= n {
        return Err(RsaError::InvalidEndpoint(format!(
            "request {}: node index out of range (src {}, dst {}, {} nodes)",
            req.id, req.src, req.dst, n
        )));
    }
    if req.src == req.dst {
        return Err(RsaError::InvalidEndpoint(format!(
            "request {}: src == dst ({})",
            req.id,
            topology.node_name(req.src)
        )));
    }
    Ok(())
}

/// First-fit over the layered model: scan the level of the requested
/// width from the leftmost node, search a path on each node's stored
/// mask, admit at the first hit. Reads masks (counted) but never writes.
pub fn route_first_fit(
    state: &mut LayeredState,
    req: &ConnectionRequest,
) -> Result<Option<ConnectionRecord>, RsaError> {
    let lattice = Arc::clone(state.lattice());
    let topology = Arc::clone(state.topology());
    if !lattice.pattern().is_admissible(req.width) {
        return Err(RsaError::InadmissibleWidth {
            width: req.width,
            pattern: lattice.pattern(),
        });
    }
    validate_endpoints(&topology, req)?;

    for id in lattice.level_node_ids(req.width)? {
        let mask = state.mask_at_id(id);
        if let Some(path) = topology.shortest_path(&mask, req.src, req.dst)? {
            return Ok(Some(ConnectionRecord {
                id: req.id,
                path,
                interval: lattice.interval(id),
            }));
        }
    }
    Ok(None)
}

/// Slot-by-slot first-fit baseline: same candidate order, same path
/// search, but each candidate mask is assembled by ANDing the `width`
/// occupancy columns of every link.
pub fn oracle_route_first_fit(
    oracle: &mut OracleState,
    topology: &Topology,
    pattern: RequestPattern,
    req: &ConnectionRequest,
) -> Result<Option<ConnectionRecord>, RsaError> {
    if !pattern.is_admissible(req.width) || req.width > oracle.slot_count() {
        return Err(RsaError::InadmissibleWidth {
            width: req.width,
            pattern,
        });
    }
    validate_endpoints(topology, req)?;

    for start in 0..=(oracle.slot_count() - req.width) {
        let mask = oracle.candidate_mask(start, req.width);
        if let Some(path) = topology.shortest_path(&mask, req.src, req.dst)? {
            return Ok(Some(ConnectionRecord {
                id: req.id,
                path,
                interval: SlotInterval::new(start, start + req.width - 1),
            }));
        }
    }
    Ok(None)
}

/// Per-link slot occupancy rows, the state of the baseline engine.
#[derive(Debug, Clone)]
pub struct OracleState {
    slot_count: usize,
    // free[link][slot], true = slot free.
    free: Vec<Vec<bool>>,
    check_counter: u64,
}

impl OracleState {
    pub fn new(link_count: usize, slot_count: usize) -> Self {
        Self {
            slot_count,
            free: vec![vec![true; slot_count]; link_count],
            check_counter: 0,
        }
    }

    pub fn slot_count(&self) -> usize {
        self.slot_count
    }

    /// Uncounted read, for metrics and parity tests.
    pub fn slot_free(&self, link: LinkIndex, slot: usize) -> bool {
        self.free[link][slot]
    }

    /// Availability of `[start, start+width)` per link, reading (and
    /// counting) `width` slots on every link.
    pub fn candidate_mask(&mut self, start: usize, width: usize) -> LinkMask {
        let mut mask = LinkMask::all_clear(self.free.len());
        for (link, row) in self.free.iter().enumerate() {
            self.check_counter += width as u64;
            let all_free = row[start..start + width].iter().all(|&f| f);
            mask.set(link, all_free);
        }
        mask
    }

    pub fn occupy(
        &mut self,
        links: &[LinkIndex],
        interval: SlotInterval,
    ) -> Result<(), NetModelError> {
        for slot in interval.slots() {
            for &link in links {
                if !self.free[link][slot] {
                    return Err(NetModelError::Conflict { link, slot });
                }
            }
        }
        for slot in interval.slots() {
            for &link in links {
                self.free[link][slot] = false;
            }
        }
        Ok(())
    }

    pub fn release(
        &mut self,
        links: &[LinkIndex],
        interval: SlotInterval,
    ) -> Result<(), NetModelError> {
        for slot in interval.slots() {
            for &link in links {
                if self.free[link][slot] {
                    return Err(NetModelError::NotOccupied { link, slot });
                }
            }
        }
        for slot in interval.slots() {
            for &link in links {
                self.free[link][slot] = true;
            }
        }
        Ok(())
    }

    /// Slot reads performed so far (one per `(slot, link)` pair).
    pub fn checks(&self) -> u64 {
        self.check_counter
    }

    pub fn reset_checks(&mut self) {
        self.check_counter = 0;
    }
}

/// Layered engine with connection lifecycle.
#[derive(Debug, Clone)]
pub struct LayeredEngine {
    state: LayeredState,
    active: BTreeMap<u64, ConnectionRecord>,
}

impl LayeredEngine {
    pub fn new(lattice: Arc<Lattice>, topology: Arc<Topology>) -> Self {
        Self {
            state: LayeredState::new(lattice, topology),
            active: BTreeMap::new(),
        }
    }

    pub fn state(&self) -> &LayeredState {
        &self.state
    }

    pub fn route(&mut self, req: &ConnectionRequest) -> Result<Option<ConnectionRecord>, RsaError> {
        route_first_fit(&mut self.state, req)
    }

    /// Commits a record produced by [`LayeredEngine::route`] against this
    /// same state.
    pub fn setup(&mut self, record: &ConnectionRecord) -> Result<(), RsaError> {
        if self.active.contains_key(&record.id) {
            return Err(RsaError::DuplicateConnection(record.id));
        }
        self.state.occupy(&record.path, record.interval)?;
        self.active.insert(record.id, record.clone());
        Ok(())
    }

    pub fn teardown(&mut self, id: u64) -> Result<ConnectionRecord, RsaError> {
        let record = self
            .active
            .get(&id)
            .cloned()
            .ok_or(RsaError::UnknownConnection(id))?;
        self.state.release(&record.path, record.interval)?;
        self.active.remove(&id);
        Ok(record)
    }

    pub fn active(&self) -> &BTreeMap<u64, ConnectionRecord> {
        &self.active
    }

    pub fn checks(&self) -> u64 {
        self.state.checks()
    }

    pub fn reset_checks(&mut self) {
        self.state.reset_checks();
    }
}

/// Baseline engine with the same lifecycle surface as [`LayeredEngine`].
#[derive(Debug, Clone)]
pub struct OracleEngine {
    pattern: RequestPattern,
    topology: Arc<Topology>,
    state: OracleState,
    active: BTreeMap<u64, ConnectionRecord>,
}

impl OracleEngine {
    pub fn new(
        pattern: RequestPattern,
        slot_count: usize,
        topology: Arc<Topology>,
    ) -> Result<Self, RsaError> {
        pattern.validate(slot_count)?;
        let state = OracleState::new(topology.link_count(), slot_count);
        Ok(Self {
            pattern,
            topology,
            state,
            active: BTreeMap::new(),
        })
    }

    pub fn state(&self) -> &OracleState {
        &self.state
    }

    pub fn route(&mut self, req: &ConnectionRequest) -> Result<Option<ConnectionRecord>, RsaError> {
        oracle_route_first_fit(&mut self.state, &self.topology, self.pattern, req)
    }

    pub fn setup(&mut self, record: &ConnectionRecord) -> Result<(), RsaError> {
        if self.active.contains_key(&record.id) {
            return Err(RsaError::DuplicateConnection(record.id));
        }
        self.state.occupy(&record.path, record.interval)?;
        self.active.insert(record.id, record.clone());
        Ok(())
    }

    pub fn teardown(&mut self, id: u64) -> Result<ConnectionRecord, RsaError> {
        let record = self
            .active
            .get(&id)
            .cloned()
            .ok_or(RsaError::UnknownConnection(id))?;
        self.state.release(&record.path, record.interval)?;
        self.active.remove(&id);
        Ok(record)
    }

    pub fn checks(&self) -> u64 {
        self.state.checks()
    }

    pub fn reset_checks(&mut self) {
        self.state.reset_checks();
    }
}

/// Which engine(s) a run drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Layered,
    Oracle,
    /// Run both in lockstep and fail hard on any disagreement.
    Both,
}

impl FromStr for EngineChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "layered" => Ok(Self::Layered),
            "oracle" => Ok(Self::Oracle),
            "both" => Ok(Self::Both),
            other => Err(format!("unknown engine {other:?} (layered|oracle|both)")),
        }
    }
}

impl std::fmt::Display for EngineChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Layered => "layered",
            Self::Oracle => "oracle",
            Self::Both => "both",
        })
    }
}

/// One or two engines behind a single route/setup/teardown surface.
///
/// With [`EngineChoice::Both`] every routing decision is made by both
/// engines and compared field for field; a divergence is returned as
/// [`RsaError::EngineMismatch`] and the run is not expected to continue.
#[derive(Debug, Clone)]
pub struct Engines {
    layered: Option<LayeredEngine>,
    oracle: Option<OracleEngine>,
}

impl Engines {
    pub fn new(
        choice: EngineChoice,
        pattern: RequestPattern,
        slot_count: usize,
        topology: Arc<Topology>,
    ) -> Result<Self, RsaError> {
        let layered = match choice {
            EngineChoice::Layered | EngineChoice::Both => {
                let lattice = Arc::new(Lattice::build(pattern, slot_count)?);
                Some(LayeredEngine::new(lattice, Arc::clone(&topology)))
            }
            EngineChoice::Oracle => None,
        };
        let oracle = match choice {
            EngineChoice::Oracle | EngineChoice::Both => {
                Some(OracleEngine::new(pattern, slot_count, topology)?)
            }
            EngineChoice::Layered => None,
        };
        Ok(Self { layered, oracle })
    }

    pub fn layered(&self) -> Option<&LayeredEngine> {
        self.layered.as_ref()
    }

    pub fn oracle(&self) -> Option<&OracleEngine> {
        self.oracle.as_ref()
    }

    pub fn route(&mut self, req: &ConnectionRequest) -> Result<Option<ConnectionRecord>, RsaError> {
        match (&mut self.layered, &mut self.oracle) {
            (Some(layered), Some(oracle)) => {
                let a = layered.route(req)?;
                let b = oracle.route(req)?;
                if a != b {
                    return Err(RsaError::EngineMismatch {
                        id: req.id,
                        layered: a,
                        oracle: b,
                    });
                }
                Ok(a)
            }
            (Some(layered), None) => layered.route(req),
            (None, Some(oracle)) => oracle.route(req),
            (None, None) => unreachable!("Engines always holds at least one engine"),
        }
    }

    pub fn setup(&mut self, record: &ConnectionRecord) -> Result<(), RsaError> {
        if let Some(layered) = &mut self.layered {
            layered.setup(record)?;
        }
        if let Some(oracle) = &mut self.oracle {
            oracle.setup(record)?;
        }
        Ok(())
    }

    pub fn teardown(&mut self, id: u64) -> Result<ConnectionRecord, RsaError> {
        let from_layered = match &mut self.layered {
            Some(layered) => Some(layered.teardown(id)?),
            None => None,
        };
        let from_oracle = match &mut self.oracle {
            Some(oracle) => Some(oracle.teardown(id)?),
            None => None,
        };
        if let (Some(a), Some(b)) = (&from_layered, &from_oracle) {
            debug_assert_eq!(a, b, "registries diverged for connection {id}");
        }
        Ok(from_layered
            .or(from_oracle)
            .expect("Engines always holds at least one engine"))
    }

    pub fn active_count(&self) -> usize {
        self.layered
            .as_ref()
            .map(|e| e.active().len())
            .or_else(|| self.oracle.as_ref().map(|e| e.active().len()))
            .unwrap_or(0)
    }

    pub fn layered_checks(&self) -> u64 {
        self.layered.as_ref().map_or(0, |e| e.checks())
    }

    pub fn oracle_checks(&self) -> u64 {
        self.oracle.as_ref().map_or(0, |e| e.checks())
    }

    pub fn reset_checks(&mut self) {
        if let Some(layered) = &mut self.layered {
            layered.reset_checks();
        }
        if let Some(oracle) = &mut self.oracle {
            oracle.reset_checks();
        }
    }

    /// Oracle checks divided by layered checks over the replayed traffic.
    pub fn check_ratio(&self) -> Result<f64, RsaError> {
        let layered = self.layered_checks();
        let oracle = self.oracle_checks();
        if layered == 0 || oracle == 0 {
            return Err(RsaError::NoChecks);
        }
        Ok(oracle as f64 / layered as f64)
    }
}

impl OracleEngine {
    pub fn active(&self) -> &BTreeMap<u64, ConnectionRecord> {
        &self.active
    }
}

// --- trace and decision-log formats -------------------------------------

pub const TRACE_HEADER: &str = "id,event,src,dst,b";
pub const DECISION_HEADER: &str = "id,decision,start_slot,path";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("trace header must be {TRACE_HEADER:?}, got {0:?}")]
    Header(String),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
}

/// One line of a request trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    Arrive {
        id: u64,
        src: String,
        dst: String,
        width: usize,
    },
    Depart {
        id: u64,
    },
}

impl TraceEvent {
    pub fn id(&self) -> u64 {
        match *self {
            TraceEvent::Arrive { id, .. } | TraceEvent::Depart { id } => id,
        }
    }
}

#[derive(Debug, Deserialize)]
struct RawTraceRow {
    id: u64,
    event: String,
    src: Option<String>,
    dst: Option<String>,
    b: Option<usize>,
}

/// Parses a `id,event,src,dst,b` trace document. `depart` rows leave the
/// last three fields empty.
pub fn parse_trace(text: &str) -> Result<Vec<TraceEvent>, TraceError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    {
        let headers = reader
            .headers()
            .map_err(|e| TraceError::Header(e.to_string()))?;
        let joined = headers.iter().collect::<Vec<_>>().join(",");
        if joined != TRACE_HEADER {
            return Err(TraceError::Header(joined));
        }
    }

    let mut events = Vec::new();
    for result in reader.deserialize::<RawTraceRow>() {
        let row = result.map_err(|e| TraceError::Row {
            line: e.position().map_or(0, csv::Position::line),
            message: e.to_string(),
        })?;
        // Data rows start on line 2, after the header.
        let line = events.len() as u64 + 2;
        match row.event.as_str() {
            "arrive" => {
                let missing = |field: &str| TraceError::Row {
                    line,
                    message: format!("arrive row {} is missing {field}", row.id),
                };
                events.push(TraceEvent::Arrive {
                    id: row.id,
                    src: row.src.ok_or_else(|| missing("src"))?,
                    dst: row.dst.ok_or_else(|| missing("dst"))?,
                    width: row.b.ok_or_else(|| missing("b"))?,
                });
            }
            "depart" => events.push(TraceEvent::Depart { id: row.id }),
            other => {
                return Err(TraceError::Row {
                    line,
                    message: format!("unknown event {other:?} (arrive|depart)"),
                })
            }
        }
    }
    Ok(events)
}

/// Serializes events in the trace file format.
pub fn write_trace(events: &[TraceEvent]) -> String {
    use std::fmt::Write;

    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for event in events {
        match event {
            TraceEvent::Arrive {
                id,
                src,
                dst,
                width,
            } => {
                let _ = writeln!(out, "{id},arrive,{src},{dst},{width}");
            }
            TraceEvent::Depart { id } => {
                let _ = writeln!(out, "{id},depart,,,");
            }
        }
    }
    out
}

/// The outcome of one routed request, ready for the decision log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub id: u64,
    /// `Some((start_slot, "W+N+S"))` when admitted, `None` when blocked.
    pub admitted: Option<(usize, String)>,
}

impl Decision {
    /// Builds a log row from a routing outcome, expanding the record's
    /// link path into `+`-joined node labels.
    pub fn from_outcome(
        id: u64,
        src: NodeIndex,
        outcome: Option<&ConnectionRecord>,
        topology: &Topology,
    ) -> Self {
        let admitted = outcome.map(|record| {
            let labels = topology
                .path_nodes(src, &record.path)
                .into_iter()
                .map(|n| topology.node_name(n).to_string())
                .collect::<Vec<_>>()
                .join("+");
            (record.interval.start(), labels)
        });
        Self { id, admitted }
    }
}

/// Renders the `id,decision,start_slot,path` log; blocked rows leave the
/// last two fields empty.
pub fn decision_log_csv(decisions: &[Decision]) -> String {
    use std::fmt::Write;

    let mut out = String::from(DECISION_HEADER);
    out.push('\n');
    for decision in decisions {
        match &decision.admitted {
            Some((start, path)) => {
                let _ = writeln!(out, "{},admit,{start},{path}", decision.id);
            }
            None => {
                let _ = writeln!(out, "{},block,,", decision.id);
            }
        }
    }
    out
}
