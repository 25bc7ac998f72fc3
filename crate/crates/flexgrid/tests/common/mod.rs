//! Shared fixtures and independent oracles for the integration suites.
//!
//! Everything here deliberately avoids the library's own bookkeeping:
//! interval enumeration is brute force, occupancy is tracked as plain
//! per-link boolean rows, and first-fit decisions are re-derived by
//! scanning starts over those rows.

// Each test target compiles its own copy and uses a different subset.
#![allow(dead_code)]

use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use flexgrid::lattice::{Lattice, RequestPattern, SlotInterval};
use flexgrid::netmodel::LayeredState;
use flexgrid::rsa::{ConnectionRecord, ConnectionRequest, EngineChoice, Engines};
use flexgrid::topology::{LinkMask, Topology};

pub const FOUR_NODE: &str = include_str!("../data/fournode.txt");
pub const NSFNET: &str = include_str!("../data/nsfnet.txt");

/// Brute-force enumeration of every admissible interval, in the lattice's
/// promised order (width-major, start-ascending).
pub fn enumerate_intervals(pattern: RequestPattern, slot_count: usize) -> Vec<SlotInterval> {
    let mut found = Vec::new();
    for i in 0..slot_count {
        for j in i..slot_count {
            if pattern.is_admissible(j - i + 1) {
                found.push(SlotInterval::new(i, j));
            }
        }
    }
    found.sort_by_key(|n| (n.width(), n.start()));
    found
}

/// Random connected topology with `2..=max_nodes` nodes: a random tree
/// plus a few extra edges.
pub fn random_topology(rng: &mut ChaCha8Rng, max_nodes: usize) -> Topology {
    let n = rng.gen_range(2..=max_nodes);
    let mut text = String::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        text.push_str(&format!("v{j} v{i}\n"));
    }
    let extra = rng.gen_range(0..=n);
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            // Topology::parse rejects duplicates, so probe first.
            let line = format!("v{} v{}", a.min(b), a.max(b));
            let dup = text.lines().any(|l| {
                let mut f = l.split_whitespace();
                let (x, y) = (f.next().unwrap(), f.next().unwrap());
                format!("{x} {y}") == line || format!("{y} {x}") == line
            });
            if !dup {
                text.push_str(&line);
                text.push('\n');
            }
        }
    }
    Topology::parse(&text).expect("generated topology parses")
}

/// Plain per-link occupancy rows, maintained by the tests themselves.
#[derive(Clone)]
pub struct NaiveRows {
    pub free: Vec<Vec<bool>>,
    pub slot_count: usize,
}

impl NaiveRows {
    pub fn new(link_count: usize, slot_count: usize) -> Self {
        Self {
            free: vec![vec![true; slot_count]; link_count],
            slot_count,
        }
    }

    pub fn feasible(&self, links: &[usize], interval: SlotInterval) -> bool {
        links
            .iter()
            .all(|&l| interval.slots().all(|s| self.free[l][s]))
    }

    pub fn set(&mut self, links: &[usize], interval: SlotInterval, value: bool) {
        for &l in links {
            for s in interval.slots() {
                self.free[l][s] = value;
            }
        }
    }

    /// Matches every level-1 bit of `state`?
    pub fn mirrors(&self, state: &LayeredState) -> bool {
        self.free.iter().enumerate().all(|(link, row)| {
            row.iter()
                .enumerate()
                .all(|(slot, &free)| state.slot_free(link, slot) == free)
        })
    }

    /// Independent first-fit: scan starts left to right, AND the rows
    /// into a mask, path-search each candidate.
    pub fn first_fit(
        &self,
        topology: &Topology,
        req: &ConnectionRequest,
    ) -> Option<(usize, Vec<usize>)> {
        for start in 0..=(self.slot_count - req.width) {
            let mut mask = LinkMask::all_clear(self.free.len());
            for (link, row) in self.free.iter().enumerate() {
                mask.set(link, row[start..start + req.width].iter().all(|&f| f));
            }
            if let Some(path) = topology.shortest_path(&mask, req.src, req.dst).unwrap() {
                return Some((start, path));
            }
        }
        None
    }
}

/// One random feasible occupy or release against `state`, mirrored into
/// `rows` and `active`. Returns the ids of the lattice nodes the step was
/// allowed to touch.
pub fn random_feasible_step(
    rng: &mut ChaCha8Rng,
    lattice: &Lattice,
    state: &mut LayeredState,
    rows: &mut NaiveRows,
    active: &mut Vec<(Vec<usize>, SlotInterval)>,
) -> Vec<usize> {
    let link_count = rows.free.len();
    let widths = lattice.pattern().admissible_widths();
    let slot_count = lattice.slot_count();

    let try_occupy = link_count > 0 && (active.is_empty() || rng.gen_bool(0.6));
    if try_occupy {
        for _ in 0..12 {
            let width = widths[rng.gen_range(0..widths.len())];
            let start = rng.gen_range(0..=(slot_count - width));
            let interval = SlotInterval::new(start, start + width - 1);
            let mut links: Vec<usize> = (0..link_count).collect();
            links.shuffle(rng);
            links.truncate(rng.gen_range(1..=link_count.min(4)));
            links.sort_unstable();
            if rows.feasible(&links, interval) {
                state.occupy(&links, interval).expect("feasible occupy");
                rows.set(&links, interval, false);
                active.push((links, interval));
                return touched_ids(lattice, interval);
            }
        }
    }
    if let Some(pick) = (!active.is_empty()).then(|| rng.gen_range(0..active.len())) {
        let (links, interval) = active.swap_remove(pick);
        state.release(&links, interval).expect("tracked release");
        rows.set(&links, interval, true);
        return touched_ids(lattice, interval);
    }
    Vec::new()
}

/// The lattice nodes an occupy/release of `interval` may modify: the
/// interval's level-1 nodes and their up-sets.
pub fn touched_ids(lattice: &Lattice, interval: SlotInterval) -> Vec<usize> {
    let mut ids: Vec<usize> = interval.slots().collect();
    for slot in interval.slots() {
        ids.extend(lattice.up_set_ids(slot));
    }
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// Lockstep engines plus the naive mirror, for equivalence runs.
pub struct DualHarness {
    pub topology: Arc<Topology>,
    pub pattern: RequestPattern,
    pub engines: Engines,
    pub rows: NaiveRows,
    pub active: Vec<ConnectionRecord>,
}

impl DualHarness {
    pub fn new(topology: Topology, pattern: RequestPattern, slot_count: usize) -> Self {
        let topology = Arc::new(topology);
        let engines = Engines::new(
            EngineChoice::Both,
            pattern,
            slot_count,
            Arc::clone(&topology),
        )
        .expect("valid pattern");
        let rows = NaiveRows::new(topology.link_count(), slot_count);
        Self {
            topology,
            pattern,
            engines,
            rows,
            active: Vec::new(),
        }
    }

    /// Routes on both engines (they compare themselves), checks the
    /// decision against the naive scan, and commits it.
    pub fn arrive(&mut self, req: &ConnectionRequest) -> Option<ConnectionRecord> {
        let outcome = self
            .engines
            .route(req)
            .expect("engines agree and request is valid");
        let expected = self.rows.first_fit(&self.topology, req);
        match (&outcome, &expected) {
            (Some(record), Some((start, path))) => {
                assert_eq!(record.interval.start(), *start, "first-fit start differs");
                assert_eq!(&record.path, path, "path differs");
                assert_eq!(record.interval.width(), req.width);
            }
            (None, None) => {}
            other => panic!("engines and naive scan disagree: {other:?}"),
        }
        if let Some(record) = &outcome {
            self.engines.setup(record).expect("routed setup");
            self.rows.set(&record.path, record.interval, false);
            self.active.push(record.clone());
        }
        outcome
    }

    pub fn depart_random(&mut self, rng: &mut ChaCha8Rng) {
        if self.active.is_empty() {
            return;
        }
        let record = self.active.swap_remove(rng.gen_range(0..self.active.len()));
        self.engines.teardown(record.id).expect("active teardown");
        self.rows.set(&record.path, record.interval, true);
    }

    pub fn random_request(&self, rng: &mut ChaCha8Rng, id: u64) -> ConnectionRequest {
        let n = self.topology.node_count();
        let src = rng.gen_range(0..n);
        let mut dst = rng.gen_range(0..n - 1);
        if dst >= src {
            dst += 1;
        }
        let widths = self.pattern.admissible_widths();
        ConnectionRequest {
            id,
            src,
            dst,
            width: widths[rng.gen_range(0..widths.len())],
        }
    }
}
