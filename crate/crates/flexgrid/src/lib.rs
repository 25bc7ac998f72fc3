//! Layered spectrum-availability model for flexible-grid optical networks.
//!
//! In a flexible-grid (elastic) optical network a connection occupies `b`
//! consecutive spectrum slots, identical on every link of its path. The
//! per-wavelength layered graphs used for WDM networks cannot express the
//! resulting dependencies between neighboring slots. This crate models a
//! link's admissible slot intervals as a join semi-lattice and keeps one
//! link-availability bit vector per lattice node for the whole network, so
//! a routing engine can test a candidate interval on every link with a
//! single mask read instead of `b` slot-by-slot reads.
//!
//! The pieces:
//!
//! - [`lattice`]: the Hasse diagram of contiguous slot intervals for the
//!   uniform and power-of-two request patterns, with closed-form node
//!   counts, up-sets, cover neighbors and fragmentation components.
//! - [`topology`]: edge-list network graphs, link masks and deterministic
//!   minimum-hop search restricted to a mask.
//! - [`netmodel`]: the layered network state (one mask per lattice node)
//!   with occupy/release propagation and an availability-check counter.
//! - [`rsa`]: first-fit routing and spectrum assignment over the layered
//!   state, a slot-by-slot oracle engine it must agree with, connection
//!   lifecycle, and the trace/decision-log formats.
//! - [`sim`]: a discrete-event simulator with Poisson arrivals and
//!   exponential holding times, plus deterministic trace replay.
//! - [`cli`]: the `flexgrid` command-line front end.
//!
//! Each major capability has a runnable demo under `examples/`.

pub mod cli;
pub mod lattice;
pub mod netmodel;
pub mod rsa;
pub mod sim;
pub mod topology;

pub use lattice::{JoinResult, Lattice, LatticeError, NodeId, RequestPattern, SlotInterval};
pub use netmodel::{LayeredState, MemoryStats, NetModelError};
pub use rsa::{
    ConnectionRecord, ConnectionRequest, EngineChoice, Engines, LayeredEngine, OracleEngine,
    OracleState, RsaError,
};
pub use sim::{replay_trace, run_simulation, SimConfig, SimError, SimMetrics, Simulation};
pub use topology::{LinkIndex, LinkMask, NodeIndex, Topology, TopologyError};
