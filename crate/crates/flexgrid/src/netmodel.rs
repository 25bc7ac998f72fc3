//! Layered network state: one link-availability mask per lattice node.
//!
//! The defining property of the model is the consistency law: the mask bit
//! of link `l` at node `s_{i,j}` equals the AND of `l`'s bits at the
//! level-1 nodes `s_i ..= s_j`. Setting up a connection clears its links
//! at the occupied slots' level-1 nodes and their entire up-sets (clearing
//! is monotone, so direct writes preserve the law). Releasing restores the
//! level-1 bits and recomputes every affected node bottom-up as the AND of
//! its down-neighbors, which reproduces the slot-wise AND level by level.
//!
//! A state is mutated by one writer at a time; independent states may run
//! on different threads.

use std::sync::Arc;

use thiserror::Error;

use crate::lattice::{Lattice, NodeId, SlotInterval};
use crate::topology::{LinkIndex, LinkMask, Topology};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetModelError {
    #[error("link {link} is already occupied at slot {slot}")]
    Conflict { link: LinkIndex, slot: usize },
    #[error("link {link} is not occupied at slot {slot}")]
    NotOccupied { link: LinkIndex, slot: usize },
    #[error("interval {0} is not a node of this lattice")]
    UnknownNode(SlotInterval),
}

/// Node and bit totals of a [`LayeredState`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryStats {
    pub node_count: usize,
    pub bits_total: usize,
}

/// Mutable spectrum usage of a whole network over a shared [`Lattice`].
#[derive(Debug, Clone)]
pub struct LayeredState {
    lattice: Arc<Lattice>,
    topology: Arc<Topology>,
    masks: Vec<LinkMask>,
    // Up-sets of the level-1 nodes, precomputed: occupy/release touch them
    // on every call.
    slot_up_sets: Vec<Vec<NodeId>>,
    check_counter: u64,
}

impl LayeredState {
    /// Fresh state: every link available at every node, counter at zero.
    pub fn new(lattice: Arc<Lattice>, topology: Arc<Topology>) -> Self {
        let masks = vec![LinkMask::all_set(topology.link_count()); lattice.len()];
        let slot_up_sets = (0..lattice.slot_count())
            .map(|slot| lattice.up_set_ids(slot))
            .collect();
        Self {
            lattice,
            topology,
            masks,
            slot_up_sets,
            check_counter: 0,
        }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn topology(&self) -> &Arc<Topology> {
        &self.topology
    }

    /// Clears `links` at every slot of `interval` and at the slots'
    /// up-sets. Fails without mutating if any targeted level-1 bit is
    /// already 0; that means the caller double-booked. Links must be
    /// distinct.
    pub fn occupy(
        &mut self,
        links: &[LinkIndex],
        interval: SlotInterval,
    ) -> Result<(), NetModelError> {
        assert!(
            interval.end() < self.lattice.slot_count(),
            "interval {interval} out of range"
        );
        for slot in interval.slots() {
            for &link in links {
                if !self.masks[slot].get(link) {
                    return Err(NetModelError::Conflict { link, slot });
                }
            }
        }
        for slot in interval.slots() {
            for &link in links {
                self.masks[slot].set(link, false);
            }
            for &node in &self.slot_up_sets[slot] {
                for &link in links {
                    self.masks[node].set(link, false);
                }
            }
        }
        Ok(())
    }

    /// Restores `links` at the level-1 nodes of `interval`, then
    /// recomputes every node above the released slots, in level order, as
    /// the AND of its down-neighbors. Fails without mutating if any
    /// targeted level-1 bit is already 1.
    pub fn release(
        &mut self,
        links: &[LinkIndex],
        interval: SlotInterval,
    ) -> Result<(), NetModelError> {
        assert!(
            interval.end() < self.lattice.slot_count(),
            "interval {interval} out of range"
        );
        for slot in interval.slots() {
            for &link in links {
                if self.masks[slot].get(link) {
                    return Err(NetModelError::NotOccupied { link, slot });
                }
            }
        }
        for slot in interval.slots() {
            for &link in links {
                self.masks[slot].set(link, true);
            }
        }

        let mut affected: Vec<NodeId> = interval
            .slots()
            .flat_map(|slot| self.slot_up_sets[slot].iter().copied())
            .collect();
        affected.sort_unstable();
        affected.dedup();
        // Ids are level-major, so ascending order is bottom-up: every
        // down-neighbor is final before its parents are recomputed.
        for node in affected {
            for &link in links {
                let available = self
                    .lattice
                    .down_neighbor_ids(node)
                    .iter()
                    .all(|&child| self.masks[child].get(link));
                self.masks[node].set(link, available);
            }
        }
        Ok(())
    }

    /// One counted availability read: the stored bit of `link` at `node`.
    ///
    /// Panics if `node` is not a lattice node or `link` is out of range;
    /// both indicate caller bugs.
    pub fn link_available(&mut self, node: SlotInterval, link: LinkIndex) -> bool {
        let id = self
            .lattice
            .node_id(node)
            .unwrap_or_else(|| panic!("{node} is not a lattice node"));
        self.link_available_id(id, link)
    }

    /// Id-addressed variant of [`LayeredState::link_available`].
    pub fn link_available_id(&mut self, id: NodeId, link: LinkIndex) -> bool {
        self.check_counter += 1;
        self.masks[id].get(link)
    }

    /// Copy of the node's whole mask; counts one read per link.
    pub fn mask_at(&mut self, node: SlotInterval) -> Result<LinkMask, NetModelError> {
        let id = self
            .lattice
            .node_id(node)
            .ok_or(NetModelError::UnknownNode(node))?;
        Ok(self.mask_at_id(id))
    }

    /// Id-addressed variant of [`LayeredState::mask_at`].
    pub fn mask_at_id(&mut self, id: NodeId) -> LinkMask {
        self.check_counter += self.topology.link_count() as u64;
        self.masks[id].clone()
    }

    /// Uncounted level-1 read, for metrics and oracles: is `slot` free on
    /// `link`?
    pub fn slot_free(&self, link: LinkIndex, slot: usize) -> bool {
        self.masks[slot].get(link)
    }

    /// Availability reads performed so far (one per `(node, link)` pair
    /// asked, never per slot).
    pub fn checks(&self) -> u64 {
        self.check_counter
    }

    pub fn reset_checks(&mut self) {
        self.check_counter = 0;
    }

    pub fn memory_stats(&self) -> MemoryStats {
        MemoryStats {
            node_count: self.lattice.len(),
            bits_total: self.lattice.len() * self.topology.link_count(),
        }
    }

    /// Verifies the consistency law on every node and link.
    pub fn is_consistent(&self) -> bool {
        self.lattice.nodes().iter().enumerate().all(|(id, node)| {
            (0..self.topology.link_count()).all(|link| {
                let slot_and = node.slots().all(|slot| self.masks[slot].get(link));
                self.masks[id].get(link) == slot_and
            })
        })
    }

    /// Debug dump: one line per node, `<label> <mask as 0/1 string>`,
    /// in node order. Bit-exact for golden-file comparison.
    pub fn dump(&self) -> String {
        use std::fmt::Write;

        let mut out = String::new();
        for (id, node) in self.lattice.nodes().iter().enumerate() {
            let _ = writeln!(out, "{node} {}", self.masks[id]);
        }
        out
    }
}
