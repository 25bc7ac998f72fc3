//! Join semi-lattice of contiguous slot intervals on a single fiber link.
//!
//! A fiber's spectrum is divided into `T` slots. A connection occupies a
//! contiguous run of slots, so the admissible slot sets of a link form a
//! partially ordered set under containment. This module builds the Hasse
//! diagram of that poset for the two request patterns used in practice
//! (uniform widths `1..=k`, power-of-two widths `1, 2, 4, ..., 2^p`) and
//! answers the structural queries the layered network model needs:
//! up-sets, cover neighbors, level scans and connected components after
//! slot removal.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Index of a node in a [`Lattice`], assigned level-major (width ascending),
/// start-ascending within a level. Width-1 nodes get ids `0..T`, so the id
/// of the node for slot `m` is `m` itself.
pub type NodeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("pattern {pattern} is not valid for {slot_count} slots")]
    InvalidPattern {
        pattern: RequestPattern,
        slot_count: usize,
    },
    #[error("interval {0} is not a node of this lattice")]
    UnknownNode(SlotInterval),
    #[error("width {width} is not admissible under pattern {pattern}")]
    InadmissibleWidth {
        width: usize,
        pattern: RequestPattern,
    },
}

/// A contiguous, inclusive run of slot indices `[start, end]`.
///
/// Width-1 intervals denote single slots and display as `s_3`; wider
/// intervals display as `s_{1,3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlotInterval {
    start: usize,
    end: usize,
}

impl SlotInterval {
    /// Panics if `start > end`.
    pub fn new(start: usize, end: usize) -> Self {
        assert!(start <= end, "interval start {start} exceeds end {end}");
        Self { start, end }
    }

    pub fn single(slot: usize) -> Self {
        Self {
            start: slot,
            end: slot,
        }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// Inclusive upper slot index.
    pub fn end(&self) -> usize {
        self.end
    }

    pub fn width(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn slots(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }

    pub fn contains_slot(&self, slot: usize) -> bool {
        self.start <= slot && slot <= self.end
    }

    /// True when `other` lies within `self` (not necessarily strictly).
    pub fn contains(&self, other: &SlotInterval) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// Set intersection of two intervals; `None` when they are disjoint.
    pub fn meet(&self, other: &SlotInterval) -> Option<SlotInterval> {
        let start = self.start.max(other.start);
        let end = self.end.min(other.end);
        (start <= end).then_some(SlotInterval { start, end })
    }

    /// The smallest interval covering both operands.
    pub fn span(&self, other: &SlotInterval) -> SlotInterval {
        SlotInterval {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }

    /// Least upper bound under `pattern`.
    ///
    /// The poset is not closed under spans: for `uniform(k)` with `k < T`
    /// the span of two distant intervals is wider than any admissible
    /// interval, and for the power-of-two pattern most spans have an
    /// inadmissible width. Those cases yield [`JoinResult::OutOfLattice`]
    /// rather than an error.
    pub fn join(&self, other: &SlotInterval, pattern: RequestPattern) -> JoinResult {
        let span = self.span(other);
        if pattern.is_admissible(span.width()) {
            JoinResult::Joined(span)
        } else {
            JoinResult::OutOfLattice
        }
    }
}

impl fmt::Display for SlotInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start == self.end {
            write!(f, "s_{}", self.start)
        } else {
            write!(f, "s_{{{},{}}}", self.start, self.end)
        }
    }
}

/// Outcome of [`SlotInterval::join`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JoinResult {
    Joined(SlotInterval),
    /// The span of the operands has no admissible width under the pattern.
    OutOfLattice,
}

/// The set of connection widths a network admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RequestPattern {
    /// Any width in `1..=max_width`.
    Uniform { max_width: usize },
    /// Widths `1, 2, 4, ..., 2^max_exponent`.
    PowerOfTwo { max_exponent: u32 },
}

impl RequestPattern {
    pub fn uniform(max_width: usize) -> Self {
        Self::Uniform { max_width }
    }

    pub fn pow2(max_exponent: u32) -> Self {
        Self::PowerOfTwo { max_exponent }
    }

    /// Largest admissible width, or `None` if it overflows `usize`.
    pub fn max_width(&self) -> Option<usize> {
        match *self {
            Self::Uniform { max_width } => Some(max_width),
            Self::PowerOfTwo { max_exponent } => 1usize.checked_shl(max_exponent),
        }
    }

    /// Admissible widths in ascending order.
    pub fn admissible_widths(&self) -> Vec<usize> {
        match *self {
            Self::Uniform { max_width } => (1..=max_width).collect(),
            Self::PowerOfTwo { max_exponent } => (0..=max_exponent)
                .map(|e| {
                    1usize
                        .checked_shl(e)
                        .expect("pattern exponent overflows usize")
                })
                .collect(),
        }
    }

    pub fn is_admissible(&self, width: usize) -> bool {
        match *self {
            Self::Uniform { max_width } => 1 <= width && width <= max_width,
            Self::PowerOfTwo { max_exponent } => {
                width.is_power_of_two() && width <= 1usize << max_exponent.min(63)
            }
        }
    }

    /// Checks that the largest admissible width fits in `slot_count` slots.
    pub fn validate(&self, slot_count: usize) -> Result<(), LatticeError> {
        let invalid = || LatticeError::InvalidPattern {
            pattern: *self,
            slot_count,
        };
        match self.max_width() {
            None => Err(invalid()),
            Some(w) if w < 1 || w > slot_count => Err(invalid()),
            Some(_) => Ok(()),
        }
    }
}

impl fmt::Display for RequestPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Uniform { max_width } => write!(f, "uniform:{max_width}"),
            Self::PowerOfTwo { max_exponent } => write!(f, "pow2:{max_exponent}"),
        }
    }
}

/// Failure to parse a [`RequestPattern`] from its `KIND:BOUND` form.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{0}")]
pub struct PatternParseError(String);

impl FromStr for RequestPattern {
    type Err = PatternParseError;

    /// Parses `uniform:K` (max width `K`) or `pow2:P` (max width `2^P`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, bound) = s
            .split_once(':')
            .ok_or_else(|| PatternParseError(format!("expected KIND:BOUND, got {s:?}")))?;
        match kind {
            "uniform" => {
                let k = bound
                    .parse()
                    .map_err(|_| PatternParseError(format!("bad uniform bound {bound:?}")))?;
                Ok(Self::Uniform { max_width: k })
            }
            "pow2" => {
                let p = bound
                    .parse()
                    .map_err(|_| PatternParseError(format!("bad pow2 exponent {bound:?}")))?;
                Ok(Self::PowerOfTwo { max_exponent: p })
            }
            other => Err(PatternParseError(format!("unknown pattern kind {other:?}"))),
        }
    }
}

/// Hasse diagram of the admissible slot intervals of one link.
///
/// Nodes are stored level-major (width ascending) and start-ascending
/// within a level; that ordering is exactly the first-fit scan order.
/// Edges are the cover relation: a node of width `w` is connected to every
/// admissible subinterval of the next admissible width below `w`. The
/// structure is immutable after construction; occupancy effects are always
/// computed against an external occupied set.
#[derive(Debug, Clone)]
pub struct Lattice {
    slot_count: usize,
    pattern: RequestPattern,
    levels: Vec<usize>,
    level_offsets: Vec<usize>,
    nodes: Vec<SlotInterval>,
    down: Vec<Vec<NodeId>>,
    up: Vec<Vec<NodeId>>,
}

impl Lattice {
    /// Builds the full Hasse diagram for `pattern` over `slot_count` slots.
    pub fn build(pattern: RequestPattern, slot_count: usize) -> Result<Self, LatticeError> {
        pattern.validate(slot_count)?;
        let levels = pattern.admissible_widths();

        let mut nodes = Vec::new();
        let mut level_offsets = Vec::with_capacity(levels.len());
        for &width in &levels {
            level_offsets.push(nodes.len());
            for start in 0..=(slot_count - width) {
                nodes.push(SlotInterval::new(start, start + width - 1));
            }
        }

        let mut down: Vec<Vec<NodeId>> = vec![Vec::new(); nodes.len()];
        let mut up: Vec<Vec<NodeId>> = vec![Vec::new(); nodes.len()];
        for li in 1..levels.len() {
            let child_width = levels[li - 1];
            let child_offset = level_offsets[li - 1];
            let width = levels[li];
            let offset = level_offsets[li];
            for start in 0..=(slot_count - width) {
                let id = offset + start;
                // Covers of [start, end] are all child-width subintervals;
                // no admissible width lies strictly between adjacent levels.
                for child_start in start..=(start + width - child_width) {
                    let child = child_offset + child_start;
                    down[id].push(child);
                    up[child].push(id);
                }
            }
        }

        Ok(Self {
            slot_count,
            pattern,
            levels,
            level_offsets,
            nodes,
            down,
            up,
        })
    }

    /// Closed-form node count: sum of `T - w + 1` over admissible widths
    /// for the uniform pattern, `T(p+1) - 2^(p+1) + p + 2` for power-of-two.
    pub fn expected_node_count(
        pattern: RequestPattern,
        slot_count: usize,
    ) -> Result<usize, LatticeError> {
        pattern.validate(slot_count)?;
        let t = slot_count as u128;
        let count: u128 = match pattern {
            RequestPattern::Uniform { max_width } => {
                // Summing keeps everything integral for even max_width.
                (1..=max_width as u128).map(|w| t - w + 1).sum()
            }
            RequestPattern::PowerOfTwo { max_exponent } => {
                let p = max_exponent as u128;
                t * (p + 1) + p + 2 - (1u128 << (p + 1))
            }
        };
        count.try_into().map_err(|_| LatticeError::InvalidPattern {
            pattern,
            slot_count,
        })
    }

    pub fn slot_count(&self) -> usize {
        self.slot_count
    }

    pub fn pattern(&self) -> RequestPattern {
        self.pattern
    }

    /// Number of nodes in the diagram.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// All nodes in first-fit order (level-major, start-ascending).
    pub fn nodes(&self) -> &[SlotInterval] {
        &self.nodes
    }

    /// Admissible widths in ascending order; these are the diagram levels.
    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn interval(&self, id: NodeId) -> SlotInterval {
        self.nodes[id]
    }

    /// Node id of `interval`, or `None` when it is not admissible here.
    pub fn node_id(&self, interval: SlotInterval) -> Option<NodeId> {
        if interval.end >= self.slot_count {
            return None;
        }
        let li = self.levels.binary_search(&interval.width()).ok()?;
        Some(self.level_offsets[li] + interval.start)
    }

    fn require_id(&self, interval: SlotInterval) -> Result<NodeId, LatticeError> {
        self.node_id(interval)
            .ok_or(LatticeError::UnknownNode(interval))
    }

    /// Width-`width` nodes in ascending start order (the first-fit scan).
    pub fn level_nodes(&self, width: usize) -> Result<&[SlotInterval], LatticeError> {
        let li =
            self.levels
                .binary_search(&width)
                .map_err(|_| LatticeError::InadmissibleWidth {
                    width,
                    pattern: self.pattern,
                })?;
        let lo = self.level_offsets[li];
        let hi = lo + (self.slot_count - width + 1);
        Ok(&self.nodes[lo..hi])
    }

    /// Ids of the width-`width` nodes, ascending start order.
    pub fn level_node_ids(&self, width: usize) -> Result<std::ops::Range<NodeId>, LatticeError> {
        let li =
            self.levels
                .binary_search(&width)
                .map_err(|_| LatticeError::InadmissibleWidth {
                    width,
                    pattern: self.pattern,
                })?;
        let lo = self.level_offsets[li];
        Ok(lo..lo + (self.slot_count - width + 1))
    }

    pub fn down_neighbor_ids(&self, id: NodeId) -> &[NodeId] {
        &self.down[id]
    }

    pub fn up_neighbor_ids(&self, id: NodeId) -> &[NodeId] {
        &self.up[id]
    }

    /// Immediate predecessors (cover children) of `node`; empty on level 1.
    pub fn down_neighbors(&self, node: SlotInterval) -> Result<Vec<SlotInterval>, LatticeError> {
        let id = self.require_id(node)?;
        Ok(self.down[id].iter().map(|&c| self.nodes[c]).collect())
    }

    /// Immediate successors (cover parents) of `node`.
    pub fn up_neighbors(&self, node: SlotInterval) -> Result<Vec<SlotInterval>, LatticeError> {
        let id = self.require_id(node)?;
        Ok(self.up[id].iter().map(|&c| self.nodes[c]).collect())
    }

    /// Ids of every node strictly containing `id`, ascending.
    pub fn up_set_ids(&self, id: NodeId) -> Vec<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut queue: VecDeque<NodeId> = self.up[id].iter().copied().collect();
        let mut out = Vec::new();
        while let Some(n) = queue.pop_front() {
            if seen[n] {
                continue;
            }
            seen[n] = true;
            out.push(n);
            queue.extend(self.up[n].iter().copied());
        }
        out.sort_unstable();
        out
    }

    /// All admissible intervals strictly containing `node`.
    pub fn up_set(&self, node: SlotInterval) -> Result<Vec<SlotInterval>, LatticeError> {
        let id = self.require_id(node)?;
        Ok(self.up_set_ids(id).iter().map(|&n| self.nodes[n]).collect())
    }

    /// Connected components of the diagram after deleting the level-1 node
    /// of every occupied slot together with its up-set.
    ///
    /// Components are returned in ascending order of their smallest node
    /// and each component is sorted in node order. Deleting nothing yields
    /// one component; deleting everything yields none. The occupied slots
    /// must lie in `0..slot_count` (duplicates are fine).
    pub fn components_after(&self, occupied: &[usize]) -> Vec<Vec<SlotInterval>> {
        let mut removed = vec![false; self.nodes.len()];
        for &slot in occupied {
            assert!(slot < self.slot_count, "slot {slot} out of range");
            if !removed[slot] {
                removed[slot] = true;
                for n in self.up_set_ids(slot) {
                    removed[n] = true;
                }
            }
        }

        let mut component_of = vec![usize::MAX; self.nodes.len()];
        let mut components: Vec<Vec<SlotInterval>> = Vec::new();
        for root in 0..self.nodes.len() {
            if removed[root] || component_of[root] != usize::MAX {
                continue;
            }
            let idx = components.len();
            let mut members = Vec::new();
            let mut queue = VecDeque::from([root]);
            component_of[root] = idx;
            while let Some(n) = queue.pop_front() {
                members.push(n);
                for &other in self.down[n].iter().chain(self.up[n].iter()) {
                    if !removed[other] && component_of[other] == usize::MAX {
                        component_of[other] = idx;
                        queue.push_back(other);
                    }
                }
            }
            members.sort_unstable();
            components.push(members.iter().map(|&n| self.nodes[n]).collect());
        }
        components
    }

    /// Renders the Hasse diagram in DOT, one `rank=same` group per level
    /// and one undirected edge per cover pair.
    pub fn to_dot(&self) -> String {
        use std::fmt::Write;

        let mut out = String::new();
        let _ = writeln!(out, "graph hasse {{");
        let _ = writeln!(out, "  rankdir=BT;");
        let _ = writeln!(out, "  node [shape=ellipse];");
        for (li, &width) in self.levels.iter().enumerate() {
            let lo = self.level_offsets[li];
            let hi = lo + (self.slot_count - width + 1);
            let mut line = String::from("  { rank=same;");
            for node in &self.nodes[lo..hi] {
                let _ = write!(line, " \"{node}\";");
            }
            line.push_str(" }");
            let _ = writeln!(out, "{line}");
        }
        for (id, children) in self.down.iter().enumerate() {
            for &child in children {
                let _ = writeln!(
                    out,
                    "  \"{}\" -- \"{}\";",
                    self.nodes[child], self.nodes[id]
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(start: usize, end: usize) -> SlotInterval {
        SlotInterval::new(start, end)
    }

    /// Independent enumeration oracle: every [i, j] pair with an admissible
    /// width, in the same level-major order the lattice promises.
    fn enumerate_intervals(pattern: RequestPattern, slot_count: usize) -> Vec<SlotInterval> {
        let mut found: Vec<SlotInterval> = Vec::new();
        for i in 0..slot_count {
            for j in i..slot_count {
                if pattern.is_admissible(j - i + 1) {
                    found.push(iv(i, j));
                }
            }
        }
        found.sort_by_key(|n| (n.width(), n.start()));
        found
    }

    #[test]
    fn uniform_fig_1a_structure() {
        let lat = Lattice::build(RequestPattern::uniform(4), 4).unwrap();
        assert_eq!(lat.len(), 10);
        assert_eq!(lat.levels(), &[1, 2, 3, 4]);
        assert_eq!(
            lat.nodes(),
            &[
                iv(0, 0),
                iv(1, 1),
                iv(2, 2),
                iv(3, 3),
                iv(0, 1),
                iv(1, 2),
                iv(2, 3),
                iv(0, 2),
                iv(1, 3),
                iv(0, 3),
            ]
        );
    }

    #[test]
    fn pow2_fig_1b_structure() {
        let lat = Lattice::build(RequestPattern::pow2(2), 4).unwrap();
        assert_eq!(lat.len(), 8);
        assert_eq!(lat.levels(), &[1, 2, 4]);
        assert_eq!(
            lat.nodes(),
            &[
                iv(0, 0),
                iv(1, 1),
                iv(2, 2),
                iv(3, 3),
                iv(0, 1),
                iv(1, 2),
                iv(2, 3),
                iv(0, 3),
            ]
        );
    }

    #[test]
    fn degenerate_single_slot() {
        let lat = Lattice::build(RequestPattern::uniform(1), 1).unwrap();
        assert_eq!(lat.nodes(), &[iv(0, 0)]);
        assert!(lat.down_neighbor_ids(0).is_empty());
        assert!(lat.up_neighbor_ids(0).is_empty());
    }

    #[test]
    fn invalid_patterns_rejected() {
        assert!(matches!(
            Lattice::build(RequestPattern::uniform(5), 4),
            Err(LatticeError::InvalidPattern { .. })
        ));
        assert!(matches!(
            Lattice::build(RequestPattern::uniform(0), 4),
            Err(LatticeError::InvalidPattern { .. })
        ));
        assert!(matches!(
            Lattice::build(RequestPattern::pow2(3), 4),
            Err(LatticeError::InvalidPattern { .. })
        ));
        assert!(matches!(
            Lattice::build(RequestPattern::uniform(1), 0),
            Err(LatticeError::InvalidPattern { .. })
        ));
        // Shift amount past usize width must not panic.
        assert!(matches!(
            Lattice::expected_node_count(RequestPattern::pow2(80), 400),
            Err(LatticeError::InvalidPattern { .. })
        ));
    }

    #[test]
    fn node_counts_match_enumeration() {
        assert_eq!(
            Lattice::expected_node_count(RequestPattern::uniform(4), 4).unwrap(),
            10
        );
        assert_eq!(
            Lattice::expected_node_count(RequestPattern::pow2(2), 4).unwrap(),
            8
        );
        // Frozen from the enumeration oracle below.
        assert_eq!(
            Lattice::expected_node_count(RequestPattern::uniform(32), 400).unwrap(),
            12304
        );

        for slot_count in [1, 2, 3, 7, 16, 33] {
            for k in 1..=slot_count.min(12) {
                let pattern = RequestPattern::uniform(k);
                let expected = enumerate_intervals(pattern, slot_count).len();
                assert_eq!(
                    Lattice::expected_node_count(pattern, slot_count).unwrap(),
                    expected
                );
                assert_eq!(Lattice::build(pattern, slot_count).unwrap().len(), expected);
            }
            for p in 0..6 {
                if (1usize << p) > slot_count {
                    break;
                }
                let pattern = RequestPattern::pow2(p);
                let expected = enumerate_intervals(pattern, slot_count).len();
                assert_eq!(
                    Lattice::expected_node_count(pattern, slot_count).unwrap(),
                    expected
                );
                assert_eq!(Lattice::build(pattern, slot_count).unwrap().len(), expected);
            }
        }
    }

    #[test]
    fn node_order_matches_enumeration_oracle() {
        for (pattern, slot_count) in [
            (RequestPattern::uniform(5), 9),
            (RequestPattern::uniform(1), 3),
            (RequestPattern::pow2(3), 11),
        ] {
            let lat = Lattice::build(pattern, slot_count).unwrap();
            assert_eq!(lat.nodes(), enumerate_intervals(pattern, slot_count));
            for (id, &node) in lat.nodes().iter().enumerate() {
                assert_eq!(lat.node_id(node), Some(id));
            }
        }
    }

    #[test]
    fn up_set_of_s1_matches_worked_example() {
        let lat = Lattice::build(RequestPattern::uniform(4), 4).unwrap();
        let up: std::collections::BTreeSet<_> = lat.up_set(iv(1, 1)).unwrap().into_iter().collect();
        let expected: std::collections::BTreeSet<_> =
            [iv(0, 1), iv(1, 2), iv(0, 2), iv(1, 3), iv(0, 3)].into();
        assert_eq!(up, expected);
    }

    #[test]
    fn up_set_edge_cases() {
        let lat = Lattice::build(RequestPattern::uniform(4), 4).unwrap();
        assert!(lat.up_set(iv(0, 3)).unwrap().is_empty());
        assert_eq!(
            lat.up_set(iv(0, 4)),
            Err(LatticeError::UnknownNode(iv(0, 4)))
        );

        // pow2: supersets of {0} are only the width-2 and width-4 prefixes.
        let lat = Lattice::build(RequestPattern::pow2(2), 4).unwrap();
        assert_eq!(lat.up_set(iv(0, 0)).unwrap(), vec![iv(0, 1), iv(0, 3)]);
    }

    #[test]
    fn down_neighbors_examples() {
        let lat = Lattice::build(RequestPattern::uniform(4), 4).unwrap();
        assert_eq!(
            lat.down_neighbors(iv(1, 3)).unwrap(),
            vec![iv(1, 2), iv(2, 3)]
        );
        assert!(lat.down_neighbors(iv(2, 2)).unwrap().is_empty());

        let lat = Lattice::build(RequestPattern::pow2(2), 4).unwrap();
        assert_eq!(
            lat.down_neighbors(iv(0, 3)).unwrap(),
            vec![iv(0, 1), iv(1, 2), iv(2, 3)]
        );
        assert!(lat.down_neighbors(iv(3, 3)).unwrap().is_empty());
    }

    #[test]
    fn level_nodes_scan_order() {
        let lat = Lattice::build(RequestPattern::uniform(4), 4).unwrap();
        assert_eq!(lat.level_nodes(2).unwrap(), &[iv(0, 1), iv(1, 2), iv(2, 3)]);
        assert_eq!(lat.level_nodes(4).unwrap(), &[iv(0, 3)]);

        let lat = Lattice::build(RequestPattern::pow2(2), 4).unwrap();
        assert_eq!(
            lat.level_nodes(3),
            Err(LatticeError::InadmissibleWidth {
                width: 3,
                pattern: RequestPattern::pow2(2),
            })
        );
    }

    #[test]
    fn meet_and_join_examples() {
        assert_eq!(iv(0, 2).meet(&iv(1, 3)), Some(iv(1, 2)));
        assert_eq!(iv(0, 0).meet(&iv(2, 3)), None);
        assert_eq!(iv(1, 3).meet(&iv(1, 3)), Some(iv(1, 3)));

        let uniform4 = RequestPattern::uniform(4);
        assert_eq!(
            iv(0, 1).join(&iv(1, 2), uniform4),
            JoinResult::Joined(iv(0, 2))
        );
        assert_eq!(
            iv(0, 0).join(&iv(3, 3), RequestPattern::uniform(2)),
            JoinResult::OutOfLattice
        );
        assert_eq!(
            iv(0, 1).join(&iv(2, 3), RequestPattern::pow2(2)),
            JoinResult::Joined(iv(0, 3))
        );
        // Width-3 span is inadmissible under pow2.
        assert_eq!(
            iv(0, 1).join(&iv(1, 2), RequestPattern::pow2(2)),
            JoinResult::OutOfLattice
        );
    }

    #[test]
    fn fragmentation_components_after_assigning_s1() {
        let lat = Lattice::build(RequestPattern::uniform(4), 4).unwrap();
        let components = lat.components_after(&[1]);
        assert_eq!(
            components,
            vec![vec![iv(0, 0)], vec![iv(2, 2), iv(3, 3), iv(2, 3)]]
        );

        assert_eq!(lat.components_after(&[]).len(), 1);
        assert_eq!(lat.components_after(&[])[0].len(), 10);
        assert!(lat.components_after(&[0, 1, 2, 3]).is_empty());
    }

    #[test]
    fn pattern_parse_round_trip() {
        let p: RequestPattern = "uniform:4".parse().unwrap();
        assert_eq!(p, RequestPattern::uniform(4));
        assert_eq!(p.to_string(), "uniform:4");
        let p: RequestPattern = "pow2:3".parse().unwrap();
        assert_eq!(p, RequestPattern::pow2(3));
        assert!("uniform".parse::<RequestPattern>().is_err());
        assert!("grid:4".parse::<RequestPattern>().is_err());
        assert!("uniform:x".parse::<RequestPattern>().is_err());
    }

    #[test]
    fn dot_export_mentions_every_node_and_cover() {
        let lat = Lattice::build(RequestPattern::uniform(4), 4).unwrap();
        let dot = lat.to_dot();
        assert!(dot.starts_with("graph hasse {"));
        for node in lat.nodes() {
            assert!(dot.contains(&format!("\"{node}\"")), "missing {node}");
        }
        assert_eq!(dot.matches(" -- ").count(), 12);
        assert_eq!(dot.matches("rank=same").count(), 4);
        assert!(dot.contains("\"s_0\" -- \"s_{0,1}\";"));
    }
}
