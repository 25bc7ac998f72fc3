//! Physical network graph, edge-list parsing and masked shortest-path search.
//!
//! Links are bidirectional single fibers: one spectrum shared by both
//! directions. Link indices follow file order and are the bit positions of
//! every [`LinkMask`]; node indices follow first appearance in the file.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

pub type NodeIndex = usize;
pub type LinkIndex = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("line {line}: expected two whitespace-separated labels, got {text:?}")]
    Parse { line: usize, text: String },
    #[error("line {line}: self-loop on {label:?}")]
    SelfLoop { line: usize, label: String },
    #[error("line {line}: duplicate link {a:?} {b:?}")]
    DuplicateLink { line: usize, a: String, b: String },
    #[error("invalid endpoint: {0}")]
    InvalidEndpoint(String),
}

/// A bit per link; 1 means the link is available (or included).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkMask {
    len: usize,
    words: Vec<u64>,
}

impl LinkMask {
    pub fn all_set(len: usize) -> Self {
        let mut mask = Self {
            len,
            words: vec![!0u64; len.div_ceil(64)],
        };
        mask.clear_tail();
        mask
    }

    pub fn all_clear(len: usize) -> Self {
        Self {
            len,
            words: vec![0u64; len.div_ceil(64)],
        }
    }

    fn clear_tail(&mut self) {
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, link: LinkIndex) -> bool {
        assert!(link < self.len, "link {link} out of range");
        self.words[link / 64] >> (link % 64) & 1 == 1
    }

    pub fn set(&mut self, link: LinkIndex, value: bool) {
        assert!(link < self.len, "link {link} out of range");
        let bit = 1u64 << (link % 64);
        if value {
            self.words[link / 64] |= bit;
        } else {
            self.words[link / 64] &= !bit;
        }
    }

    /// Intersects `self` with `other` in place.
    pub fn and_assign(&mut self, other: &LinkMask) {
        assert_eq!(self.len, other.len, "mask length mismatch");
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w &= o;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

impl fmt::Display for LinkMask {
    /// 0/1 character per link in link-index order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for link in 0..self.len {
            f.write_str(if self.get(link) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Undirected mesh of named nodes with densely indexed links.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    names: Vec<String>,
    links: Vec<(NodeIndex, NodeIndex)>,
    adjacency: Vec<Vec<(NodeIndex, LinkIndex)>>,
}

impl Topology {
    /// Parses an edge-list document: one link per line as two
    /// whitespace-separated node labels. Lines starting with `#` and blank
    /// lines are ignored. Node order is first appearance, link order is
    /// line order.
    pub fn parse(text: &str) -> Result<Self, TopologyError> {
        let mut names: Vec<String> = Vec::new();
        let mut links: Vec<(NodeIndex, NodeIndex)> = Vec::new();
        let mut adjacency: Vec<Vec<(NodeIndex, LinkIndex)>> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = trimmed.split_whitespace();
            let (a, b) = match (fields.next(), fields.next(), fields.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(TopologyError::Parse {
                        line,
                        text: trimmed.to_string(),
                    })
                }
            };
            if a == b {
                return Err(TopologyError::SelfLoop {
                    line,
                    label: a.to_string(),
                });
            }
            let mut intern = |label: &str| -> NodeIndex {
                if let Some(i) = names.iter().position(|n| n == label) {
                    i
                } else {
                    names.push(label.to_string());
                    adjacency.push(Vec::new());
                    names.len() - 1
                }
            };
            let ai = intern(a);
            let bi = intern(b);
            if links
                .iter()
                .any(|&(x, y)| (x, y) == (ai, bi) || (x, y) == (bi, ai))
            {
                return Err(TopologyError::DuplicateLink {
                    line,
                    a: a.to_string(),
                    b: b.to_string(),
                });
            }
            let link = links.len();
            links.push((ai, bi));
            adjacency[ai].push((bi, link));
            adjacency[bi].push((ai, link));
        }

        Ok(Self {
            names,
            links,
            adjacency,
        })
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn node_name(&self, node: NodeIndex) -> &str {
        &self.names[node]
    }

    pub fn node_index(&self, label: &str) -> Option<NodeIndex> {
        self.names.iter().position(|n| n == label)
    }

    pub fn link_endpoints(&self, link: LinkIndex) -> (NodeIndex, NodeIndex) {
        self.links[link]
    }

    pub fn links(&self) -> &[(NodeIndex, NodeIndex)] {
        &self.links
    }

    /// Neighbors of `node` as `(neighbor, link)` pairs in file order.
    pub fn neighbors(&self, node: NodeIndex) -> &[(NodeIndex, LinkIndex)] {
        &self.adjacency[node]
    }

    pub fn full_mask(&self) -> LinkMask {
        LinkMask::all_set(self.links.len())
    }

    pub fn is_connected(&self) -> bool {
        if self.names.len() <= 1 {
            return true;
        }
        let mut seen = vec![false; self.names.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(n) = queue.pop_front() {
            for &(next, _) in &self.adjacency[n] {
                if !seen[next] {
                    seen[next] = true;
                    count += 1;
                    queue.push_back(next);
                }
            }
        }
        count == self.names.len()
    }

    /// Minimum-hop path from `src` to `dst` using only mask-enabled links,
    /// returned as the link sequence, or `None` when `dst` is unreachable.
    ///
    /// Ties are broken deterministically: among all minimum-hop paths the
    /// one with the lexicographically smallest node-index sequence wins.
    pub fn shortest_path(
        &self,
        mask: &LinkMask,
        src: NodeIndex,
        dst: NodeIndex,
    ) -> Result<Option<Vec<LinkIndex>>, TopologyError> {
        let n = self.names.len();
        if src >= n || dst >= n {
            return Err(TopologyError::InvalidEndpoint(format!(
                "node index out of range (src {src}, dst {dst}, {n} nodes)"
            )));
        }
        if src == dst {
            return Err(TopologyError::InvalidEndpoint(format!(
                "src and dst are both {:?}",
                self.names[src]
            )));
        }
        assert_eq!(mask.len(), self.links.len(), "mask length mismatch");

        // Hop distances to dst over enabled links.
        let mut dist = vec![usize::MAX; n];
        dist[dst] = 0;
        let mut queue = VecDeque::from([dst]);
        while let Some(node) = queue.pop_front() {
            for &(next, link) in &self.adjacency[node] {
                if mask.get(link) && dist[next] == usize::MAX {
                    dist[next] = dist[node] + 1;
                    queue.push_back(next);
                }
            }
        }
        if dist[src] == usize::MAX {
            return Ok(None);
        }

        // Walk downhill choosing the smallest next node index at each hop;
        // this yields the lexicographically smallest node sequence.
        let mut path = Vec::with_capacity(dist[src]);
        let mut node = src;
        while node != dst {
            let step = self.adjacency[node]
                .iter()
                .filter(|&&(next, link)| mask.get(link) && dist[next] + 1 == dist[node])
                .min_by_key(|&&(next, _)| next)
                .copied()
                .expect("a downhill neighbor exists while dist is finite");
            path.push(step.1);
            node = step.0;
        }
        Ok(Some(path))
    }

    /// Expands a link path starting at `src` into the node sequence it visits.
    pub fn path_nodes(&self, src: NodeIndex, path: &[LinkIndex]) -> Vec<NodeIndex> {
        let mut nodes = vec![src];
        let mut at = src;
        for &link in path {
            let (a, b) = self.links[link];
            at = if a == at { b } else { a };
            nodes.push(at);
        }
        nodes
    }
}
