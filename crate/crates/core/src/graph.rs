//! Undirected simple graph with per-edge survival state.

use std::collections::HashMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of an agent in `[0, N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub usize);

impl AgentId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for AgentId {
    fn from(i: usize) -> Self {
        AgentId(i)
    }
}

/// A relation between two agents.
///
/// `q` is the probability that the tie survives the end of a period and `n`
/// counts the successful interactions on it during the current period.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeState {
    lo: AgentId,
    hi: AgentId,
    pub q: f64,
    pub n: u32,
}

impl EdgeState {
    /// Endpoints with the smaller id first.
    pub fn endpoints(&self) -> (AgentId, AgentId) {
        (self.lo, self.hi)
    }
}

fn key(a: AgentId, b: AgentId) -> (usize, usize) {
    if a.0 < b.0 {
        (a.0, b.0)
    } else {
        (b.0, a.0)
    }
}

#[derive(Clone, Debug)]
pub struct SocialGraph {
    neighbors: Vec<Vec<AgentId>>,
    edges: Vec<EdgeState>,
    // (lo, hi) -> position in `edges`; lookup only, never iterated
    slots: HashMap<(usize, usize), usize>,
}

impl SocialGraph {
    /// Graph with `n` isolated agents.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("graph needs at least one node".into()));
        }
        Ok(SocialGraph {
            neighbors: vec![Vec::new(); n],
            edges: Vec::new(),
            slots: HashMap::new(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, i: AgentId) -> usize {
        self.neighbors[i.0].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn neighbors(&self, i: AgentId) -> &[AgentId] {
        &self.neighbors[i.0]
    }

    pub fn has_edge(&self, a: AgentId, b: AgentId) -> bool {
        self.slots.contains_key(&key(a, b))
    }

    pub fn edges(&self) -> &[EdgeState] {
        &self.edges
    }

    pub fn edges_mut(&mut self) -> impl Iterator<Item = &mut EdgeState> {
        self.edges.iter_mut()
    }

    pub fn edge(&self, a: AgentId, b: AgentId) -> Option<&EdgeState> {
        self.slots.get(&key(a, b)).map(|&s| &self.edges[s])
    }

    pub fn edge_mut(&mut self, a: AgentId, b: AgentId) -> Option<&mut EdgeState> {
        match self.slots.get(&key(a, b)) {
            Some(&s) => Some(&mut self.edges[s]),
            None => None,
        }
    }

    /// Edge at storage position `slot`, as used by [`SocialGraph::random_edge_slot`].
    pub fn edge_at_mut(&mut self, slot: usize) -> &mut EdgeState {
        &mut self.edges[slot]
    }

    fn check_node(&self, i: AgentId) -> Result<()> {
        if i.0 >= self.node_count() {
            return Err(Error::InvalidArgument(format!(
                "agent {} out of range for {} nodes",
                i,
                self.node_count()
            )));
        }
        Ok(())
    }

    /// Insert the edge `{a, b}` with survival weight `q` and a zero success count.
    ///
    /// The graph is left untouched on error; a duplicate insertion reports
    /// [`Error::DuplicateEdge`] and the caller decides whether that matters.
    pub fn add_edge(&mut self, a: AgentId, b: AgentId, q: f64) -> Result<()> {
        self.check_node(a)?;
        self.check_node(b)?;
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::InvalidArgument(format!("edge weight q={q} outside (0, 1]")));
        }
        let k = key(a, b);
        if self.slots.contains_key(&k) {
            return Err(Error::DuplicateEdge(AgentId(k.0), AgentId(k.1)));
        }
        self.slots.insert(k, self.edges.len());
        self.edges.push(EdgeState {
            lo: AgentId(k.0),
            hi: AgentId(k.1),
            q,
            n: 0,
        });
        self.neighbors[a.0].push(b);
        self.neighbors[b.0].push(a);
        Ok(())
    }

    /// Remove `{a, b}` and return its final state.
    ///
    /// Storage positions of other edges may change (swap-remove).
    pub fn remove_edge(&mut self, a: AgentId, b: AgentId) -> Result<EdgeState> {
        let k = key(a, b);
        let slot = self
            .slots
            .remove(&k)
            .ok_or(Error::MissingEdge(AgentId(k.0), AgentId(k.1)))?;
        let removed = self.edges.swap_remove(slot);
        if let Some(moved) = self.edges.get(slot) {
            self.slots.insert((moved.lo.0, moved.hi.0), slot);
        }
        for (u, v) in [(a, b), (b, a)] {
            let list = &mut self.neighbors[u.0];
            let pos = list.iter().position(|&x| x == v).expect("adjacency out of sync");
            list.swap_remove(pos);
        }
        Ok(removed)
    }

    /// Storage position of an edge drawn uniformly over all edges.
    pub fn random_edge_slot<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        if self.edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Ok(rng.random_range(0..self.edges.len()))
    }

    /// Endpoints of an edge drawn uniformly over all edges.
    ///
    /// Each agent is therefore hit with probability proportional to its degree.
    pub fn random_edge<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(AgentId, AgentId)> {
        let slot = self.random_edge_slot(rng)?;
        Ok(self.edges[slot].endpoints())
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    /// Isolated agents form singleton components.
    pub fn connected_components(&self) -> Vec<Vec<AgentId>> {
        let n = self.node_count();
        let mut dsu = DisjointSets::new(n);
        for e in &self.edges {
            dsu.union(e.lo.0, e.hi.0);
        }
        let mut block_of_root = vec![usize::MAX; n];
        let mut blocks: Vec<Vec<AgentId>> = Vec::new();
        for i in 0..n {
            let r = dsu.find(i);
            if block_of_root[r] == usize::MAX {
                block_of_root[r] = blocks.len();
                blocks.push(Vec::new());
            }
            blocks[block_of_root[r]].push(AgentId(i));
        }
        blocks
    }

    pub fn component_count(&self) -> usize {
        let mut dsu = DisjointSets::new(self.node_count());
        let mut count = self.node_count();
        for e in &self.edges {
            if dsu.union(e.lo.0, e.hi.0) {
                count -= 1;
            }
        }
        count
    }

    /// Edges as sorted `(lo, hi)` pairs, independent of storage order.
    pub fn sorted_edge_list(&self) -> Vec<(AgentId, AgentId, f64)> {
        let mut list: Vec<_> = self.edges.iter().map(|e| (e.lo, e.hi, e.q)).collect();
        list.sort_by_key(|&(a, b, _)| (a, b));
        list
    }

    /// Verify the internal indices agree with each other. Used by tests.
    pub fn is_consistent(&self) -> bool {
        let degree_sum: usize = self.neighbors.iter().map(Vec::len).sum();
        if degree_sum != 2 * self.edges.len() || self.slots.len() != self.edges.len() {
            return false;
        }
        self.edges.iter().enumerate().all(|(slot, e)| {
            e.lo < e.hi
                && self.slots.get(&(e.lo.0, e.hi.0)) == Some(&slot)
                && self.neighbors[e.lo.0].contains(&e.hi)
                && self.neighbors[e.hi.0].contains(&e.lo)
        })
    }
}

/// Union-find with path halving and union by size.
struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    /// Returns true if `a` and `b` were in different sets.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}
