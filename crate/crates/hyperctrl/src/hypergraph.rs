//! Hypergraphs, the infection-spread predicate, and infecting-set search.
//!
//! An infected node set A spreads through an edge E onto B = E \ A when E
//! touches A, B is nonempty, and every infected node of E lies in no other
//! edge that sticks out of A. Because growing A can disable a previously
//! admissible spread, the exact search explores the full reachable-set graph
//! instead of assuming confluence.

use std::collections::{HashMap, VecDeque};
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default node limit for the exact (breadth-first) infection search.
pub const DEFAULT_MAX_EXACT_NODES: usize = 24;
/// Default number of candidate subsets examined by minimal-set enumeration.
pub const DEFAULT_MAX_SUBSETS: usize = 1_000_000;

/// Node set X with an ordered family of edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    nodes: BTreeSet<u32>,
    edges: Vec<BTreeSet<u32>>,
}

/// A single validation failure, pointing at the offending edge or node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HypergraphIssue {
    EmptyEdge { index: usize },
    NodeOutsideVertexSet { index: usize, node: u32 },
    UncoveredNode { node: u32 },
    DuplicateEdge { index: usize, first_index: usize },
}

impl fmt::Display for HypergraphIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HypergraphIssue::EmptyEdge { index } => write!(f, "edge {index} is empty"),
            HypergraphIssue::NodeOutsideVertexSet { index, node } => {
                write!(f, "edge {index} contains node {node}, which is not a vertex")
            }
            HypergraphIssue::UncoveredNode { node } => {
                write!(f, "node {node} uncovered by any edge")
            }
            HypergraphIssue::DuplicateEdge { index, first_index } => {
                write!(f, "edge {index} duplicates edge {first_index}")
            }
        }
    }
}

/// Witness that a starting set infects the whole hypergraph: the strictly
/// increasing chain of infected sets plus, per transition, the edge used and
/// the newly infected increment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfectionSequence {
    pub sets: Vec<BTreeSet<u32>>,
    pub steps: Vec<InfectionStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfectionStep {
    pub edge_index: usize,
    pub edge: BTreeSet<u32>,
    pub infected: BTreeSet<u32>,
}

/// Search strategy for infecting-set queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Breadth-first over all reachable infected sets; sound and complete.
    Exact,
    /// Apply the first admissible spread repeatedly; fast but may miss.
    Greedy,
}

impl Hypergraph {
    pub fn new(
        nodes: impl IntoIterator<Item = u32>,
        edges: impl IntoIterator<Item = BTreeSet<u32>>,
    ) -> Self {
        Hypergraph { nodes: nodes.into_iter().collect(), edges: edges.into_iter().collect() }
    }

    pub fn nodes(&self) -> &BTreeSet<u32> {
        &self.nodes
    }

    pub fn edges(&self) -> &[BTreeSet<u32>] {
        &self.edges
    }

    /// Check the hypergraph axioms: edges nonempty, edges inside the vertex
    /// set, the union of edges covering it, and no duplicate edges.
    pub fn validate(&self) -> std::result::Result<(), Vec<HypergraphIssue>> {
        let mut issues = Vec::new();
        let mut covered: BTreeSet<u32> = BTreeSet::new();
        for (index, edge) in self.edges.iter().enumerate() {
            if edge.is_empty() {
                issues.push(HypergraphIssue::EmptyEdge { index });
            }
            for &node in edge {
                if !self.nodes.contains(&node) {
                    issues.push(HypergraphIssue::NodeOutsideVertexSet { index, node });
                }
            }
            if let Some(first_index) = self.edges[..index].iter().position(|e| e == edge) {
                issues.push(HypergraphIssue::DuplicateEdge { index, first_index });
            }
            covered.extend(edge.iter().copied());
        }
        for &node in &self.nodes {
            if !covered.contains(&node) {
                issues.push(HypergraphIssue::UncoveredNode { node });
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }

    fn edge_index_of(&self, edge: &BTreeSet<u32>) -> Option<usize> {
        self.edges.iter().position(|e| e == edge)
    }

    /// The infection-spread predicate. Returns the newly infected set
    /// B = E \ A when the spread through `edge` is admissible from
    /// `infected`, or None otherwise.
    pub fn can_spread(
        &self,
        infected: &BTreeSet<u32>,
        edge: &BTreeSet<u32>,
    ) -> Result<Option<BTreeSet<u32>>> {
        let edge_index = self
            .edge_index_of(edge)
            .ok_or_else(|| Error::Hypergraph(format!("{edge:?} is not an edge")))?;
        let ctx = BitContext::new(self);
        let a = ctx.mask_of(infected);
        Ok(ctx.spread(a, edge_index).map(|b| ctx.set_of(b)))
    }

    /// Exact or greedy search for a witness that `start` infects X.
    ///
    /// Exact mode memoizes visited infected sets and returns the first
    /// (breadth-first, edge-order deterministic) witness chain; it refuses
    /// node sets larger than `max_exact_nodes`. Greedy mode applies the first
    /// admissible spread until it covers X or gets stuck.
    pub fn find_infection_sequence(
        &self,
        start: &BTreeSet<u32>,
        mode: SearchMode,
        max_exact_nodes: usize,
    ) -> Result<Option<InfectionSequence>> {
        if start.is_empty() {
            return Err(Error::Hypergraph("starting set must be nonempty".into()));
        }
        if !start.is_subset(&self.nodes) {
            return Err(Error::Hypergraph(format!(
                "starting set {start:?} contains nodes outside the hypergraph"
            )));
        }
        if start == &self.nodes {
            return Ok(Some(InfectionSequence { sets: vec![start.clone()], steps: Vec::new() }));
        }
        match mode {
            SearchMode::Exact => {
                if self.nodes.len() > max_exact_nodes {
                    return Err(Error::Resource(format!(
                        "exact infection search limited to {max_exact_nodes} nodes, \
                         hypergraph has {}",
                        self.nodes.len()
                    )));
                }
                self.bfs_sequence(start)
            }
            SearchMode::Greedy => self.greedy_sequence(start),
        }
    }

    fn bfs_sequence(&self, start: &BTreeSet<u32>) -> Result<Option<InfectionSequence>> {
        let ctx = BitContext::new(self);
        let full = ctx.full_mask();
        let start_mask = ctx.mask_of(start);
        let mut parent: HashMap<u64, (u64, usize)> = HashMap::new();
        let mut queue = VecDeque::new();
        parent.insert(start_mask, (start_mask, usize::MAX));
        queue.push_back(start_mask);
        while let Some(state) = queue.pop_front() {
            for edge_index in 0..self.edges.len() {
                if let Some(b) = ctx.spread(state, edge_index) {
                    let next = state | b;
                    if parent.contains_key(&next) {
                        continue;
                    }
                    parent.insert(next, (state, edge_index));
                    if next == full {
                        return Ok(Some(self.rebuild_sequence(&ctx, &parent, next)));
                    }
                    queue.push_back(next);
                }
            }
        }
        Ok(None)
    }

    fn rebuild_sequence(
        &self,
        ctx: &BitContext,
        parent: &HashMap<u64, (u64, usize)>,
        terminal: u64,
    ) -> InfectionSequence {
        let mut chain = vec![terminal];
        let mut edges_used = Vec::new();
        let mut cur = terminal;
        loop {
            let &(prev, edge_index) = &parent[&cur];
            if edge_index == usize::MAX {
                break;
            }
            edges_used.push(edge_index);
            chain.push(prev);
            cur = prev;
        }
        chain.reverse();
        edges_used.reverse();
        let sets: Vec<BTreeSet<u32>> = chain.iter().map(|&m| ctx.set_of(m)).collect();
        let steps = edges_used
            .iter()
            .enumerate()
            .map(|(i, &edge_index)| InfectionStep {
                edge_index,
                edge: self.edges[edge_index].clone(),
                infected: sets[i + 1].difference(&sets[i]).copied().collect(),
            })
            .collect();
        InfectionSequence { sets, steps }
    }

    fn greedy_sequence(&self, start: &BTreeSet<u32>) -> Result<Option<InfectionSequence>> {
        let ctx = BitContext::new(self);
        let full = ctx.full_mask();
        let mut state = ctx.mask_of(start);
        let mut sets = vec![ctx.set_of(state)];
        let mut steps = Vec::new();
        while state != full {
            let mut advanced = false;
            for edge_index in 0..self.edges.len() {
                if let Some(b) = ctx.spread(state, edge_index) {
                    let next = state | b;
                    steps.push(InfectionStep {
                        edge_index,
                        edge: self.edges[edge_index].clone(),
                        infected: ctx.set_of(b),
                    });
                    sets.push(ctx.set_of(next));
                    state = next;
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                return Ok(None);
            }
        }
        Ok(Some(InfectionSequence { sets, steps }))
    }

    /// True iff an exact search finds a witness chain from `start` to X.
    pub fn is_infecting(&self, start: &BTreeSet<u32>, max_exact_nodes: usize) -> Result<bool> {
        Ok(self.find_infection_sequence(start, SearchMode::Exact, max_exact_nodes)?.is_some())
    }

    /// Enumerate candidate sets by increasing cardinality up to `max_size`
    /// and return the infecting sets of the smallest cardinality that admits
    /// any (all of them, or just the first if `find_all` is false).
    ///
    /// `max_subsets` caps the number of candidates examined; exceeding it is
    /// a resource error carrying the partial results found so far.
    pub fn minimal_infecting_sets(
        &self,
        max_size: usize,
        find_all: bool,
        max_exact_nodes: usize,
        max_subsets: usize,
    ) -> Result<Vec<BTreeSet<u32>>> {
        if max_size == 0 {
            return Err(Error::Hypergraph("max_size must be at least 1".into()));
        }
        let nodes: Vec<u32> = self.nodes.iter().copied().collect();
        let mut tested = 0usize;
        for size in 1..=max_size.min(nodes.len()) {
            let mut hits: Vec<BTreeSet<u32>> = Vec::new();
            let mut combo = Combinations::new(nodes.len(), size);
            while let Some(indices) = combo.next() {
                tested += 1;
                if tested > max_subsets {
                    return Err(Error::Resource(format!(
                        "subset budget {max_subsets} exceeded after testing {} candidates; \
                         partial results at cardinality {size}: {hits:?}",
                        tested - 1
                    )));
                }
                let candidate: BTreeSet<u32> = indices.iter().map(|&i| nodes[i]).collect();
                if self.is_infecting(&candidate, max_exact_nodes)? {
                    if !find_all {
                        return Ok(vec![candidate]);
                    }
                    hits.push(candidate);
                }
            }
            if !hits.is_empty() {
                return Ok(hits);
            }
        }
        Ok(Vec::new())
    }
}

impl InfectionSequence {
    /// Re-verify the witness step by step against the hypergraph.
    pub fn verify(&self, h: &Hypergraph) -> bool {
        if self.sets.is_empty() || self.sets.last() != Some(h.nodes()) {
            return false;
        }
        if self.steps.len() + 1 != self.sets.len() {
            return false;
        }
        for (i, step) in self.steps.iter().enumerate() {
            let cur = &self.sets[i];
            let next = &self.sets[i + 1];
            if !cur.is_subset(next) || cur == next {
                return false;
            }
            match h.can_spread(cur, &step.edge) {
                Ok(Some(b)) => {
                    let expect: BTreeSet<u32> = next.difference(cur).copied().collect();
                    if b != expect || step.infected != expect {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        true
    }

    /// Render the chain the way worked examples are usually written:
    /// {1,2,4} ⊊ {1,2,3,4,5} ⊊ {1,2,3,4,5,6}.
    pub fn render_chain(&self) -> String {
        self.sets.iter().map(|s| render_set(s)).collect::<Vec<_>>().join(" ⊊ ")
    }
}

pub(crate) fn render_set(s: &BTreeSet<u32>) -> String {
    let inner = s.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",");
    format!("{{{inner}}}")
}

/// Bitmask view of a hypergraph for the search loops (node count <= 64).
struct BitContext<'a> {
    order: Vec<u32>,
    edge_masks: Vec<u64>,
    /// For each node position, the indices of edges containing it.
    node_edges: Vec<Vec<usize>>,
    h: &'a Hypergraph,
}

impl<'a> BitContext<'a> {
    fn new(h: &'a Hypergraph) -> Self {
        let order: Vec<u32> = h.nodes.iter().copied().collect();
        assert!(order.len() <= 64, "bitmask search supports at most 64 nodes");
        let pos_of = |n: u32| order.binary_search(&n).expect("edge nodes validated");
        let edge_masks: Vec<u64> = h
            .edges
            .iter()
            .map(|e| e.iter().fold(0u64, |m, &n| m | (1u64 << pos_of(n))))
            .collect();
        let mut node_edges = vec![Vec::new(); order.len()];
        for (ei, e) in h.edges.iter().enumerate() {
            for &n in e {
                node_edges[pos_of(n)].push(ei);
            }
        }
        BitContext { order, edge_masks, node_edges, h }
    }

    fn full_mask(&self) -> u64 {
        if self.order.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.order.len()) - 1
        }
    }

    fn mask_of(&self, s: &BTreeSet<u32>) -> u64 {
        s.iter().fold(0u64, |m, &n| {
            m | (1u64 << self.order.binary_search(&n).expect("node in hypergraph"))
        })
    }

    fn set_of(&self, mask: u64) -> BTreeSet<u32> {
        self.order
            .iter()
            .enumerate()
            .filter(|(p, _)| mask & (1u64 << p) != 0)
            .map(|(_, &n)| n)
            .collect()
    }

    /// The spread predicate on masks: B when edge `ei` can spread from `a`.
    fn spread(&self, a: u64, ei: usize) -> Option<u64> {
        let e = self.edge_masks[ei];
        let inter = e & a;
        let b = e & !a;
        if inter == 0 || b == 0 {
            return None;
        }
        // every infected node of E must see no other edge outside A
        let mut rest = inter;
        while rest != 0 {
            let pos = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            for &fi in &self.node_edges[pos] {
                if fi == ei {
                    continue;
                }
                let f = self.edge_masks[fi];
                if f & !a != 0 {
                    return None;
                }
            }
        }
        let _ = self.h;
        Some(b)
    }
}

/// Lexicographic k-combinations of 0..n.
struct Combinations {
    n: usize,
    k: usize,
    state: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        let state = if k <= n { Some((0..k).collect()) } else { None };
        Combinations { n, k, state }
    }

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.state.clone()?;
        // advance
        let mut next = current.clone();
        let mut i = self.k;
        loop {
            if i == 0 {
                self.state = None;
                break;
            }
            i -= 1;
            if next[i] + 1 <= self.n - (self.k - i) {
                next[i] += 1;
                for j in (i + 1)..self.k {
                    next[j] = next[j - 1] + 1;
                }
                self.state = Some(next);
                break;
            }
        }
        Some(current)
    }
}
