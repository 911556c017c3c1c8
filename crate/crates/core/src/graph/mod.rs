//! Directed "best friend" graph and the structural metrics the feature
//! vectors are built from.
//!
//! Nodes are stored densely; every public query by id resolves through an
//! ordered index, and the `*_ix` variants work on positions directly.
//! Forward and reverse adjacency lists are kept sorted so membership tests
//! and neighbourhood intersections are merges.

mod crawl;
mod pagerank;

pub use crawl::{bfs_crawl, CrawlConfig, MAX_FRIENDS};
pub use pagerank::{pagerank, PageRank, PageRankConfig};

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

/// One profile of the social platform.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NodeRecord {
    pub id: String,
    pub is_artist: bool,
    pub hits: u64,
    pub comments: u64,
    pub label: String,
    pub genre: String,
}

impl NodeRecord {
    pub fn artist(id: impl Into<String>) -> Self {
        NodeRecord {
            id: id.into(),
            is_artist: true,
            hits: 0,
            comments: 0,
            label: String::new(),
            genre: String::new(),
        }
    }

    pub fn fan(id: impl Into<String>) -> Self {
        NodeRecord { is_artist: false, ..Self::artist(id) }
    }
}

/// Which predecessors an in-degree counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Whole,
    ArtistOnly,
}

/// Rows dropped while building a graph from an edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl BuildReport {
    pub fn dropped(&self) -> usize {
        self.self_loops + self.duplicates
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGraph {
    nodes: Vec<NodeRecord>,
    index: BTreeMap<String, usize>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    edge_count: usize,
}

impl DirectedGraph {
    /// Builds a graph from node rows and `(emitter, receiver)` id pairs.
    ///
    /// Self-loops and repeated edges are dropped and counted. An edge naming
    /// an undeclared node is rejected with its row number.
    pub fn from_edge_list<S: AsRef<str>>(
        nodes: Vec<NodeRecord>,
        edges: &[(S, S)],
    ) -> Result<(Self, BuildReport)> {
        let mut index = BTreeMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id.clone(), i).is_some() {
                return Err(Error::DuplicateNode(n.id.clone()));
            }
        }
        let mut pairs = Vec::with_capacity(edges.len());
        for (row, (a, b)) in edges.iter().enumerate() {
            let lookup = |id: &str| {
                index.get(id).copied().ok_or_else(|| Error::UnknownEndpoint {
                    row,
                    id: id.to_string(),
                })
            };
            pairs.push((lookup(a.as_ref())?, lookup(b.as_ref())?));
        }
        Ok(Self::assemble(nodes, index, &pairs))
    }

    /// Builds a graph from node rows and positional edges. Panics if an
    /// index is out of range or node ids repeat.
    pub fn from_indexed(nodes: Vec<NodeRecord>, edges: &[(usize, usize)]) -> (Self, BuildReport) {
        let mut index = BTreeMap::new();
        for (i, n) in nodes.iter().enumerate() {
            assert!(index.insert(n.id.clone(), i).is_none(), "duplicate node id {}", n.id);
        }
        Self::assemble(nodes, index, edges)
    }

    fn assemble(
        nodes: Vec<NodeRecord>,
        index: BTreeMap<String, usize>,
        edges: &[(usize, usize)],
    ) -> (Self, BuildReport) {
        let n = nodes.len();
        let mut report = BuildReport::default();
        let mut succ = alloc::vec![Vec::new(); n];
        for &(a, b) in edges {
            assert!(a < n && b < n, "edge ({a}, {b}) out of range for {n} nodes");
            if a == b {
                report.self_loops += 1;
            } else {
                succ[a].push(b);
            }
        }
        let mut edge_count = 0;
        for list in succ.iter_mut() {
            let before = list.len();
            list.sort_unstable();
            list.dedup();
            report.duplicates += before - list.len();
            edge_count += list.len();
        }
        let mut pred = alloc::vec![Vec::new(); n];
        for (a, list) in succ.iter().enumerate() {
            for &b in list {
                pred[b].push(a);
            }
        }
        // pushed in increasing `a`, so already sorted
        let g = DirectedGraph { nodes, index, succ, pred, edge_count };
        (g, report)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn node(&self, ix: usize) -> &NodeRecord {
        &self.nodes[ix]
    }

    pub fn ix(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn successors(&self, ix: usize) -> &[usize] {
        &self.succ[ix]
    }

    pub fn predecessors(&self, ix: usize) -> &[usize] {
        &self.pred[ix]
    }

    pub fn out_degree(&self, ix: usize) -> usize {
        self.succ[ix].len()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.succ[from].binary_search(&to).is_ok()
    }

    /// All edges as positional pairs, ordered by emitter then receiver.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(a, list)| list.iter().map(move |&b| (a, b)))
    }

    pub fn in_degree_ix(&self, ix: usize, scope: Scope) -> usize {
        match scope {
            Scope::Whole => self.pred[ix].len(),
            Scope::ArtistOnly => self.pred[ix].iter().filter(|&&p| self.nodes[p].is_artist).count(),
        }
    }

    pub fn in_degree(&self, id: &str, scope: Scope) -> Result<usize> {
        Ok(self.in_degree_ix(self.ix(id)?, scope))
    }

    /// Share of a node's out-links that are returned. Zero for a node
    /// without out-links.
    pub fn reciprocity_rate_ix(&self, ix: usize) -> f64 {
        let out = &self.succ[ix];
        if out.is_empty() {
            return 0.0;
        }
        let back = out.iter().filter(|&&s| self.has_edge(s, ix)).count();
        back as f64 / out.len() as f64
    }

    pub fn reciprocity_rate(&self, id: &str) -> Result<f64> {
        Ok(self.reciprocity_rate_ix(self.ix(id)?))
    }

    /// Fraction of all edges whose reverse edge is present.
    pub fn reciprocal_fraction(&self) -> f64 {
        if self.edge_count == 0 {
            return 0.0;
        }
        let r = self.edges().filter(|&(a, b)| self.has_edge(b, a)).count();
        r as f64 / self.edge_count as f64
    }

    pub fn common_predecessors_ix(&self, a: usize, b: usize) -> usize {
        sorted_intersection(&self.pred[a], &self.pred[b], a, b)
    }

    pub fn common_successors_ix(&self, a: usize, b: usize) -> usize {
        sorted_intersection(&self.succ[a], &self.succ[b], a, b)
    }

    /// Nodes that point at both `a` and `b`, not counting `a` or `b`.
    pub fn common_predecessors(&self, a: &str, b: &str) -> Result<usize> {
        let (a, b) = self.distinct_pair(a, b)?;
        Ok(self.common_predecessors_ix(a, b))
    }

    /// Nodes both `a` and `b` point at, not counting `a` or `b`.
    pub fn common_successors(&self, a: &str, b: &str) -> Result<usize> {
        let (a, b) = self.distinct_pair(a, b)?;
        Ok(self.common_successors_ix(a, b))
    }

    fn distinct_pair(&self, a: &str, b: &str) -> Result<(usize, usize)> {
        if a == b {
            return Err(Error::SameNode(a.to_string()));
        }
        Ok((self.ix(a)?, self.ix(b)?))
    }

    /// 1 if the reverse of an existing edge is also present, else 0.
    pub fn is_reciprocal(&self, emitter: &str, receiver: &str) -> Result<u8> {
        let (a, b) = (self.ix(emitter)?, self.ix(receiver)?);
        if !self.has_edge(a, b) {
            return Err(Error::MissingEdge {
                emitter: emitter.to_string(),
                receiver: receiver.to_string(),
            });
        }
        Ok(self.has_edge(b, a) as u8)
    }

    /// Subgraph on the nodes where `keep` is true, in their original order.
    pub fn induced_subgraph(&self, keep: &[bool]) -> DirectedGraph {
        assert_eq!(keep.len(), self.node_count());
        let mut remap = alloc::vec![usize::MAX; self.node_count()];
        let mut nodes = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if keep[i] {
                remap[i] = nodes.len();
                nodes.push(n.clone());
            }
        }
        let edges: Vec<(usize, usize)> = self
            .edges()
            .filter(|&(a, b)| keep[a] && keep[b])
            .map(|(a, b)| (remap[a], remap[b]))
            .collect();
        Self::from_indexed(nodes, &edges).0
    }

    /// Drops every non-artist profile and the links touching it.
    pub fn induced_artist_subgraph(&self) -> DirectedGraph {
        let keep: Vec<bool> = self.nodes.iter().map(|n| n.is_artist).collect();
        self.induced_subgraph(&keep)
    }
}

/// Size of the intersection of two sorted lists, skipping `a` and `b`.
fn sorted_intersection(x: &[usize], y: &[usize], a: usize, b: usize) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                if x[i] != a && x[i] != b {
                    count += 1;
                }
                i += 1;
                j += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use std::collections::BTreeSet;

    fn graph(ids: &[&str], edges: &[(&str, &str)]) -> DirectedGraph {
        let nodes = ids.iter().map(|&i| NodeRecord::artist(i)).collect();
        DirectedGraph::from_edge_list(nodes, edges).unwrap().0
    }

    fn random_graph(n: usize, p: f64, seed: u64) -> DirectedGraph {
        use rand::Rng;
        let mut rng = crate::rng::seeded(seed);
        let nodes = (0..n)
            .map(|i| NodeRecord { is_artist: rng.random_bool(0.5), ..NodeRecord::fan(alloc::format!("n{i}")) })
            .collect();
        let mut edges = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && rng.random_bool(p) {
                    edges.push((a, b));
                }
            }
        }
        DirectedGraph::from_indexed(nodes, &edges).0
    }

    #[test]
    fn two_cycle_has_consistent_transpose() {
        let g = graph(&["A", "B", "C"], &[("A", "B"), ("B", "A")]);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.successors(0), &[1]);
        assert_eq!(g.predecessors(0), &[1]);
        assert!(g.predecessors(2).is_empty());
    }

    #[test]
    fn self_loops_and_duplicates_are_dropped() {
        let nodes = vec![NodeRecord::artist("A"), NodeRecord::artist("B")];
        let (g, rep) =
            DirectedGraph::from_edge_list(nodes, &[("A", "A"), ("A", "B"), ("A", "B")]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(rep, BuildReport { self_loops: 1, duplicates: 1 });
        assert_eq!(rep.dropped(), 2);
    }

    #[test]
    fn unknown_endpoint_is_named() {
        let nodes = vec![NodeRecord::artist("A")];
        let err = DirectedGraph::from_edge_list(nodes, &[("A", "Z")]).unwrap_err();
        assert_eq!(err, Error::UnknownEndpoint { row: 0, id: "Z".into() });
        assert!(alloc::format!("{err}").contains('Z'));
    }

    #[test]
    fn duplicate_node_ids_rejected() {
        let nodes = vec![NodeRecord::artist("A"), NodeRecord::fan("A")];
        let edges: [(&str, &str); 0] = [];
        assert_eq!(
            DirectedGraph::from_edge_list(nodes, &edges).unwrap_err(),
            Error::DuplicateNode("A".into())
        );
    }

    #[test]
    fn in_degree_scopes() {
        let g = graph(&["A", "B", "C"], &[("A", "B"), ("C", "B")]);
        assert_eq!(g.in_degree("B", Scope::Whole).unwrap(), 2);
        assert_eq!(g.in_degree("B", Scope::ArtistOnly).unwrap(), 2);

        let nodes = vec![NodeRecord::artist("A"), NodeRecord::fan("F"), NodeRecord::artist("C")];
        let g = DirectedGraph::from_edge_list(nodes, &[("F", "A"), ("C", "A")]).unwrap().0;
        assert_eq!(g.in_degree("A", Scope::Whole).unwrap(), 2);
        assert_eq!(g.in_degree("A", Scope::ArtistOnly).unwrap(), 1);
        assert_eq!(g.in_degree("C", Scope::Whole).unwrap(), 0);
        assert_eq!(g.in_degree("C", Scope::ArtistOnly).unwrap(), 0);
        assert!(matches!(g.in_degree("Q", Scope::Whole), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn reciprocity_rate_cases() {
        let g = graph(&["A", "B", "C"], &[("A", "B"), ("B", "A"), ("A", "C")]);
        assert_eq!(g.reciprocity_rate("A").unwrap(), 0.5);
        assert_eq!(g.reciprocity_rate("C").unwrap(), 0.0);
        assert_eq!(g.reciprocity_rate("B").unwrap(), 1.0);
        assert!(g.reciprocity_rate("nope").is_err());
    }

    #[test]
    fn common_neighbours() {
        let g = graph(&["X", "A", "B", "Y"], &[("X", "A"), ("X", "B"), ("A", "Y")]);
        assert_eq!(g.common_predecessors("A", "B").unwrap(), 1);
        assert_eq!(g.common_successors("A", "B").unwrap(), 0);
        assert_eq!(g.common_predecessors("X", "Y").unwrap(), 0);
        assert_eq!(g.common_predecessors("A", "A").unwrap_err(), Error::SameNode("A".into()));
    }

    #[test]
    fn common_neighbours_exclude_the_pair_itself() {
        // A -> B and B -> A: each is the other's predecessor, neither counts
        let g = graph(&["A", "B", "C"], &[("A", "B"), ("B", "A"), ("C", "A"), ("C", "B")]);
        assert_eq!(g.common_predecessors("A", "B").unwrap(), 1);
    }

    #[test]
    fn common_neighbours_match_brute_force() {
        let g = random_graph(20, 0.2, 7);
        for a in 0..20 {
            for b in 0..20 {
                if a == b {
                    continue;
                }
                let pa: BTreeSet<usize> = (0..20).filter(|&x| g.has_edge(x, a)).collect();
                let pb: BTreeSet<usize> = (0..20).filter(|&x| g.has_edge(x, b)).collect();
                let sa: BTreeSet<usize> = (0..20).filter(|&x| g.has_edge(a, x)).collect();
                let sb: BTreeSet<usize> = (0..20).filter(|&x| g.has_edge(b, x)).collect();
                let cp = pa.intersection(&pb).filter(|&&x| x != a && x != b).count();
                let cs = sa.intersection(&sb).filter(|&&x| x != a && x != b).count();
                assert_eq!(g.common_predecessors_ix(a, b), cp);
                assert_eq!(g.common_successors_ix(a, b), cs);
            }
        }
    }

    #[test]
    fn is_reciprocal_cases() {
        let g = graph(&["A", "B", "C"], &[("A", "B"), ("B", "A"), ("A", "C")]);
        assert_eq!(g.is_reciprocal("A", "B").unwrap(), 1);
        assert_eq!(g.is_reciprocal("A", "C").unwrap(), 0);
        assert!(matches!(g.is_reciprocal("C", "A"), Err(Error::MissingEdge { .. })));
    }

    #[test]
    fn reciprocal_fraction_matches_pairwise_count() {
        let g = random_graph(40, 0.15, 3);
        let edges: Vec<(usize, usize)> = g.edges().collect();
        let mut recip = 0;
        for &(a, b) in &edges {
            if edges.iter().any(|&(x, y)| x == b && y == a) {
                recip += 1;
            }
        }
        assert_eq!(g.reciprocal_fraction(), recip as f64 / edges.len() as f64);
    }

    #[test]
    fn artist_subgraph_cases() {
        let g = graph(&["A", "B"], &[("A", "B")]);
        assert_eq!(g.induced_artist_subgraph(), g);

        let nodes = vec![NodeRecord::fan("F"), NodeRecord::fan("G")];
        let fans = DirectedGraph::from_edge_list(nodes, &[("F", "G")]).unwrap().0;
        let sub = fans.induced_artist_subgraph();
        assert_eq!((sub.node_count(), sub.edge_count()), (0, 0));

        let g = random_graph(60, 0.1, 11);
        let expected = g
            .edges()
            .filter(|&(a, b)| g.node(a).is_artist && g.node(b).is_artist)
            .count();
        let sub = g.induced_artist_subgraph();
        assert_eq!(sub.edge_count(), expected);
        assert!(sub.nodes().iter().all(|n| n.is_artist));
    }

    #[test]
    fn degree_sums_match_edge_count() {
        let g = random_graph(30, 0.2, 5);
        let ins: usize = (0..30).map(|i| g.in_degree_ix(i, Scope::Whole)).sum();
        let outs: usize = (0..30).map(|i| g.out_degree(i)).sum();
        assert_eq!(ins, g.edge_count());
        assert_eq!(outs, g.edge_count());
    }

    proptest::proptest! {
        #[test]
        fn transpose_and_symmetry_hold(edges in proptest::collection::vec((0usize..12, 0usize..12), 0..80)) {
            let nodes = (0..12).map(|i| NodeRecord::artist(alloc::format!("{i}"))).collect();
            let (g, _) = DirectedGraph::from_indexed(nodes, &edges);
            for a in 0..12 {
                for &b in g.successors(a) {
                    proptest::prop_assert!(g.predecessors(b).contains(&a));
                }
                for &p in g.predecessors(a) {
                    proptest::prop_assert!(g.has_edge(p, a));
                }
                let r = g.reciprocity_rate_ix(a);
                proptest::prop_assert!((0.0..=1.0).contains(&r));
                for b in 0..12 {
                    if a != b {
                        proptest::prop_assert_eq!(g.common_predecessors_ix(a, b), g.common_predecessors_ix(b, a));
                        proptest::prop_assert_eq!(g.common_successors_ix(a, b), g.common_successors_ix(b, a));
                    }
                }
            }
        }
    }
}
