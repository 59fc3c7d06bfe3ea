//! Undirected weighted graph with dense internal ids and an external-id map.
//!
//! All algorithms in this crate operate on internal indices `0..n`; external
//! ids from the source data are kept alongside so every result can be joined
//! back to the original dataset.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Dense internal node index.
pub type NodeId = usize;

/// Set of internal node ids. `BTreeSet` keeps iteration deterministic.
pub type NodeSet = BTreeSet<NodeId>;

/// Node id as it appears in the source data: a non-negative integer or an
/// arbitrary string label. Numeric ids order numerically and before labels,
/// so "10" sorts after "2".
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExternalId {
    Num(u64),
    Label(String),
}

impl ExternalId {
    pub fn parse(token: &str) -> Self {
        match token.parse::<u64>() {
            Ok(v) => ExternalId::Num(v),
            Err(_) => ExternalId::Label(token.to_string()),
        }
    }
}

impl fmt::Display for ExternalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExternalId::Num(v) => write!(f, "{v}"),
            ExternalId::Label(s) => write!(f, "{s}"),
        }
    }
}

impl From<u64> for ExternalId {
    fn from(v: u64) -> Self {
        ExternalId::Num(v)
    }
}

impl FromStr for ExternalId {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(ExternalId::parse(s))
    }
}

/// Immutable undirected weighted graph.
///
/// Invariants maintained by construction:
/// - adjacency is symmetric and sorted by neighbor index,
/// - no self-loops, duplicate edges merged by summing weights,
/// - `degree(v)` is the weighted degree and `total_weight()` is their sum
///   (the `2m` quantity of modularity formulas).
#[derive(Clone, Debug)]
pub struct Graph {
    adj: Vec<Vec<(NodeId, f64)>>,
    degrees: Vec<f64>,
    total_weight: f64,
    edge_count: usize,
    ext_ids: Vec<ExternalId>,
    index: HashMap<ExternalId, NodeId>,
    ext_rank: Vec<usize>,
}

impl Graph {
    pub fn node_count(&self) -> usize {
        self.ext_ids.len()
    }

    /// Number of distinct undirected edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sum of all weighted degrees, i.e. twice the total edge weight.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// Total edge weight (`m` for unit-weight graphs).
    pub fn total_edge_weight(&self) -> f64 {
        self.total_weight / 2.0
    }

    /// Weighted degree of `v`.
    pub fn degree(&self, v: NodeId) -> f64 {
        self.degrees[v]
    }

    /// Neighbors of `v` with edge weights, sorted by neighbor index.
    pub fn neighbors(&self, v: NodeId) -> &[(NodeId, f64)] {
        &self.adj[v]
    }

    /// Weight of edge (u, v), or 0.0 when absent.
    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> f64 {
        match self.adj[u].binary_search_by_key(&v, |&(w, _)| w) {
            Ok(pos) => self.adj[u][pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn external_id(&self, v: NodeId) -> &ExternalId {
        &self.ext_ids[v]
    }

    pub fn index_of(&self, id: &ExternalId) -> Option<NodeId> {
        self.index.get(id).copied()
    }

    /// Internal index for an external id, erroring on unknown ids.
    pub fn require_index(&self, id: &ExternalId) -> Result<NodeId> {
        self.index_of(id)
            .ok_or_else(|| Error::UnknownNode(id.clone()))
    }

    /// Position of `v` when all nodes are ordered by external id. Used for
    /// deterministic tie-breaking.
    pub fn ext_rank(&self, v: NodeId) -> usize {
        self.ext_rank[v]
    }

    fn check_node(&self, v: NodeId) -> Result<()> {
        if v >= self.node_count() {
            return Err(Error::IndexOutOfRange {
                index: v,
                n: self.node_count(),
            });
        }
        Ok(())
    }

    /// Open neighborhood N(v), excluding `v` itself.
    pub fn neighborhood(&self, v: NodeId) -> Result<NodeSet> {
        self.check_node(v)?;
        Ok(self.adj[v].iter().map(|&(u, _)| u).collect())
    }

    /// Subgraph induced by `nodes`: exactly those nodes and every edge with
    /// both endpoints inside. External ids are preserved.
    pub fn induced_subgraph(&self, nodes: &NodeSet) -> Result<Graph> {
        let mut remap = vec![usize::MAX; self.node_count()];
        let mut ext_ids = Vec::with_capacity(nodes.len());
        for (sub, &v) in nodes.iter().enumerate() {
            self.check_node(v)?;
            remap[v] = sub;
            ext_ids.push(self.ext_ids[v].clone());
        }

        let mut adj: Vec<Vec<(NodeId, f64)>> = vec![Vec::new(); nodes.len()];
        let mut edge_count = 0;
        for &v in nodes {
            let sub_v = remap[v];
            for &(u, w) in &self.adj[v] {
                let sub_u = remap[u];
                if sub_u != usize::MAX {
                    adj[sub_v].push((sub_u, w));
                    if sub_v < sub_u {
                        edge_count += 1;
                    }
                }
            }
        }
        // Neighbor lists inherit sorted order because the remap is monotone
        // over the BTreeSet iteration.
        Ok(Graph::assemble(adj, ext_ids, edge_count))
    }

    /// Maximal connected components, ordered by smallest contained external id.
    pub fn connected_components(&self) -> Vec<NodeSet> {
        let n = self.node_count();
        let mut dsu = DisjointSets::new(n);
        for v in 0..n {
            for &(u, _) in &self.adj[v] {
                dsu.union(v, u);
            }
        }
        let mut groups: HashMap<usize, NodeSet> = HashMap::new();
        for v in 0..n {
            groups.entry(dsu.find(v)).or_default().insert(v);
        }
        let mut components: Vec<NodeSet> = groups.into_values().collect();
        components.sort_by_key(|c| {
            c.iter()
                .map(|&v| self.ext_rank[v])
                .min()
                .expect("components are nonempty")
        });
        components
    }

    /// Builds a graph from unit-weight edges over numeric external ids.
    pub fn from_edges<I>(edges: I) -> Graph
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let mut b = GraphBuilder::new();
        for (u, v) in edges {
            b.add_edge(ExternalId::Num(u), ExternalId::Num(v), 1.0);
        }
        b.build()
    }

    /// Builds a graph from weighted edges over numeric external ids.
    pub fn from_weighted_edges<I>(edges: I) -> Graph
    where
        I: IntoIterator<Item = (u64, u64, f64)>,
    {
        let mut b = GraphBuilder::new();
        for (u, v, w) in edges {
            b.add_edge(ExternalId::Num(u), ExternalId::Num(v), w);
        }
        b.build()
    }

    fn assemble(adj: Vec<Vec<(NodeId, f64)>>, ext_ids: Vec<ExternalId>, edge_count: usize) -> Graph {
        let degrees: Vec<f64> = adj
            .iter()
            .map(|nbrs| nbrs.iter().map(|&(_, w)| w).sum())
            .collect();
        let total_weight = degrees.iter().sum();
        let index = ext_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        let mut order: Vec<NodeId> = (0..ext_ids.len()).collect();
        order.sort_by(|&a, &b| ext_ids[a].cmp(&ext_ids[b]));
        let mut ext_rank = vec![0usize; ext_ids.len()];
        for (rank, &v) in order.iter().enumerate() {
            ext_rank[v] = rank;
        }
        Graph {
            adj,
            degrees,
            total_weight,
            edge_count,
            ext_ids,
            index,
            ext_rank,
        }
    }
}

/// Incremental construction; duplicate edges merge by summing weights and
/// self-loops are dropped (counted in [`LoadStats`]).
#[derive(Default)]
pub struct GraphBuilder {
    index: HashMap<ExternalId, NodeId>,
    ext_ids: Vec<ExternalId>,
    edges: HashMap<(NodeId, NodeId), f64>,
    self_loops_dropped: usize,
    duplicates_merged: usize,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns an external id, registering the node if new.
    pub fn add_node(&mut self, id: ExternalId) -> NodeId {
        if let Some(&v) = self.index.get(&id) {
            return v;
        }
        let v = self.ext_ids.len();
        self.ext_ids.push(id.clone());
        self.index.insert(id, v);
        v
    }

    /// Adds an undirected edge. Weights must be finite and non-negative.
    pub fn add_edge(&mut self, u: ExternalId, v: ExternalId, weight: f64) {
        assert!(
            weight.is_finite() && weight >= 0.0,
            "edge weight must be finite and non-negative, got {weight}"
        );
        let ui = self.add_node(u);
        let vi = self.add_node(v);
        if ui == vi {
            self.self_loops_dropped += 1;
            return;
        }
        let key = (ui.min(vi), ui.max(vi));
        match self.edges.entry(key) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += weight;
                self.duplicates_merged += 1;
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(weight);
            }
        }
    }

    pub fn build(self) -> Graph {
        self.build_with_stats().0
    }

    pub fn build_with_stats(self) -> (Graph, LoadStats) {
        let n = self.ext_ids.len();
        let mut adj: Vec<Vec<(NodeId, f64)>> = vec![Vec::new(); n];
        for (&(u, v), &w) in &self.edges {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable_by_key(|&(u, _)| u);
        }
        let stats = LoadStats {
            edges_loaded: self.edges.len(),
            self_loops_dropped: self.self_loops_dropped,
            duplicates_merged: self.duplicates_merged,
        };
        (Graph::assemble(adj, self.ext_ids, self.edges.len()), stats)
    }
}

/// Bookkeeping from graph construction, mostly for loader warnings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub edges_loaded: usize,
    pub self_loops_dropped: usize,
    pub duplicates_merged: usize,
}

/// Edge-list token layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeListFormat {
    Whitespace,
    Csv,
}

/// Loads an edge-list file: one edge per line, `u v` or `u,v`, with an
/// optional third weight token when `weighted` is set. Lines starting with
/// '#' or '%' and blank lines are skipped. An empty file yields an empty
/// graph.
pub fn load_edge_list(
    path: &Path,
    format: EdgeListFormat,
    weighted: bool,
) -> Result<(Graph, LoadStats)> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut builder = GraphBuilder::new();

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = match format {
            EdgeListFormat::Whitespace => trimmed.split_whitespace().collect(),
            EdgeListFormat::Csv => trimmed.split(',').map(str::trim).collect(),
        };
        let expected = if weighted { 3 } else { 2 };
        if tokens.len() != expected {
            return Err(Error::Parse {
                line: lineno,
                message: format!(
                    "expected {expected} tokens, found {} in {trimmed:?}",
                    tokens.len()
                ),
            });
        }
        let u = ExternalId::parse(tokens[0]);
        let v = ExternalId::parse(tokens[1]);
        let weight = if weighted {
            let w: f64 = tokens[2].parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid weight {:?}", tokens[2]),
            })?;
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("weight must be finite and non-negative, got {w}"),
                });
            }
            w
        } else {
            1.0
        };
        builder.add_edge(u, v, weight);
    }

    Ok(builder.build_with_stats())
}

/// Union-find with union by rank and path halving.
struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn external_id_ordering_is_numeric_then_label() {
        let two = ExternalId::parse("2");
        let ten = ExternalId::parse("10");
        let name = ExternalId::parse("alice");
        assert!(two < ten);
        assert!(ten < name);
        assert_eq!(two, ExternalId::Num(2));
        assert_eq!(name, ExternalId::Label("alice".into()));
    }

    #[test]
    fn load_whitespace_edge_list() {
        let f = write_temp("# comment\n0 1\n1 2\n% also comment\n2 0\n");
        let (g, stats) = load_edge_list(f.path(), EdgeListFormat::Whitespace, false).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(stats.self_loops_dropped, 0);
        assert_eq!(stats.duplicates_merged, 0);
    }

    #[test]
    fn load_empty_file_yields_empty_graph() {
        let f = write_temp("");
        let (g, _) = load_edge_list(f.path(), EdgeListFormat::Whitespace, false).unwrap();
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn reversed_duplicate_lines_merge() {
        let f = write_temp("0 1\n1 0\n");
        let (g, stats) = load_edge_list(f.path(), EdgeListFormat::Whitespace, false).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(stats.duplicates_merged, 1);
        // merged by weight sum
        assert_eq!(g.edge_weight(0, 1), 2.0);
    }

    #[test]
    fn self_loops_dropped_and_counted() {
        let f = write_temp("0 0\n0 1\n");
        let (g, stats) = load_edge_list(f.path(), EdgeListFormat::Whitespace, false).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(stats.self_loops_dropped, 1);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let f = write_temp("0 1\n0 1 2\n");
        let err = load_edge_list(f.path(), EdgeListFormat::Whitespace, false).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn load_csv_weighted() {
        let f = write_temp("a,b,0.5\nb,c,2.0\n");
        let (g, _) = load_edge_list(f.path(), EdgeListFormat::Csv, true).unwrap();
        assert_eq!(g.node_count(), 3);
        let a = g.require_index(&ExternalId::parse("a")).unwrap();
        let b = g.require_index(&ExternalId::parse("b")).unwrap();
        assert_eq!(g.edge_weight(a, b), 0.5);
        assert!((g.degree(b) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn negative_weight_rejected() {
        let f = write_temp("0 1 -2.0\n");
        assert!(matches!(
            load_edge_list(f.path(), EdgeListFormat::Whitespace, true),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn degree_sum_equals_twice_edge_weight() {
        let g = Graph::from_weighted_edges([(0, 1, 1.5), (1, 2, 2.0), (0, 2, 0.5)]);
        let degree_sum: f64 = (0..g.node_count()).map(|v| g.degree(v)).sum();
        assert!((degree_sum - 2.0 * (1.5 + 2.0 + 0.5)).abs() < 1e-12);
        assert!((g.total_weight() - degree_sum).abs() < 1e-12);
    }

    #[test]
    fn neighborhood_excludes_self() {
        let g = Graph::from_edges([(0, 1), (1, 2)]);
        let n1 = g.neighborhood(1).unwrap();
        assert_eq!(n1, NodeSet::from([0, 2]));
        assert!(g.neighborhood(9).is_err());
    }

    #[test]
    fn neighborhood_of_isolated_node_in_subgraph() {
        // 'c' ends up isolated once we cut it out of triangle context
        let g = Graph::from_edges([(0, 1), (1, 2), (2, 0)]);
        let sub = g.induced_subgraph(&NodeSet::from([0, 1])).unwrap();
        assert_eq!(sub.node_count(), 2);
        assert_eq!(sub.edge_count(), 1);
        assert_eq!(sub.external_id(0), &ExternalId::Num(0));
    }

    #[test]
    fn induced_subgraph_of_full_node_set_is_identity() {
        let g = Graph::from_edges([(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        let all: NodeSet = (0..g.node_count()).collect();
        let sub = g.induced_subgraph(&all).unwrap();
        assert_eq!(sub.node_count(), g.node_count());
        assert_eq!(sub.edge_count(), g.edge_count());
        for v in 0..g.node_count() {
            assert_eq!(sub.external_id(v), g.external_id(v));
            assert_eq!(sub.neighbors(v), g.neighbors(v));
        }
    }

    #[test]
    fn induced_subgraph_empty_set() {
        let g = Graph::from_edges([(0, 1)]);
        let sub = g.induced_subgraph(&NodeSet::new()).unwrap();
        assert_eq!(sub.node_count(), 0);
        assert_eq!(sub.edge_count(), 0);
    }

    #[test]
    fn induced_subgraph_rejects_out_of_range() {
        let g = Graph::from_edges([(0, 1)]);
        assert!(matches!(
            g.induced_subgraph(&NodeSet::from([0, 7])),
            Err(Error::IndexOutOfRange { index: 7, .. })
        ));
    }

    #[test]
    fn induced_subgraph_keeps_one_of_two_triangles() {
        let g = Graph::from_edges([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        let sub = g.induced_subgraph(&NodeSet::from([3, 4, 5])).unwrap();
        assert_eq!(sub.node_count(), 3);
        assert_eq!(sub.edge_count(), 3);
    }

    #[test]
    fn components_ordering_and_partition() {
        // two triangles plus an isolated-ish pair, ids chosen so ordering matters
        let g = Graph::from_edges([(10, 11), (11, 12), (12, 10), (3, 4), (4, 5), (5, 3)]);
        let comps = g.connected_components();
        assert_eq!(comps.len(), 2);
        // component containing external id 3 comes first
        let first_min = comps[0]
            .iter()
            .map(|&v| g.external_id(v).clone())
            .min()
            .unwrap();
        assert_eq!(first_min, ExternalId::Num(3));
        let union: NodeSet = comps.iter().flatten().copied().collect();
        assert_eq!(union.len(), g.node_count());
    }

    #[test]
    fn singleton_components_without_edges() {
        let mut b = GraphBuilder::new();
        for i in 0..5 {
            b.add_node(ExternalId::Num(i));
        }
        let g = b.build();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.connected_components().len(), 5);
    }
}
