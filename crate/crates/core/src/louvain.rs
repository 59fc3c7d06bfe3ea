//! Modularity and the two-phase Louvain community detection method with a
//! resolution parameter.
//!
//! Modularity is computed community-wise, Q = Σ_c [ L_c/m − γ·(Σ_tot,c/2m)² ],
//! with m the total edge weight, L_c the weight internal to community c and
//! Σ_tot,c the summed degrees of its members. The local-move phase accepts a
//! move only when it strictly increases this Q, so the reported score never
//! drops below the all-singleton baseline.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Gain accepted only when strictly above this, which also caps float noise.
const MOVE_TOLERANCE: f64 = 1e-12;
/// Hard cap on local-move passes per level.
const MAX_PASSES: usize = 100;

/// Assignment of every node to exactly one community, with per-community
/// aggregates kept alongside.
#[derive(Clone, Debug)]
pub struct Partition {
    assignment: Vec<usize>,
    community_nodes: Vec<Vec<NodeId>>,
    sigma_tot: Vec<f64>,
    internal_weight: Vec<f64>,
}

impl Partition {
    /// Builds a partition from a raw per-node community labeling. Labels are
    /// renumbered densely in order of first occurrence.
    pub fn from_assignment(g: &Graph, labels: &[usize]) -> Result<Partition> {
        if labels.len() != g.node_count() {
            return Err(Error::InvalidParameter(format!(
                "assignment covers {} nodes, graph has {}",
                labels.len(),
                g.node_count()
            )));
        }
        let mut dense: BTreeMap<usize, usize> = BTreeMap::new();
        let mut assignment = vec![0usize; labels.len()];
        for (v, &label) in labels.iter().enumerate() {
            let next = dense.len();
            let c = *dense.entry(label).or_insert(next);
            assignment[v] = c;
        }
        let count = dense.len();
        let mut community_nodes = vec![Vec::new(); count];
        let mut sigma_tot = vec![0.0; count];
        for (v, &c) in assignment.iter().enumerate() {
            community_nodes[c].push(v);
            sigma_tot[c] += g.degree(v);
        }
        let mut internal_weight = vec![0.0; count];
        for v in 0..g.node_count() {
            for &(u, w) in g.neighbors(v) {
                if v < u && assignment[v] == assignment[u] {
                    internal_weight[assignment[v]] += w;
                }
            }
        }
        Ok(Partition {
            assignment,
            community_nodes,
            sigma_tot,
            internal_weight,
        })
    }

    /// Every node in its own community.
    pub fn singletons(g: &Graph) -> Partition {
        let labels: Vec<usize> = (0..g.node_count()).collect();
        Partition::from_assignment(g, &labels).expect("identity labeling is always valid")
    }

    pub fn community_count(&self) -> usize {
        self.community_nodes.len()
    }

    pub fn community_of(&self, v: NodeId) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Node lists per community, each sorted by internal id.
    pub fn communities(&self) -> &[Vec<NodeId>] {
        &self.community_nodes
    }

    /// Summed member degrees per community.
    pub fn sigma_tot(&self, c: usize) -> f64 {
        self.sigma_tot[c]
    }

    /// Total weight of edges internal to community `c`.
    pub fn internal_weight(&self, c: usize) -> f64 {
        self.internal_weight[c]
    }

    /// Eq.-style gain of inserting node `v`, currently outside community `c`,
    /// into `c`. See [`delta_q`].
    pub fn delta_q_into(&self, g: &Graph, v: NodeId, c: usize, gamma: f64) -> f64 {
        debug_assert_ne!(self.assignment[v], c, "node must currently be outside c");
        let k_in: f64 = g
            .neighbors(v)
            .iter()
            .filter(|&&(u, _)| self.assignment[u] == c)
            .map(|&(_, w)| w)
            .sum();
        delta_q(k_in, g.degree(v), self.sigma_tot[c], g.total_edge_weight(), gamma)
    }
}

/// Modularity gain of moving an isolated node into a community:
///
/// ```text
/// dq = k_in/(2m) − γ · Σ_tot · k_v / (2 m²)
/// ```
///
/// `k_in` is the weight from the node into the community, `k_v` its degree,
/// `sigma_tot` the community's summed degrees (node excluded) and `m` the
/// total edge weight.
pub fn delta_q(k_in: f64, k_v: f64, sigma_tot: f64, m: f64, gamma: f64) -> f64 {
    k_in / (2.0 * m) - gamma * sigma_tot * k_v / (2.0 * m * m)
}

/// Modularity Q = Σ_c [ L_c/m − γ·(Σ_tot,c/2m)² ] of a partition.
pub fn modularity(g: &Graph, p: &Partition, gamma: f64) -> Result<f64> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if p.assignment.len() != g.node_count() {
        return Err(Error::InvalidParameter(format!(
            "partition covers {} nodes, graph has {}",
            p.assignment.len(),
            g.node_count()
        )));
    }
    let m = g.total_edge_weight();
    if m <= 0.0 {
        return Err(Error::NoEdges);
    }
    let two_m = g.total_weight();
    let mut q = 0.0;
    for c in 0..p.community_count() {
        let frac = p.sigma_tot[c] / two_m;
        q += p.internal_weight[c] / m - gamma * frac * frac;
    }
    Ok(q)
}

/// Louvain community detection: repeated local-move and aggregation phases
/// until no move gains modularity. Node visit order is shuffled once per
/// phase from `rng_seed`; equal gains resolve to the candidate community
/// containing the smallest external id, so results are reproducible.
pub fn louvain(g: &Graph, gamma: f64, rng_seed: u64) -> Result<Partition> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "resolution gamma must be positive, got {gamma}"
        )));
    }
    if g.total_edge_weight() <= 0.0 {
        // Nothing to optimize; every node is its own community.
        return Ok(Partition::singletons(g));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut level = LevelGraph::from_graph(g);
    // Current community of each original node, expressed as a level-node id.
    let mut assign_orig: Vec<usize> = (0..g.node_count()).collect();

    loop {
        let mut comm = match level.local_move(gamma, &mut rng) {
            Some(comm) => comm,
            None => break,
        };
        renumber_dense(&mut comm);
        for slot in assign_orig.iter_mut() {
            *slot = comm[*slot];
        }
        level = level.aggregate(&comm);
        if level.node_count() == 1 {
            break;
        }
    }

    Partition::from_assignment(g, &assign_orig)
}

/// Relabels community ids to 0..c-1 in order of first occurrence.
fn renumber_dense(labels: &mut [usize]) {
    let mut map: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for label in labels.iter_mut() {
        let next = map.len();
        *label = *map.entry(*label).or_insert(next);
    }
}

/// Working graph for one Louvain level. Aggregated communities become nodes;
/// their internal weight is folded into `self_weight` so modularity is
/// preserved across levels.
struct LevelGraph {
    adj: Vec<Vec<(usize, f64)>>,
    self_weight: Vec<f64>,
    strength: Vec<f64>,
    /// Smallest external rank of any original node represented here.
    min_rank: Vec<usize>,
    /// Total edge weight of the original graph.
    m: f64,
}

impl LevelGraph {
    fn from_graph(g: &Graph) -> LevelGraph {
        let n = g.node_count();
        LevelGraph {
            adj: (0..n).map(|v| g.neighbors(v).to_vec()).collect(),
            self_weight: vec![0.0; n],
            strength: (0..n).map(|v| g.degree(v)).collect(),
            min_rank: (0..n).map(|v| g.ext_rank(v)).collect(),
            m: g.total_edge_weight(),
        }
    }

    fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// One local-move phase. Returns the per-node community labeling when at
    /// least one move was accepted, `None` otherwise.
    fn local_move(&self, gamma: f64, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
        let n = self.node_count();
        let m = self.m;
        let mut comm: Vec<usize> = (0..n).collect();
        let mut sigma: Vec<f64> = self.strength.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let mut any_move = false;
        for _pass in 0..MAX_PASSES {
            let mut moves = 0usize;
            for &v in &order {
                let home = comm[v];
                let k_v = self.strength[v];
                sigma[home] -= k_v;

                // Weight from v into each adjacent community; BTreeMap keeps
                // candidate order deterministic.
                let mut w_to: BTreeMap<usize, f64> = BTreeMap::new();
                for &(u, w) in &self.adj[v] {
                    *w_to.entry(comm[u]).or_insert(0.0) += w;
                }

                let gain_into = |k_in: f64, sigma_c: f64| -> f64 {
                    k_in / m - gamma * sigma_c * k_v / (2.0 * m * m)
                };
                let home_gain = gain_into(w_to.get(&home).copied().unwrap_or(0.0), sigma[home]);

                let mut best_comm = home;
                let mut best_gain = home_gain;
                for (&c, &k_in) in &w_to {
                    if c == home {
                        continue;
                    }
                    let gain = gain_into(k_in, sigma[c]);
                    if gain > best_gain {
                        best_gain = gain;
                        best_comm = c;
                    } else if gain == best_gain
                        && best_comm != home
                        && self.community_min_rank(&comm, c)
                            < self.community_min_rank(&comm, best_comm)
                    {
                        best_comm = c;
                    }
                }

                if best_comm != home && best_gain - home_gain > MOVE_TOLERANCE {
                    comm[v] = best_comm;
                    sigma[best_comm] += k_v;
                    moves += 1;
                    #[cfg(test)]
                    self.check_move_improved(&comm, v, home, gamma);
                } else {
                    sigma[home] += k_v;
                }
            }
            if moves == 0 {
                break;
            }
            any_move = true;
        }
        any_move.then_some(comm)
    }

    fn community_min_rank(&self, comm: &[usize], c: usize) -> usize {
        comm.iter()
            .enumerate()
            .filter(|&(_, &cc)| cc == c)
            .map(|(v, _)| self.min_rank[v])
            .min()
            .unwrap_or(usize::MAX)
    }

    /// Collapses communities into nodes. `comm` must use dense labels.
    fn aggregate(&self, comm: &[usize]) -> LevelGraph {
        let count = comm.iter().copied().max().map_or(0, |c| c + 1);
        let mut self_weight = vec![0.0; count];
        let mut strength = vec![0.0; count];
        let mut min_rank = vec![usize::MAX; count];
        let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();

        for v in 0..self.node_count() {
            let cv = comm[v];
            self_weight[cv] += self.self_weight[v];
            strength[cv] += self.strength[v];
            min_rank[cv] = min_rank[cv].min(self.min_rank[v]);
            for &(u, w) in &self.adj[v] {
                let cu = comm[u];
                if cv == cu {
                    if v < u {
                        self_weight[cv] += w;
                    }
                } else if cv < cu {
                    *edges.entry((cv, cu)).or_insert(0.0) += w;
                }
            }
        }

        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); count];
        for (&(a, b), &w) in &edges {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable_by_key(|&(u, _)| u);
        }
        LevelGraph {
            adj,
            self_weight,
            strength,
            min_rank,
            m: self.m,
        }
    }

    /// Level modularity under a labeling; used to verify that aggregation and
    /// accepted moves preserve Q.
    #[cfg(test)]
    fn modularity(&self, comm: &[usize], gamma: f64) -> f64 {
        let count = comm.iter().copied().max().map_or(0, |c| c + 1);
        let mut internal = vec![0.0; count];
        let mut sigma = vec![0.0; count];
        for v in 0..self.node_count() {
            internal[comm[v]] += self.self_weight[v];
            sigma[comm[v]] += self.strength[v];
            for &(u, w) in &self.adj[v] {
                if v < u && comm[v] == comm[u] {
                    internal[comm[v]] += w;
                }
            }
        }
        let two_m = 2.0 * self.m;
        (0..count)
            .map(|c| internal[c] / self.m - gamma * (sigma[c] / two_m).powi(2))
            .sum()
    }

    /// Verifies the accepted move strictly improved level modularity; only
    /// compiled into this crate's own test builds.
    #[cfg(test)]
    fn check_move_improved(&self, comm: &[usize], v: usize, previous: usize, gamma: f64) {
        if self.node_count() > 200 {
            return;
        }
        let after = self.modularity(comm, gamma);
        let mut reverted = comm.to_vec();
        reverted[v] = previous;
        let before = self.modularity(&reverted, gamma);
        assert!(
            after > before - MOVE_TOLERANCE,
            "accepted move decreased Q: {before} -> {after}"
        );
    }
}
