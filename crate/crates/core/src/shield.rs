//! Spectral node-immunization baselines: NetShield's greedy eigen-drop
//! selection and SparseShield's lazy priority-queue variant, plus the
//! budget-search reformulation that grows the selection until it covers a
//! seed set.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, NodeSet};
use crate::spectral::{EigenPair, dominant_eigenpair_default};

/// Which baseline drives a selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShieldAlgorithm {
    NetShield,
    SparseShield,
}

impl ShieldAlgorithm {
    pub fn name(self) -> &'static str {
        match self {
            ShieldAlgorithm::NetShield => "netshield",
            ShieldAlgorithm::SparseShield => "sparseshield",
        }
    }
}

/// Greedy immunization pick list with the score each node had when selected.
#[derive(Clone, Debug)]
pub struct ShieldSelection {
    pub picked: Vec<NodeId>,
    pub scores: Vec<f64>,
    pub lambda: f64,
    pub requested_budget: usize,
}

impl ShieldSelection {
    /// True when the budget had to be clamped to the node count.
    pub fn clamped(&self) -> bool {
        self.picked.len() < self.requested_budget
    }
}

/// NetShield: known eigenpair (λ, u), greedy pick of the node maximizing the
/// marginal shield score v(i) = 2λ·u_i² − 2·u_i·Σ_{j picked} w_ij·u_j, with
/// ties resolved toward the smallest external id.
pub fn netshield(g: &Graph, budget: usize) -> Result<ShieldSelection> {
    let pair = dominant_eigenpair_default(g)?;
    Ok(netshield_greedy(g, &pair, budget, None).0)
}

/// SparseShield: same initial priorities 2λ·u_i², served from a lazy
/// max-priority queue where stale entries are re-scored as
/// 2λ·u_i² − α·2·u_i·Σ_{j picked} w_ij·u_j and re-inserted.
pub fn sparseshield(g: &Graph, budget: usize, alpha: f64) -> Result<ShieldSelection> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "priority multiplier alpha must be non-negative, got {alpha}"
        )));
    }
    let pair = dominant_eigenpair_default(g)?;
    Ok(sparseshield_greedy(g, &pair, budget, alpha, None).0)
}

/// Grows the greedy selection until `seeds` is covered and reports the first
/// budget that achieves it. The greedy eventually picks every node, so the
/// budget is at most n.
pub fn budget_search(
    g: &Graph,
    seeds: &NodeSet,
    algorithm: ShieldAlgorithm,
    alpha: f64,
) -> Result<(usize, ShieldSelection)> {
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    for &s in seeds {
        if s >= g.node_count() {
            return Err(Error::IndexOutOfRange {
                index: s,
                n: g.node_count(),
            });
        }
    }
    let pair = dominant_eigenpair_default(g)?;
    let (selection, covered_at) = match algorithm {
        ShieldAlgorithm::NetShield => netshield_greedy(g, &pair, g.node_count(), Some(seeds)),
        ShieldAlgorithm::SparseShield => {
            sparseshield_greedy(g, &pair, g.node_count(), alpha, Some(seeds))
        }
    };
    let budget = covered_at.expect("greedy over all nodes always covers the seeds");
    Ok((budget, selection))
}

/// Shared NetShield loop. When `cover` is given the loop stops as soon as the
/// picked set contains it, returning the pick count at coverage.
fn netshield_greedy(
    g: &Graph,
    pair: &EigenPair,
    budget: usize,
    cover: Option<&NodeSet>,
) -> (ShieldSelection, Option<usize>) {
    let n = g.node_count();
    let u = &pair.vector;
    let target = budget.min(n);
    let mut picked = Vec::with_capacity(target);
    let mut scores = Vec::with_capacity(target);
    let mut in_picked = vec![false; n];
    // penalty[i] = Σ_{j picked} w_ij · u_j
    let mut penalty = vec![0.0; n];
    let mut uncovered = cover.map(|c| c.len()).unwrap_or(0);
    let mut covered_at = None;

    while picked.len() < target {
        let mut best: Option<(f64, usize, NodeId)> = None;
        for i in 0..n {
            if in_picked[i] {
                continue;
            }
            let score = 2.0 * pair.lambda * u[i] * u[i] - 2.0 * u[i] * penalty[i];
            let rank = g.ext_rank(i);
            let better = match best {
                None => true,
                Some((bs, br, _)) => score > bs || (score == bs && rank < br),
            };
            if better {
                best = Some((score, rank, i));
            }
        }
        let Some((score, _, node)) = best else { break };
        in_picked[node] = true;
        picked.push(node);
        scores.push(score);
        for &(j, w) in g.neighbors(node) {
            penalty[j] += w * u[node];
        }
        if let Some(seeds) = cover
            && covered_at.is_none()
            && seeds.contains(&node)
        {
            uncovered -= 1;
            if uncovered == 0 {
                covered_at = Some(picked.len());
                break;
            }
        }
    }

    (
        ShieldSelection {
            picked,
            scores,
            lambda: pair.lambda,
            requested_budget: budget,
        },
        covered_at,
    )
}

/// Max-heap entry ordered by score, ties toward the smaller external rank.
struct QueueEntry {
    score: f64,
    rank: usize,
    node: NodeId,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.score == other.score && self.rank == other.rank
    }
}
impl Eq for QueueEntry {}
impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .partial_cmp(&other.score)
            .expect("shield scores are finite")
            .then_with(|| other.rank.cmp(&self.rank))
    }
}

fn sparseshield_greedy(
    g: &Graph,
    pair: &EigenPair,
    budget: usize,
    alpha: f64,
    cover: Option<&NodeSet>,
) -> (ShieldSelection, Option<usize>) {
    let n = g.node_count();
    let u = &pair.vector;
    let target = budget.min(n);
    let mut picked = Vec::with_capacity(target);
    let mut scores = Vec::with_capacity(target);
    let mut in_picked = vec![false; n];
    let mut penalty = vec![0.0; n];
    let mut uncovered = cover.map(|c| c.len()).unwrap_or(0);
    let mut covered_at = None;

    let current_score =
        |i: NodeId, penalty: &[f64]| 2.0 * pair.lambda * u[i] * u[i] - alpha * 2.0 * u[i] * penalty[i];

    let mut heap: BinaryHeap<QueueEntry> = (0..n)
        .map(|i| QueueEntry {
            score: 2.0 * pair.lambda * u[i] * u[i],
            rank: g.ext_rank(i),
            node: i,
        })
        .collect();

    while picked.len() < target {
        let Some(top) = heap.pop() else { break };
        if in_picked[top.node] {
            continue;
        }
        let fresh = current_score(top.node, &penalty);
        if fresh < top.score {
            // Stale entry: the penalty grew since it was queued.
            heap.push(QueueEntry {
                score: fresh,
                rank: top.rank,
                node: top.node,
            });
            continue;
        }
        in_picked[top.node] = true;
        picked.push(top.node);
        scores.push(fresh);
        for &(j, w) in g.neighbors(top.node) {
            penalty[j] += w * u[top.node];
        }
        if let Some(seeds) = cover
            && covered_at.is_none()
            && seeds.contains(&top.node)
        {
            uncovered -= 1;
            if uncovered == 0 {
                covered_at = Some(picked.len());
                break;
            }
        }
    }

    (
        ShieldSelection {
            picked,
            scores,
            lambda: pair.lambda,
            requested_budget: budget,
        },
        covered_at,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn star4() -> Graph {
        Graph::from_edges([(0, 1), (0, 2), (0, 3), (0, 4)])
    }

    #[test]
    fn netshield_star_picks_center_first() {
        let sel = netshield(&star4(), 1).unwrap();
        assert_eq!(sel.picked, vec![0]);
        assert_eq!(sel.scores.len(), 1);
    }

    #[test]
    fn netshield_budget_zero() {
        let sel = netshield(&star4(), 0).unwrap();
        assert!(sel.picked.is_empty());
    }

    #[test]
    fn netshield_triangle_tie_breaks_to_smallest_id() {
        let g = Graph::from_edges([(5, 7), (7, 6), (6, 5)]);
        let sel = netshield(&g, 1).unwrap();
        assert_eq!(*g.external_id(sel.picked[0]), crate::graph::ExternalId::Num(5));
    }

    #[test]
    fn netshield_clamps_budget() {
        let sel = netshield(&star4(), 99).unwrap();
        assert_eq!(sel.picked.len(), 5);
        assert!(sel.clamped());
    }

    #[test]
    fn netshield_edgeless_is_error() {
        let mut b = crate::graph::GraphBuilder::new();
        b.add_node(crate::graph::ExternalId::Num(0));
        assert!(matches!(netshield(&b.build(), 1), Err(Error::NoEdges)));
    }

    #[test]
    fn sparseshield_star_picks_center() {
        let sel = sparseshield(&star4(), 1, 1.0).unwrap();
        assert_eq!(sel.picked, vec![0]);
    }

    #[test]
    fn sparseshield_budget_n_selects_everything() {
        for alpha in [0.0, 0.5, 2.0] {
            let sel = sparseshield(&star4(), 5, alpha).unwrap();
            assert_eq!(sel.picked.len(), 5);
        }
    }

    #[test]
    fn sparseshield_alpha_zero_orders_by_initial_priority() {
        let g = crate::synth::connected_gnm(20, 25, 4);
        let pair = dominant_eigenpair_default(&g).unwrap();
        let sel = sparseshield(&g, 20, 0.0).unwrap();
        let mut expected: Vec<NodeId> = (0..20).collect();
        expected.sort_by(|&a, &b| {
            let sa = 2.0 * pair.lambda * pair.vector[a] * pair.vector[a];
            let sb = 2.0 * pair.lambda * pair.vector[b] * pair.vector[b];
            sb.partial_cmp(&sa)
                .unwrap()
                .then_with(|| g.ext_rank(a).cmp(&g.ext_rank(b)))
        });
        assert_eq!(sel.picked, expected);
    }

    #[test]
    fn sparseshield_alpha_one_matches_netshield() {
        for seed in 0..5 {
            let g = crate::synth::connected_gnm(18, 20, seed);
            let a = netshield(&g, 10).unwrap();
            let b = sparseshield(&g, 10, 1.0).unwrap();
            assert_eq!(a.picked, b.picked, "seed {seed}");
        }
    }

    #[test]
    fn sparseshield_rejects_negative_alpha() {
        assert!(matches!(
            sparseshield(&star4(), 1, -0.5),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn greedy_prefix_property() {
        let g = crate::synth::connected_gnm(40, 80, 6);
        let long = netshield(&g, 25).unwrap();
        for b in [1, 5, 12] {
            let short = netshield(&g, b).unwrap();
            assert_eq!(short.picked[..], long.picked[..b]);
        }
        let long = sparseshield(&g, 25, 1.5).unwrap();
        for b in [1, 5, 12] {
            let short = sparseshield(&g, b, 1.5).unwrap();
            assert_eq!(short.picked[..], long.picked[..b]);
        }
    }

    #[test]
    fn budget_search_star_center() {
        let g = star4();
        let (budget, sel) = budget_search(&g, &NodeSet::from([0]), ShieldAlgorithm::NetShield, 1.0)
            .unwrap();
        assert_eq!(budget, 1);
        assert_eq!(sel.picked, vec![0]);
    }

    #[test]
    fn budget_search_empty_seeds_is_error() {
        assert!(matches!(
            budget_search(&star4(), &NodeSet::new(), ShieldAlgorithm::NetShield, 1.0),
            Err(Error::EmptySeeds)
        ));
    }

    #[test]
    fn budget_search_all_of_k3_needs_three() {
        let g = Graph::from_edges([(0, 1), (1, 2), (2, 0)]);
        let seeds: NodeSet = (0..3).collect();
        for alg in [ShieldAlgorithm::NetShield, ShieldAlgorithm::SparseShield] {
            let (budget, _) = budget_search(&g, &seeds, alg, 1.0).unwrap();
            assert_eq!(budget, 3);
        }
    }

    #[test]
    fn budget_search_matches_prefix_of_full_greedy() {
        let g = crate::synth::connected_gnm(30, 45, 11);
        let seeds = NodeSet::from([3, 17, 22]);
        let (budget, sel) =
            budget_search(&g, &seeds, ShieldAlgorithm::SparseShield, 1.0).unwrap();
        let full = sparseshield(&g, budget, 1.0).unwrap();
        assert_eq!(sel.picked, full.picked);
        assert!(seeds.iter().all(|s| sel.picked.contains(s)));
        // first budget: the previous prefix must miss some seed
        let shorter: NodeSet = sel.picked[..budget - 1].iter().copied().collect();
        assert!(!seeds.iter().all(|s| shorter.contains(s)));
    }
}
