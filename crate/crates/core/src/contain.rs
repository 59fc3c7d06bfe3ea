//! Community-based immunization: compose the subgraph reached by the seed
//! set, sweep the Louvain resolution until enough communities intersect it,
//! and rank those communities by their share of harmful nodes.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, NodeSet};
use crate::louvain::{Partition, louvain};
use crate::structural::{ConstraintProfile, component_constraint_profile};

/// Resolution sweep schedule: start at `gamma0`, add `delta_gamma` per
/// iteration, abort past `gamma_max`.
#[derive(Clone, Copy, Debug)]
pub struct ResolutionSweep {
    pub gamma0: f64,
    pub delta_gamma: f64,
    pub gamma_max: f64,
}

impl Default for ResolutionSweep {
    fn default() -> Self {
        ResolutionSweep {
            gamma0: 0.5,
            delta_gamma: 0.1,
            gamma_max: 64.0,
        }
    }
}

impl ResolutionSweep {
    fn validate(&self) -> Result<()> {
        if !(self.gamma0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma0 must be positive, got {}",
                self.gamma0
            )));
        }
        if !(self.delta_gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta_gamma must be positive, got {}",
                self.delta_gamma
            )));
        }
        if self.gamma_max < self.gamma0 {
            return Err(Error::InvalidParameter(format!(
                "gamma_max {} below gamma0 {}",
                self.gamma_max, self.gamma0
            )));
        }
        Ok(())
    }

    /// Resolution used at (1-based) iteration `i`.
    pub fn gamma_at(&self, i: usize) -> f64 {
        self.gamma0 + (i - 1) as f64 * self.delta_gamma
    }

    /// Most iterations the sweep can run before exhausting `gamma_max`.
    pub fn max_iterations(&self) -> usize {
        ((self.gamma_max - self.gamma0) / self.delta_gamma).floor() as usize + 1
    }
}

/// Full parameter set for a containment run.
#[derive(Clone, Copy, Debug)]
pub struct ContainParams {
    /// Number of communities to immunize.
    pub budget: usize,
    pub sweep: ResolutionSweep,
    pub rng_seed: u64,
}

impl Default for ContainParams {
    fn default() -> Self {
        ContainParams {
            budget: 10,
            sweep: ResolutionSweep::default(),
            rng_seed: 42,
        }
    }
}

/// A connected component of the composed subgraph, annotated with the
/// constraint summary of its members. Components whose nodes carry no edge
/// weight (isolated seeds) have no profile.
#[derive(Clone, Debug)]
pub struct ComponentInfo {
    /// Members as ids of the parent graph.
    pub members: NodeSet,
    pub profile: Option<ConstraintProfile>,
}

/// Union of the closed neighborhoods of the seeds, with its induced subgraph
/// and constraint-annotated components.
#[derive(Debug)]
pub struct ComposedSubgraph {
    /// Node set in parent-graph ids.
    pub nodes: NodeSet,
    pub graph: Graph,
    /// Components ordered by ascending mean constraint (profileless last),
    /// ties toward the smallest contained external id.
    pub components: Vec<ComponentInfo>,
}

/// One ranked community.
#[derive(Clone, Debug)]
pub struct RankedCommunity {
    /// Full community membership, sorted by internal id.
    pub members: Vec<NodeId>,
    /// Seed nodes inside the community.
    pub harmful: usize,
    pub size: usize,
    /// harmful / size.
    pub score: f64,
}

/// Ranked list of communities intersecting the composed subgraph, plus sweep
/// metadata. `iterations` counts Louvain invocations and
/// `gamma_final = gamma0 + (iterations − 1)·delta_gamma`.
#[derive(Clone, Debug)]
pub struct RankedCommunities {
    pub entries: Vec<RankedCommunity>,
    pub gamma_final: f64,
    pub iterations: usize,
}

/// Builds the composed subgraph over the union of closed seed neighborhoods.
pub fn compose_seed_subgraph(g: &Graph, seeds: &NodeSet) -> Result<ComposedSubgraph> {
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    let mut nodes = NodeSet::new();
    for &s in seeds {
        if s >= g.node_count() {
            return Err(Error::IndexOutOfRange {
                index: s,
                n: g.node_count(),
            });
        }
        nodes.insert(s);
        for &(u, _) in g.neighbors(s) {
            nodes.insert(u);
        }
    }
    let sub = g.induced_subgraph(&nodes)?;

    // Map component members back to parent ids via external ids.
    let mut components = Vec::new();
    for comp in sub.connected_components() {
        let profile = match component_constraint_profile(&sub, &comp) {
            Ok(p) => Some(p),
            Err(Error::ConstraintUndefined(_)) => None,
            Err(e) => return Err(e),
        };
        let members: NodeSet = comp
            .iter()
            .map(|&v| {
                g.index_of(sub.external_id(v))
                    .expect("subgraph ids originate from the parent")
            })
            .collect();
        components.push(ComponentInfo { members, profile });
    }
    components.sort_by(|a, b| {
        let key = |c: &ComponentInfo| {
            (
                c.profile.is_none(),
                c.profile.map(|p| p.mean).unwrap_or(f64::INFINITY),
            )
        };
        let (an, am) = key(a);
        let (bn, bm) = key(b);
        an.cmp(&bn)
            .then(am.partial_cmp(&bm).expect("constraint means are finite"))
            .then_with(|| {
                let ra = a.members.iter().map(|&v| g.ext_rank(v)).min().unwrap();
                let rb = b.members.iter().map(|&v| g.ext_rank(v)).min().unwrap();
                ra.cmp(&rb)
            })
    });

    Ok(ComposedSubgraph {
        nodes,
        graph: sub,
        components,
    })
}

/// Runs the containment sweep: at each resolution, Louvain partitions the
/// full graph and the communities sharing at least one node with the
/// composed subgraph are counted; once at least `budget` of them intersect,
/// they are returned ranked by harmful share.
pub fn contain(g: &Graph, seeds: &NodeSet, params: &ContainParams) -> Result<RankedCommunities> {
    params.sweep.validate()?;
    if params.budget == 0 {
        return Err(Error::InvalidParameter(
            "community budget must be at least 1".into(),
        ));
    }
    let composed = compose_seed_subgraph(g, seeds)?;
    if params.budget > composed.nodes.len() {
        return Err(Error::BudgetUnreachable {
            requested: params.budget,
            available: composed.nodes.len(),
        });
    }

    let mut iterations = 0;
    loop {
        iterations += 1;
        let gamma = params.sweep.gamma_at(iterations);
        if gamma > params.sweep.gamma_max + 1e-12 {
            // Re-run diagnostics for the previous step are carried below.
            return Err(Error::ResolutionExhausted {
                gamma,
                iterations: iterations - 1,
                found: 0,
                required: params.budget,
            });
        }
        let partition = louvain(g, gamma, params.rng_seed)?;
        let intersecting = intersecting_communities(&partition, &composed.nodes);
        if intersecting.len() >= params.budget {
            let entries = rank_communities(g, &partition, &intersecting, seeds);
            return Ok(RankedCommunities {
                entries,
                gamma_final: gamma,
                iterations,
            });
        }
    }
}

/// Ids of communities with at least one node in `nodes`.
fn intersecting_communities(partition: &Partition, nodes: &NodeSet) -> Vec<usize> {
    let mut hit = vec![false; partition.community_count()];
    for &v in nodes {
        hit[partition.community_of(v)] = true;
    }
    hit.iter()
        .enumerate()
        .filter_map(|(c, &h)| h.then_some(c))
        .collect()
}

/// Ranks communities by score n_h/n_C descending; ties prefer the larger
/// community, then the smallest contained external id.
fn rank_communities(
    g: &Graph,
    partition: &Partition,
    community_ids: &[usize],
    seeds: &NodeSet,
) -> Vec<RankedCommunity> {
    let mut entries: Vec<(RankedCommunity, usize)> = community_ids
        .iter()
        .map(|&c| {
            let members = partition.communities()[c].clone();
            let harmful = members.iter().filter(|v| seeds.contains(v)).count();
            let size = members.len();
            let min_rank = members.iter().map(|&v| g.ext_rank(v)).min().unwrap();
            (
                RankedCommunity {
                    members,
                    harmful,
                    size,
                    score: harmful as f64 / size as f64,
                },
                min_rank,
            )
        })
        .collect();
    entries.sort_by(|(a, ra), (b, rb)| {
        b.score
            .partial_cmp(&a.score)
            .expect("scores are finite")
            .then_with(|| b.size.cmp(&a.size))
            .then_with(|| ra.cmp(rb))
    });
    entries.into_iter().map(|(e, _)| e).collect()
}

/// Union of the node sets of the top-k ranked communities.
pub fn immunized_node_set(ranked: &RankedCommunities, k: usize) -> Result<NodeSet> {
    if k > ranked.entries.len() {
        return Err(Error::NotEnoughCommunities {
            requested: k,
            available: ranked.entries.len(),
        });
    }
    Ok(ranked.entries[..k]
        .iter()
        .flat_map(|e| e.members.iter().copied())
        .collect())
}

/// Harmful counts per community for an arbitrary partition; exposed for
/// reporting without a full containment run.
pub fn community_scores(partition: &Partition, seeds: &NodeSet) -> HashMap<usize, f64> {
    partition
        .communities()
        .iter()
        .enumerate()
        .map(|(c, members)| {
            let harmful = members.iter().filter(|v| seeds.contains(v)).count();
            (c, harmful as f64 / members.len() as f64)
        })
        .collect()
}
