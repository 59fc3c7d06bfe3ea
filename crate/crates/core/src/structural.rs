//! Burt node constraint (structural holes).
//!
//! The constraint c(v) measures how concentrated a node's ties are within one
//! closed group; low constraint marks brokers that bridge otherwise separate
//! groups. Tie proportions are row-normalized edge weights,
//! p(v,u) = w(v,u) / strength(v).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, NodeSet};

/// Which reading of the constraint summand to evaluate.
///
/// `Standard` is the conventional structural-holes form: the summand for a
/// neighbor u is (p(v,u) + Σ_{w∈N(u), w≠v} p(v,w)·p(w,u))², crediting v's
/// indirect investment in u through shared neighbors. `Subscripts` keeps the
/// index pattern (p_uv + Σ_{w∈N(u)} p_uv·p_wv)² with every proportion aimed
/// at v; it exists for comparison and is not the default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ConstraintMode {
    #[default]
    Standard,
    Subscripts,
}

/// Row-normalized tie strengths: p(v,u) = w(v,u)/strength(v), zero for
/// non-neighbors and for nodes with zero strength.
pub struct TieProportions {
    rows: Vec<Vec<(NodeId, f64)>>,
}

impl TieProportions {
    pub fn proportion(&self, v: NodeId, u: NodeId) -> f64 {
        match self.rows[v].binary_search_by_key(&u, |&(w, _)| w) {
            Ok(pos) => self.rows[v][pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn row(&self, v: NodeId) -> &[(NodeId, f64)] {
        &self.rows[v]
    }
}

/// Tie proportions for every node. Isolated nodes get all-zero rows.
pub fn tie_proportions(g: &Graph) -> TieProportions {
    let rows = (0..g.node_count())
        .map(|v| {
            let s = g.degree(v);
            g.neighbors(v)
                .iter()
                .map(|&(u, w)| (u, if s > 0.0 { w / s } else { 0.0 }))
                .collect()
        })
        .collect();
    TieProportions { rows }
}

/// Node constraint c(v) under the default [`ConstraintMode::Standard`] reading.
pub fn node_constraint(g: &Graph, v: NodeId) -> Result<f64> {
    node_constraint_with(g, v, ConstraintMode::Standard)
}

pub fn node_constraint_with(g: &Graph, v: NodeId, mode: ConstraintMode) -> Result<f64> {
    if v >= g.node_count() {
        return Err(Error::IndexOutOfRange {
            index: v,
            n: g.node_count(),
        });
    }
    let strength_v = g.degree(v);
    if strength_v <= 0.0 {
        return Err(Error::ConstraintUndefined(g.external_id(v).clone()));
    }
    let c = match mode {
        ConstraintMode::Standard => g
            .neighbors(v)
            .iter()
            .map(|&(u, w_vu)| {
                let direct = w_vu / strength_v;
                let indirect: f64 = g
                    .neighbors(u)
                    .iter()
                    .filter(|&&(w, _)| w != v)
                    .map(|&(w, w_wu)| {
                        let p_vw = g.edge_weight(v, w) / strength_v;
                        if p_vw == 0.0 {
                            return 0.0;
                        }
                        let strength_w = g.degree(w);
                        if strength_w <= 0.0 {
                            return 0.0;
                        }
                        p_vw * (w_wu / strength_w)
                    })
                    .sum();
                let term = direct + indirect;
                term * term
            })
            .sum(),
        ConstraintMode::Subscripts => g
            .neighbors(v)
            .iter()
            .map(|&(u, w_uv)| {
                let strength_u = g.degree(u);
                if strength_u <= 0.0 {
                    return 0.0;
                }
                let p_uv = w_uv / strength_u;
                let toward_v: f64 = g
                    .neighbors(u)
                    .iter()
                    .filter(|&&(w, _)| w != v)
                    .map(|&(w, _)| {
                        let strength_w = g.degree(w);
                        if strength_w <= 0.0 {
                            return 0.0;
                        }
                        g.edge_weight(w, v) / strength_w
                    })
                    .sum();
                let term = p_uv + p_uv * toward_v;
                term * term
            })
            .sum(),
    };
    Ok(c)
}

/// Constraint summary over a set of nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstraintProfile {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

/// Aggregate constraint statistics over the members of a component. Members
/// are evaluated in parallel; errors for isolated members propagate.
pub fn component_constraint_profile(g: &Graph, comp: &NodeSet) -> Result<ConstraintProfile> {
    if comp.is_empty() {
        return Err(Error::EmptyNodeSet);
    }
    let members: Vec<NodeId> = comp.iter().copied().collect();
    let values: Vec<f64> = members
        .par_iter()
        .map(|&v| node_constraint(g, v))
        .collect::<Result<_>>()?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(ConstraintProfile { min, mean, max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn star4() -> Graph {
        // center 0 with leaves 1..=3
        Graph::from_edges([(0, 1), (0, 2), (0, 3)])
    }

    #[test]
    fn tie_proportions_star() {
        let g = star4();
        let p = tie_proportions(&g);
        for leaf in 1..4 {
            assert!((p.proportion(0, leaf) - 1.0 / 3.0).abs() < 1e-12);
            assert_eq!(p.proportion(leaf, 0), 1.0);
        }
        assert_eq!(p.proportion(1, 2), 0.0);
    }

    #[test]
    fn tie_proportions_rows_sum_to_one() {
        let g = crate::synth::gnm(25, 60, 11);
        let p = tie_proportions(&g);
        for v in 0..g.node_count() {
            if g.degree(v) > 0.0 {
                let sum: f64 = p.row(v).iter().map(|&(_, x)| x).sum();
                assert!((sum - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn constraint_star_center() {
        let g = star4();
        assert!((node_constraint(&g, 0).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn constraint_star_leaf() {
        let g = star4();
        assert!((node_constraint(&g, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constraint_triangle() {
        let g = Graph::from_edges([(0, 1), (1, 2), (2, 0)]);
        for v in 0..3 {
            assert!((node_constraint(&g, v).unwrap() - 1.125).abs() < 1e-12);
        }
    }

    #[test]
    fn constraint_dyad_is_one() {
        let g = Graph::from_edges([(0, 1)]);
        assert!((node_constraint(&g, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!((node_constraint(&g, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constraint_isolated_node_is_undefined() {
        let mut b = crate::graph::GraphBuilder::new();
        b.add_node(crate::graph::ExternalId::Num(0));
        b.add_edge(
            crate::graph::ExternalId::Num(1),
            crate::graph::ExternalId::Num(2),
            1.0,
        );
        let g = b.build();
        assert!(matches!(
            node_constraint(&g, 0),
            Err(Error::ConstraintUndefined(_))
        ));
    }

    #[test]
    fn constraint_scale_invariant() {
        let edges = [(0u64, 1u64), (1, 2), (2, 0), (2, 3), (3, 4)];
        let g1 = Graph::from_weighted_edges(edges.iter().map(|&(u, v)| (u, v, 1.0)));
        let g7 = Graph::from_weighted_edges(edges.iter().map(|&(u, v)| (u, v, 7.0)));
        for v in 0..5 {
            let a = node_constraint(&g1, v).unwrap();
            let b = node_constraint(&g7, v).unwrap();
            assert!((a - b).abs() < 1e-12, "node {v}: {a} vs {b}");
        }
    }

    #[test]
    fn constraint_positive_for_non_isolated() {
        let g = crate::synth::connected_gnm(20, 15, 3);
        for v in 0..g.node_count() {
            assert!(node_constraint(&g, v).unwrap() > 0.0);
        }
    }

    #[test]
    fn subscripts_mode_diverges_on_star() {
        let g = star4();
        // all of each leaf's attention flows straight to the center
        assert!((node_constraint_with(&g, 0, ConstraintMode::Subscripts).unwrap() - 3.0).abs() < 1e-12);
        // on the triangle both readings coincide
        let k3 = Graph::from_edges([(0, 1), (1, 2), (2, 0)]);
        assert!(
            (node_constraint_with(&k3, 0, ConstraintMode::Subscripts).unwrap() - 1.125).abs()
                < 1e-12
        );
    }

    #[test]
    fn profile_of_triangle() {
        let g = Graph::from_edges([(0, 1), (1, 2), (2, 0)]);
        let comp: NodeSet = (0..3).collect();
        let p = component_constraint_profile(&g, &comp).unwrap();
        assert!((p.min - 1.125).abs() < 1e-12);
        assert!((p.mean - 1.125).abs() < 1e-12);
        assert!((p.max - 1.125).abs() < 1e-12);
    }

    #[test]
    fn profile_of_star_center_alone() {
        let g = star4();
        let p = component_constraint_profile(&g, &NodeSet::from([0])).unwrap();
        assert!((p.mean - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn profile_of_dyad_endpoint() {
        let g = Graph::from_edges([(0, 1)]);
        let p = component_constraint_profile(&g, &NodeSet::from([0])).unwrap();
        assert_eq!(
            p,
            ConstraintProfile {
                min: 1.0,
                mean: 1.0,
                max: 1.0
            }
        );
    }

    #[test]
    fn profile_rejects_empty_set() {
        let g = star4();
        assert!(matches!(
            component_constraint_profile(&g, &NodeSet::new()),
            Err(Error::EmptyNodeSet)
        ));
    }
}
