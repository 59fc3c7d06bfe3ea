//! Independent Cascade Model Monte-Carlo simulator.
//!
//! Each trial percolates the graph: the coin for an edge is derived from
//! (rng_seed, trial, edge) with a counter-based mixer, so runs with different
//! immunization sets or activation probabilities share the same randomness.
//! Under these common random numbers, immunizing more nodes can never
//! increase a trial's spread and raising p can never shrink it.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};

/// Per-edge activation probability model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ActivationModel {
    /// One shared probability for every edge.
    Uniform(f64),
    /// Edge weights are probabilities, clamped to 1.0.
    EdgeWeights,
}

/// Simulation parameters.
#[derive(Clone, Copy, Debug)]
pub struct CascadeConfig {
    pub model: ActivationModel,
    pub trials: usize,
    pub rng_seed: u64,
}

impl Default for CascadeConfig {
    fn default() -> Self {
        CascadeConfig {
            model: ActivationModel::Uniform(0.1),
            trials: 1000,
            rng_seed: 42,
        }
    }
}

impl CascadeConfig {
    fn validate(&self) -> Result<()> {
        if let ActivationModel::Uniform(p) = self.model
            && !(0.0..=1.0).contains(&p)
        {
            return Err(Error::InvalidParameter(format!(
                "activation probability must lie in [0,1], got {p}"
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// Monte-Carlo spread summary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpreadEstimate {
    pub mean_infected: f64,
    pub std_infected: f64,
    pub trials: usize,
    /// Nodes saved versus a reference run; 0 for a standalone simulation.
    pub saved: f64,
}

/// Expected final spread from `seeds` after removing `immunized` nodes.
/// Immunized nodes never activate, including immunized seeds.
pub fn simulate(
    g: &Graph,
    seeds: &NodeSet,
    immunized: &NodeSet,
    cfg: &CascadeConfig,
) -> Result<SpreadEstimate> {
    cfg.validate()?;
    for set in [seeds, immunized] {
        if let Some(&v) = set.iter().next_back()
            && v >= g.node_count()
        {
            return Err(Error::IndexOutOfRange {
                index: v,
                n: g.node_count(),
            });
        }
    }

    let counts = run_trials(g, seeds, immunized, cfg);
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / counts.len() as f64;
    let std = if counts.len() > 1 {
        let var = counts
            .iter()
            .map(|&c| (c as f64 - mean).powi(2))
            .sum::<f64>()
            / (counts.len() - 1) as f64;
        var.sqrt()
    } else {
        0.0
    };
    Ok(SpreadEstimate {
        mean_infected: mean,
        std_infected: std,
        trials: cfg.trials,
        saved: 0.0,
    })
}

/// Mean spread reduction: simulate with no immunization and with the given
/// set under the same random number stream, return the difference.
pub fn saved_nodes(
    g: &Graph,
    seeds: &NodeSet,
    immunized: &NodeSet,
    cfg: &CascadeConfig,
) -> Result<f64> {
    let baseline = simulate(g, seeds, &NodeSet::new(), cfg)?;
    let protected = simulate(g, seeds, immunized, cfg)?;
    Ok(baseline.mean_infected - protected.mean_infected)
}

/// Baseline and protected runs together, with `saved` filled in.
pub fn evaluate_immunization(
    g: &Graph,
    seeds: &NodeSet,
    immunized: &NodeSet,
    cfg: &CascadeConfig,
) -> Result<SpreadEstimate> {
    let baseline = simulate(g, seeds, &NodeSet::new(), cfg)?;
    let mut protected = simulate(g, seeds, immunized, cfg)?;
    protected.saved = baseline.mean_infected - protected.mean_infected;
    Ok(protected)
}

/// Per-trial final active counts, in trial order.
pub fn run_trials(g: &Graph, seeds: &NodeSet, immunized: &NodeSet, cfg: &CascadeConfig) -> Vec<usize> {
    let n = g.node_count();
    let blocked: Vec<bool> = {
        let mut b = vec![false; n];
        for &v in immunized {
            b[v] = true;
        }
        b
    };
    let initial: Vec<usize> = seeds.iter().copied().filter(|&s| !blocked[s]).collect();

    (0..cfg.trials)
        .into_par_iter()
        .map(|trial| cascade_trial(g, &initial, &blocked, cfg, trial as u64))
        .collect()
}

fn cascade_trial(
    g: &Graph,
    initial: &[usize],
    blocked: &[bool],
    cfg: &CascadeConfig,
    trial: u64,
) -> usize {
    let n = g.node_count();
    let mut active = vec![false; n];
    let mut queue = Vec::with_capacity(initial.len());
    for &s in initial {
        active[s] = true;
        queue.push(s);
    }
    let mut count = initial.len();

    while let Some(v) = queue.pop() {
        for &(u, w) in g.neighbors(v) {
            if active[u] || blocked[u] {
                continue;
            }
            let p = match cfg.model {
                ActivationModel::Uniform(p) => p,
                ActivationModel::EdgeWeights => w.min(1.0),
            };
            let key = (v.min(u) * n + v.max(u)) as u64;
            if edge_coin(cfg.rng_seed, trial, key) < p {
                active[u] = true;
                count += 1;
                queue.push(u);
            }
        }
    }
    count
}

/// Counter-based uniform draw in [0, 1) keyed by (seed, trial, edge).
fn edge_coin(seed: u64, trial: u64, edge_key: u64) -> f64 {
    let mut z = seed
        ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ edge_key.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64
}
