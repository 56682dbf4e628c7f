//! Train/evaluation splitting of a normalized event graph.
//!
//! The split removes the last stretch of the timeline for future prediction,
//! hides a fraction of dyads entirely for the completion task, and draws a
//! further set of masked dyads used only for prior-weight selection during
//! training.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::stream_rng;
use crate::{Error, Result};

use super::{sort_events, Dyad, Event, EventGraph};

/// Fractions and cutoffs governing [`split`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SplitConfig {
    /// Events with `t > prediction_start * horizon` form the prediction set.
    pub prediction_start: f64,
    /// Fraction of all dyads hidden for the completion task.
    pub hidden_fraction: f64,
    /// Fraction of all dyads masked during prior-weight selection.
    pub masked_fraction: f64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self { prediction_start: 0.9, hidden_fraction: 0.10, masked_fraction: 0.20 }
    }
}

/// Outcome of splitting an event graph.
///
/// Node ids in every field refer to the *residual* numbering: nodes whose
/// events all fell in the prediction window are dropped and the remaining
/// ids are compacted. `node_map[new_id] = old_id` records the renumbering.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitResult {
    /// Training events (timeline up to the prediction cutoff, hidden dyads
    /// removed).
    pub residual: EventGraph,
    /// Events in the prediction window, including those on hidden dyads.
    pub prediction_events: Vec<Event>,
    /// Events on hidden dyads that fall in the training window; these are the
    /// positives of the completion task.
    pub hidden_events: Vec<Event>,
    /// Dyads removed from training for the completion task.
    pub hidden_dyads: Vec<Dyad>,
    /// Dyads masked from the likelihood while tuning the prior weight.
    pub masked_dyads: Vec<Dyad>,
    /// `node_map[new_id] = original_id` for nodes kept in the residual graph.
    pub node_map: Vec<usize>,
    /// Original ids of nodes dropped because they only appeared in the
    /// prediction window.
    pub removed_nodes: Vec<usize>,
    /// Prediction window start, in residual-timeline units.
    pub prediction_start: f64,
}

/// Split with default fractions (10% hidden, 20% masked, cutoff 0.9).
pub fn split(g: &EventGraph, seed: u64) -> Result<SplitResult> {
    split_with(g, SplitConfig::default(), seed)
}

/// Split `g` into residual / prediction / hidden sets.
///
/// Deterministic given `seed`. Hidden dyads are drawn uniformly without
/// replacement from all `N(N-1)/2` dyads; draws that would leave a node with
/// training events but no residual events are rejected and redrawn, so every
/// node of the residual graph keeps at least one event. Nodes whose events
/// all lie in the prediction window are removed afterwards, together with
/// their prediction events, and the id range is compacted.
pub fn split_with(g: &EventGraph, cfg: SplitConfig, seed: u64) -> Result<SplitResult> {
    if g.events.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = g.num_nodes;
    let cutoff = cfg.prediction_start * g.horizon;
    let all_dyads: Vec<Dyad> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let num_hidden = (cfg.hidden_fraction * all_dyads.len() as f64).floor() as usize;
    let num_masked = (cfg.masked_fraction * all_dyads.len() as f64).floor() as usize;

    let train_events: Vec<Event> = g.events.iter().copied().filter(|e| e.t <= cutoff).collect();
    let prediction_all: Vec<Event> = g.events.iter().copied().filter(|e| e.t > cutoff).collect();

    // Per-node training-event counts before hiding.
    let mut train_deg = vec![0usize; n];
    for e in &train_events {
        train_deg[e.i] += 1;
        train_deg[e.j] += 1;
    }

    // Draw hidden dyads, rejecting draws that orphan a node that does have
    // training events.
    let mut rng = stream_rng(seed, 0);
    const MAX_DRAWS: usize = 100;
    let mut hidden: HashSet<Dyad> = HashSet::new();
    let mut violating: Vec<usize> = Vec::new();
    let mut ok = false;
    for _ in 0..MAX_DRAWS {
        let mut pool = all_dyads.clone();
        pool.shuffle(&mut rng);
        let candidate: HashSet<Dyad> = pool.into_iter().take(num_hidden).collect();
        let mut deg = train_deg.clone();
        for e in &train_events {
            if candidate.contains(&(e.i, e.j)) {
                deg[e.i] -= 1;
                deg[e.j] -= 1;
            }
        }
        violating = (0..n).filter(|&v| train_deg[v] > 0 && deg[v] == 0).collect();
        if violating.is_empty() {
            hidden = candidate;
            ok = true;
            break;
        }
    }
    if !ok {
        return Err(Error::SplitInfeasible { nodes: violating });
    }

    let residual_events: Vec<Event> =
        train_events.iter().copied().filter(|e| !hidden.contains(&(e.i, e.j))).collect();
    let hidden_events: Vec<Event> =
        train_events.iter().copied().filter(|e| hidden.contains(&(e.i, e.j))).collect();

    // Nodes with zero residual events are prediction-only (hiding never
    // orphans a node with training events); drop them and compact ids.
    let mut res_deg = vec![0usize; n];
    for e in &residual_events {
        res_deg[e.i] += 1;
        res_deg[e.j] += 1;
    }
    let kept: Vec<usize> = (0..n).filter(|&v| res_deg[v] > 0).collect();
    let removed: Vec<usize> = (0..n).filter(|&v| res_deg[v] == 0).collect();
    if kept.is_empty() {
        return Err(Error::EmptyResidual);
    }
    let mut new_id = vec![usize::MAX; n];
    for (new, &old) in kept.iter().enumerate() {
        new_id[old] = new;
    }
    let remap = |e: &Event| Event { i: new_id[e.i], j: new_id[e.j], t: e.t };
    let keeps = |e: &Event| new_id[e.i] != usize::MAX && new_id[e.j] != usize::MAX;

    let mut residual_events: Vec<Event> = residual_events.iter().map(remap).collect();
    sort_events(&mut residual_events);
    let mut prediction_events: Vec<Event> =
        prediction_all.iter().filter(|e| keeps(e)).map(remap).collect();
    sort_events(&mut prediction_events);
    let mut hidden_events: Vec<Event> = hidden_events.iter().map(remap).collect();
    sort_events(&mut hidden_events);

    let mut hidden_dyads: Vec<Dyad> = hidden
        .iter()
        .filter(|&&(i, j)| new_id[i] != usize::MAX && new_id[j] != usize::MAX)
        .map(|&(i, j)| {
            let (a, b) = (new_id[i], new_id[j]);
            if a < b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    hidden_dyads.sort_unstable();

    // Masked dyads: drawn over the residual id space, disjoint from hidden.
    let n_res = kept.len();
    let hidden_set: HashSet<Dyad> = hidden_dyads.iter().copied().collect();
    let maskable: Vec<Dyad> = (0..n_res)
        .flat_map(|i| (i + 1..n_res).map(move |j| (i, j)))
        .filter(|d| !hidden_set.contains(d))
        .collect();
    let mut masked_dyads: Vec<Dyad> = {
        let mut pool = maskable;
        let take = num_masked.min(pool.len());
        // Partial Fisher-Yates.
        for idx in 0..take {
            let swap = rng.gen_range(idx..pool.len());
            pool.swap(idx, swap);
        }
        pool.truncate(take);
        pool
    };
    masked_dyads.sort_unstable();

    let residual = EventGraph { num_nodes: n_res, events: residual_events, horizon: g.horizon };
    Ok(SplitResult {
        residual,
        prediction_events,
        hidden_events,
        hidden_dyads,
        masked_dyads,
        node_map: kept,
        removed_nodes: removed,
        prediction_start: cutoff,
    })
}
