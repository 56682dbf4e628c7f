//! Labeled (dyad, interval) instances for AUC evaluation.
//!
//! Every event inside the requested window becomes a positive instance with
//! a small interval around its timestamp; negatives pair a uniformly drawn
//! dyad with a uniformly drawn time, rejected while the time falls inside a
//! positive interval of the same dyad.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::stream_rng;
use crate::{Error, Result};

use super::{Dyad, Event, EventGraph};

/// Instance half-width: intervals span `2e-3` around the sampled time.
pub const DEFAULT_HALF_WIDTH: f64 = 1e-3;

/// Per-class cap applied after balanced generation.
pub const SUBSAMPLE_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Positive,
    Negative,
}

/// One scored instance: a dyad and a closed time interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledInstance {
    pub i: usize,
    pub j: usize,
    pub t_lower: f64,
    pub t_upper: f64,
    pub label: Label,
}

/// Balanced instance set; positives and negatives are equal in count before
/// subsampling and individually capped at [`SUBSAMPLE_CAP`] afterwards.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledInstanceSet {
    pub instances: Vec<LabeledInstance>,
    pub half_width: f64,
}

impl LabeledInstanceSet {
    pub fn num_positive(&self) -> usize {
        self.instances.iter().filter(|x| x.label == Label::Positive).count()
    }

    pub fn num_negative(&self) -> usize {
        self.instances.len() - self.num_positive()
    }

    /// Serialize as the documented JSON schema:
    /// `{half_width, instances: [[i, j, t_lower, t_upper, label01], ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .instances
            .iter()
            .map(|x| {
                serde_json::json!([
                    x.i,
                    x.j,
                    x.t_lower,
                    x.t_upper,
                    if x.label == Label::Positive { 1 } else { 0 }
                ])
            })
            .collect();
        serde_json::json!({ "half_width": self.half_width, "instances": rows })
    }
}

/// Build instances from all events of `g` inside `window`, with negatives
/// drawn over all dyads of the graph.
pub fn build_instances(
    g: &EventGraph,
    window: (f64, f64),
    seed: u64,
) -> Result<LabeledInstanceSet> {
    let events: Vec<Event> = g.events.clone();
    build_instances_over(&events, g.num_nodes, window, None, seed)
}

/// Build instances from an explicit event list, optionally restricting the
/// negative-sampling dyad domain (used by the completion task, whose
/// negatives must touch only hidden dyads).
pub fn build_instances_over(
    events: &[Event],
    num_nodes: usize,
    window: (f64, f64),
    dyad_domain: Option<&[Dyad]>,
    seed: u64,
) -> Result<LabeledInstanceSet> {
    let (w_lo, w_hi) = window;
    if w_lo > w_hi {
        return Err(Error::InvalidInterval { lo: w_lo, hi: w_hi });
    }
    let half = DEFAULT_HALF_WIDTH;

    let in_window: Vec<&Event> =
        events.iter().filter(|e| e.t >= w_lo && e.t <= w_hi).collect();
    if in_window.is_empty() {
        return Err(Error::EmptyWindow { lo: w_lo, hi: w_hi });
    }

    // Positive intervals, clamped to the window.
    let clamp = |c: f64| ((c - half).max(w_lo), (c + half).min(w_hi));
    let mut positives: Vec<LabeledInstance> = Vec::with_capacity(in_window.len());
    let mut by_dyad: HashMap<Dyad, Vec<f64>> = HashMap::new();
    for e in &in_window {
        let (lo, hi) = clamp(e.t);
        positives.push(LabeledInstance {
            i: e.i,
            j: e.j,
            t_lower: lo,
            t_upper: hi,
            label: Label::Positive,
        });
        by_dyad.entry((e.i, e.j)).or_default().push(e.t);
    }

    // Negatives: uniform (dyad, time), resampled while the time lands inside
    // a positive interval of the same dyad.
    const MAX_RETRIES: usize = 1000;
    let mut rng = stream_rng(seed, 1);
    let mut negatives: Vec<LabeledInstance> = Vec::with_capacity(positives.len());
    for index in 0..positives.len() {
        let mut accepted = None;
        for _ in 0..MAX_RETRIES {
            let (i, j) = match dyad_domain {
                Some(domain) => domain[rng.gen_range(0..domain.len())],
                None => {
                    let i = rng.gen_range(0..num_nodes);
                    let mut j = rng.gen_range(0..num_nodes - 1);
                    if j >= i {
                        j += 1;
                    }
                    if i < j {
                        (i, j)
                    } else {
                        (j, i)
                    }
                }
            };
            let t = rng.gen_range(w_lo..=w_hi);
            let collides = by_dyad
                .get(&(i, j))
                .map(|ts| ts.iter().any(|&e| (t - e).abs() <= half))
                .unwrap_or(false);
            if !collides {
                let (lo, hi) = clamp(t);
                accepted = Some(LabeledInstance {
                    i,
                    j,
                    t_lower: lo,
                    t_upper: hi,
                    label: Label::Negative,
                });
                break;
            }
        }
        match accepted {
            Some(inst) => negatives.push(inst),
            None => {
                return Err(Error::NegativeSamplingExhausted { index, attempts: MAX_RETRIES })
            }
        }
    }

    // Balanced by construction; cap each class uniformly.
    subsample(&mut positives, SUBSAMPLE_CAP, &mut rng);
    subsample(&mut negatives, SUBSAMPLE_CAP, &mut rng);

    let mut instances = positives;
    instances.extend(negatives);
    Ok(LabeledInstanceSet { instances, half_width: half })
}

fn subsample<T>(items: &mut Vec<T>, cap: usize, rng: &mut impl Rng) {
    if items.len() <= cap {
        return;
    }
    for idx in 0..cap {
        let swap = rng.gen_range(idx..items.len());
        items.swap(idx, swap);
    }
    items.truncate(cap);
}
