//! Continuous-time interaction data: loading, normalization, splitting and
//! labeled-instance construction.

mod instances;
mod split;

pub use instances::{build_instances, build_instances_over, Label, LabeledInstance, LabeledInstanceSet};
pub use split::{split, split_with, SplitConfig, SplitResult};

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Unordered node pair stored canonically with `i < j`.
pub type Dyad = (usize, usize);

/// Return the canonical form of a node pair.
pub fn canonical(a: usize, b: usize) -> Dyad {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// A single time-stamped interaction on the dyad `(i, j)`, `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub i: usize,
    pub j: usize,
    pub t: f64,
}

/// A set of nodes together with their time-stamped undirected interactions.
///
/// Events are kept sorted by `(i, j, t)` with multiset semantics: repeated
/// events at identical times are legal Poisson data and are preserved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventGraph {
    pub num_nodes: usize,
    pub events: Vec<Event>,
    /// Upper end of the modeled timeline; 1.0 after [`normalize_time`].
    pub horizon: f64,
}

impl EventGraph {
    /// Build a graph from raw events, canonicalizing, validating and sorting.
    pub fn new(num_nodes: usize, mut events: Vec<Event>, horizon: f64) -> Result<Self> {
        for e in &mut events {
            if e.i == e.j {
                return Err(Error::SelfLoop { node: e.i });
            }
            if e.i > e.j {
                std::mem::swap(&mut e.i, &mut e.j);
            }
            if e.j >= num_nodes {
                return Err(Error::DyadOutOfRange { i: e.i, j: e.j, num_nodes });
            }
            if !(0.0..=horizon).contains(&e.t) {
                return Err(Error::TimeOutOfRange { t: e.t, horizon });
            }
        }
        sort_events(&mut events);
        Ok(Self { num_nodes, events, horizon })
    }

    /// Number of dyads with at least one event.
    pub fn num_active_dyads(&self) -> usize {
        let mut count = 0;
        let mut last: Option<Dyad> = None;
        for e in &self.events {
            let d = (e.i, e.j);
            if last != Some(d) {
                count += 1;
                last = Some(d);
            }
        }
        count
    }

    /// Largest number of events carried by any single dyad.
    pub fn max_dyad_events(&self) -> usize {
        let mut best = 0;
        let mut run = 0;
        let mut last: Option<Dyad> = None;
        for e in &self.events {
            let d = (e.i, e.j);
            if last == Some(d) {
                run += 1;
            } else {
                run = 1;
                last = Some(d);
            }
            best = best.max(run);
        }
        best
    }

    /// Events grouped by dyad, preserving the sorted order within each group.
    pub fn events_by_dyad(&self) -> BTreeMap<Dyad, Vec<f64>> {
        let mut map: BTreeMap<Dyad, Vec<f64>> = BTreeMap::new();
        for e in &self.events {
            map.entry((e.i, e.j)).or_default().push(e.t);
        }
        map
    }

    /// Write the graph in the plain-text edge-list format (`i j t` per line).
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        for e in &self.events {
            writeln!(w, "{} {} {}", e.i, e.j, e.t)?;
        }
        Ok(())
    }
}

pub(crate) fn sort_events(events: &mut [Event]) {
    events.sort_by(|a, b| {
        (a.i, a.j)
            .cmp(&(b.i, b.j))
            .then(a.t.partial_cmp(&b.t).expect("event times are finite"))
    });
}

/// Load an edge list from `path`.
///
/// Each record is `i j t` or `i j t w`, whitespace- or comma-delimited; lines
/// starting with `#` are ignored. Node ids are remapped onto a dense
/// `0..N-1` range in ascending order of the original ids. With `weighted`
/// set, a record of integer weight `w` expands into `w` identical unit events
/// at the same time.
pub fn load_events<P: AsRef<Path>>(path: P, weighted: bool) -> Result<EventGraph> {
    let file = std::fs::File::open(path)?;
    parse_events(BufReader::new(file), weighted)
}

/// Parse the edge-list format from any reader. See [`load_events`].
pub fn parse_events<R: BufRead>(reader: R, weighted: bool) -> Result<EventGraph> {
    let mut raw: Vec<(u64, u64, f64, u64)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() != 3 && fields.len() != 4 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected 3 or 4 fields, got {}", fields.len()),
            });
        }
        let i: u64 = fields[0].parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("invalid node id {:?}", fields[0]),
        })?;
        let j: u64 = fields[1].parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("invalid node id {:?}", fields[1]),
        })?;
        let t: f64 = fields[2].parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("invalid time {:?}", fields[2]),
        })?;
        if i == j {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("self-loop rejected: node {i}"),
            });
        }
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("negative or non-finite time {t}"),
            });
        }
        let w = if fields.len() == 4 {
            if !weighted {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "weight column present but the weighted flag is not set".into(),
                });
            }
            let w: i64 = fields[3].parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("non-integer weight {:?}", fields[3]),
            })?;
            if w <= 0 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("weight must be a positive integer, got {w}"),
                });
            }
            w as u64
        } else {
            1
        };
        raw.push((i, j, t, w));
    }
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }

    // Dense remap in ascending original-id order.
    let mut ids: BTreeMap<u64, usize> = BTreeMap::new();
    for &(i, j, _, _) in &raw {
        let next = ids.len();
        ids.entry(i).or_insert(next);
        let next = ids.len();
        ids.entry(j).or_insert(next);
    }
    // BTreeMap iteration is sorted; reassign so ids are ordered by value.
    let mut ids_sorted: BTreeMap<u64, usize> = BTreeMap::new();
    for (rank, (&orig, _)) in ids.iter().enumerate() {
        ids_sorted.insert(orig, rank);
    }

    let mut events = Vec::new();
    let mut horizon: f64 = 0.0;
    for (i, j, t, w) in raw {
        let (a, b) = canonical(ids_sorted[&i], ids_sorted[&j]);
        horizon = horizon.max(t);
        for _ in 0..w {
            events.push(Event { i: a, j: b, t });
        }
    }
    sort_events(&mut events);
    Ok(EventGraph { num_nodes: ids_sorted.len(), events, horizon })
}

/// Affinely rescale event times onto `[0, 1]`.
///
/// Errors when all events share a single timestamp, since the affine map is
/// then undefined.
pub fn normalize_time(g: &EventGraph) -> Result<EventGraph> {
    if g.events.is_empty() {
        return Err(Error::EmptyInput);
    }
    let t_min = g.events.iter().map(|e| e.t).fold(f64::INFINITY, f64::min);
    let t_max = g.events.iter().map(|e| e.t).fold(f64::NEG_INFINITY, f64::max);
    if t_max == t_min {
        return Err(Error::DegenerateTimeline);
    }
    let scale = t_max - t_min;
    let events = g
        .events
        .iter()
        .map(|e| Event { i: e.i, j: e.j, t: ((e.t - t_min) / scale).clamp(0.0, 1.0) })
        .collect();
    Ok(EventGraph { num_nodes: g.num_nodes, events, horizon: 1.0 })
}
