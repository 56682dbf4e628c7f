//! Per-(dyad, bin) event-sum coefficients.
//!
//! The event term of the log-likelihood expands into per-bin sums that
//! depend on the data only through the event count and the first two power
//! sums of local event times. Precomputing these once collapses the per-event
//! loop out of every likelihood evaluation.

use std::collections::HashMap;

use crate::graph::{Dyad, EventGraph};
use crate::Result;

/// Coefficients of one occupied (dyad, bin) cell: the event count and the
/// first two power sums of local (in-bin) event times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadBinCoeff {
    pub bin: usize,
    pub count: usize,
    /// Sum of local event times within the bin.
    pub alpha1: f64,
    /// Sum of squared local event times within the bin.
    pub alpha2: f64,
}

/// Sparse per-dyad coefficient table; dyads without events are absent.
#[derive(Debug, Clone, Default)]
pub struct BinCoefficients {
    pub num_bins: usize,
    pub bin_width: f64,
    table: HashMap<Dyad, Vec<DyadBinCoeff>>,
    total_events: usize,
}

impl BinCoefficients {
    pub fn get(&self, dyad: Dyad) -> Option<&[DyadBinCoeff]> {
        self.table.get(&dyad).map(|v| v.as_slice())
    }

    pub fn dyads(&self) -> impl Iterator<Item = (&Dyad, &Vec<DyadBinCoeff>)> {
        self.table.iter()
    }

    pub fn num_dyads(&self) -> usize {
        self.table.len()
    }

    pub fn total_events(&self) -> usize {
        self.total_events
    }
}

/// Build the coefficient table for a normalized graph and `num_bins` equal
/// bins. Events exactly on an interior boundary land in the right bin; an
/// event at the horizon lands in the last bin with local time equal to the
/// bin width.
pub fn precompute_coefficients(g: &EventGraph, num_bins: usize) -> Result<BinCoefficients> {
    let bin_width = g.horizon / num_bins as f64;
    let mut table: HashMap<Dyad, Vec<DyadBinCoeff>> = HashMap::new();
    for e in &g.events {
        let bin = ((e.t / bin_width).floor() as usize).min(num_bins - 1);
        let local = e.t - bin as f64 * bin_width;
        let cell = table.entry((e.i, e.j)).or_default();
        match cell.iter_mut().find(|c| c.bin == bin) {
            Some(c) => {
                c.count += 1;
                c.alpha1 += local;
                c.alpha2 += local * local;
            }
            None => cell.push(DyadBinCoeff { bin, count: 1, alpha1: local, alpha2: local * local }),
        }
    }
    for cell in table.values_mut() {
        cell.sort_by_key(|c| c.bin);
    }
    Ok(BinCoefficients { num_bins, bin_width, table, total_events: g.events.len() })
}
