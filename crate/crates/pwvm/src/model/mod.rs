//! The piecewise-velocity latent model: positions, intensities, exact
//! intensity integrals and the Poisson log-likelihood.

mod approx_error;
mod bounds;
mod coeffs;
mod integral;
mod likelihood;

pub use approx_error::piecewise_approximation_error;
pub use bounds::{check_bounds, BoundReport, DyadBound, DyadBoundStatus};
pub use coeffs::{precompute_coefficients, BinCoefficients, DyadBinCoeff};
pub use integral::SegmentMoments;
pub use likelihood::{log_likelihood, log_likelihood_parts, LikelihoodGrad};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance below which a relative velocity is treated as zero and the
/// constant-distance limit of the intensity integral is used.
pub const VELOCITY_EPS: f64 = 1e-8;

/// Slack accepted on time-range checks to absorb floating-point drift at the
/// interval ends.
const TIME_SLACK: f64 = 1e-9;

/// Full parameterization of the embedding: node biases, initial positions
/// and per-bin velocities over `num_bins` equal subdivisions of
/// `[0, horizon]`.
///
/// Layouts are flat and row-major: `x0[n * dim + d]`,
/// `v[(b * num_nodes + n) * dim + d]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelState {
    pub num_nodes: usize,
    pub dim: usize,
    pub num_bins: usize,
    pub horizon: f64,
    pub beta: Vec<f64>,
    pub x0: Vec<f64>,
    pub v: Vec<f64>,
}

impl ModelState {
    /// Zero-initialized state.
    pub fn zeros(num_nodes: usize, dim: usize, num_bins: usize, horizon: f64) -> Self {
        Self {
            num_nodes,
            dim,
            num_bins,
            horizon,
            beta: vec![0.0; num_nodes],
            x0: vec![0.0; num_nodes * dim],
            v: vec![0.0; num_bins * num_nodes * dim],
        }
    }

    pub fn bin_width(&self) -> f64 {
        self.horizon / self.num_bins as f64
    }

    pub fn x0_of(&self, node: usize) -> &[f64] {
        &self.x0[node * self.dim..(node + 1) * self.dim]
    }

    pub fn v_of(&self, bin: usize, node: usize) -> &[f64] {
        let base = (bin * self.num_nodes + node) * self.dim;
        &self.v[base..base + self.dim]
    }

    /// Bin index holding time `t` under the right-bin convention: interior
    /// bin boundaries belong to the bin on their right, `t = horizon` to the
    /// last bin.
    pub fn bin_of(&self, t: f64) -> usize {
        ((t / self.bin_width()).floor() as usize).min(self.num_bins - 1)
    }

    fn check_time(&self, t: f64) -> Result<f64> {
        if t < -TIME_SLACK || t > self.horizon + TIME_SLACK {
            return Err(Error::TimeOutOfRange { t, horizon: self.horizon });
        }
        Ok(t.clamp(0.0, self.horizon))
    }

    /// Latent position of `node` at time `t`: the initial position plus the
    /// accumulated bin displacements plus the partial displacement inside the
    /// current bin.
    pub fn position(&self, node: usize, t: f64) -> Result<Vec<f64>> {
        let t = self.check_time(t)?;
        let bin = self.bin_of(t);
        let dt = t - bin as f64 * self.bin_width();
        let mut pos = self.x0_of(node).to_vec();
        for b in 0..bin {
            let vb = self.v_of(b, node);
            for d in 0..self.dim {
                pos[d] += self.bin_width() * vb[d];
            }
        }
        let vb = self.v_of(bin, node);
        for d in 0..self.dim {
            pos[d] += dt * vb[d];
        }
        Ok(pos)
    }

    /// Relative state of a dyad at the start of each bin: `rel_x0` and the
    /// per-bin relative position/velocity prefix used throughout the
    /// likelihood machinery. Returns `(positions_at_bin_starts, rel_v)` where
    /// `positions_at_bin_starts[b]` is the relative position at the start of
    /// bin `b` (length `num_bins`, each a `dim`-vector flattened).
    pub(crate) fn dyad_bin_starts(&self, i: usize, j: usize) -> (Vec<f64>, Vec<f64>) {
        let dim = self.dim;
        let width = self.bin_width();
        let mut starts = vec![0.0; self.num_bins * dim];
        let mut rel_v = vec![0.0; self.num_bins * dim];
        let xi = self.x0_of(i);
        let xj = self.x0_of(j);
        let mut cur: Vec<f64> = (0..dim).map(|d| xi[d] - xj[d]).collect();
        for b in 0..self.num_bins {
            let vi = self.v_of(b, i);
            let vj = self.v_of(b, j);
            for d in 0..dim {
                starts[b * dim + d] = cur[d];
                rel_v[b * dim + d] = vi[d] - vj[d];
            }
            for d in 0..dim {
                cur[d] += width * rel_v[b * dim + d];
            }
        }
        (starts, rel_v)
    }

    /// Event intensity for the dyad `(i, j)` at time `t`.
    pub fn intensity(&self, i: usize, j: usize, t: f64) -> Result<f64> {
        if i == j {
            return Err(Error::SelfLoop { node: i });
        }
        let ri = self.position(i, t)?;
        let rj = self.position(j, t)?;
        let d2: f64 = ri.iter().zip(&rj).map(|(a, b)| (a - b) * (a - b)).sum();
        Ok((self.beta[i] + self.beta[j] - d2).exp())
    }

    /// Exact integral of the intensity over `[t_lower, t_upper]`, split at
    /// bin boundaries and evaluated in closed form inside each bin.
    pub fn integrate_intensity(
        &self,
        i: usize,
        j: usize,
        t_lower: f64,
        t_upper: f64,
    ) -> Result<f64> {
        if i == j {
            return Err(Error::SelfLoop { node: i });
        }
        if t_lower > t_upper {
            return Err(Error::InvalidInterval { lo: t_lower, hi: t_upper });
        }
        let t_lower = self.check_time(t_lower)?;
        let t_upper = self.check_time(t_upper)?;
        let beta_ij = self.beta[i] + self.beta[j];
        let (starts, rel_v) = self.dyad_bin_starts(i, j);
        let dim = self.dim;
        let width = self.bin_width();
        let mut total = 0.0;
        let b_first = self.bin_of(t_lower);
        for b in b_first..self.num_bins {
            let bin_lo = b as f64 * width;
            if bin_lo >= t_upper {
                break;
            }
            let seg_lo = t_lower.max(bin_lo) - bin_lo;
            let seg_hi = t_upper.min(bin_lo + width) - bin_lo;
            if seg_hi <= seg_lo {
                continue;
            }
            let p = &starts[b * dim..(b + 1) * dim];
            let dv = &rel_v[b * dim..(b + 1) * dim];
            let m = SegmentMoments::compute(beta_ij, p, dv, seg_lo, seg_hi);
            total += m.i0;
        }
        Ok(total)
    }
}

/// Versioned checkpoint container for a trained model, optionally carrying
/// the prior hyperparameters it was trained with.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema_version: u32,
    pub num_nodes: usize,
    pub dim: usize,
    pub num_bins: usize,
    pub horizon: f64,
    pub beta: Vec<f64>,
    pub x0: Vec<Vec<f64>>,
    pub v: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<crate::prior::PriorState>,
}

pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

impl Checkpoint {
    pub fn from_model(m: &ModelState, prior: Option<crate::prior::PriorState>) -> Self {
        let x0 = (0..m.num_nodes).map(|n| m.x0_of(n).to_vec()).collect();
        let v = (0..m.num_bins)
            .map(|b| (0..m.num_nodes).map(|n| m.v_of(b, n).to_vec()).collect())
            .collect();
        Self {
            schema_version: CHECKPOINT_SCHEMA_VERSION,
            num_nodes: m.num_nodes,
            dim: m.dim,
            num_bins: m.num_bins,
            horizon: m.horizon,
            beta: m.beta.clone(),
            x0,
            v,
            prior,
        }
    }

    pub fn into_model(self) -> Result<(ModelState, Option<crate::prior::PriorState>)> {
        if self.schema_version != CHECKPOINT_SCHEMA_VERSION {
            return Err(Error::InvalidConfig {
                what: format!(
                    "checkpoint schema version {} (expected {})",
                    self.schema_version, CHECKPOINT_SCHEMA_VERSION
                ),
            });
        }
        let mut m = ModelState::zeros(self.num_nodes, self.dim, self.num_bins, self.horizon);
        if self.beta.len() != self.num_nodes
            || self.x0.len() != self.num_nodes
            || self.v.len() != self.num_bins
        {
            return Err(Error::DimensionMismatch { what: "checkpoint field lengths".into() });
        }
        m.beta = self.beta;
        for (n, row) in self.x0.iter().enumerate() {
            if row.len() != self.dim {
                return Err(Error::DimensionMismatch { what: format!("x0 row {n}") });
            }
            m.x0[n * self.dim..(n + 1) * self.dim].copy_from_slice(row);
        }
        for (b, bin) in self.v.iter().enumerate() {
            if bin.len() != self.num_nodes {
                return Err(Error::DimensionMismatch { what: format!("v bin {b}") });
            }
            for (n, row) in bin.iter().enumerate() {
                if row.len() != self.dim {
                    return Err(Error::DimensionMismatch { what: format!("v bin {b} node {n}") });
                }
                let base = (b * self.num_nodes + n) * self.dim;
                m.v[base..base + self.dim].copy_from_slice(row);
            }
        }
        if !m.beta.iter().chain(&m.x0).chain(&m.v).all(|x| x.is_finite()) {
            return Err(Error::NonFinite { what: "checkpoint parameters".into() });
        }
        Ok((m, self.prior))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;

    pub(crate) fn random_model(
        n: usize,
        dim: usize,
        bins: usize,
        seed: u64,
    ) -> ModelState {
        let mut rng = crate::rng::stream_rng(seed, 99);
        let mut m = ModelState::zeros(n, dim, bins, 1.0);
        for b in m.beta.iter_mut() {
            *b = rng.gen_range(-1.0..1.0);
        }
        for x in m.x0.iter_mut() {
            *x = rng.gen_range(-1.0..1.0);
        }
        for v in m.v.iter_mut() {
            *v = rng.gen_range(-2.0..2.0);
        }
        m
    }

    #[test]
    fn zero_velocity_position_is_static() {
        let mut m = ModelState::zeros(3, 2, 4, 1.0);
        m.x0 = vec![0.1, 0.2, -0.3, 0.4, 0.0, 1.0];
        for &t in &[0.0, 0.3, 0.77, 1.0] {
            let p = m.position(1, t).unwrap();
            assert_eq!(p, vec![-0.3, 0.4]);
        }
    }

    #[test]
    fn single_bin_linear_motion() {
        let mut m = ModelState::zeros(1, 2, 1, 1.0);
        m.v = vec![1.0, 0.0];
        let p = m.position(0, 0.5).unwrap();
        assert_relative_eq!(p[0], 0.5, max_relative = 1e-15);
        assert_eq!(p[1], 0.0);
    }

    #[test]
    fn two_bin_hand_computed_position() {
        // B = 2, width 0.5, v1 = (1,0), v2 = (-1,0), x0 = 0, t = 0.75.
        let mut m = ModelState::zeros(1, 2, 2, 1.0);
        m.v = vec![1.0, 0.0, -1.0, 0.0];
        let p = m.position(0, 0.75).unwrap();
        assert_relative_eq!(p[0], 0.25, max_relative = 1e-14);
        assert_eq!(p[1], 0.0);
    }

    #[test]
    fn position_continuous_at_bin_boundaries() {
        let m = random_model(4, 3, 7, 3);
        let width = m.bin_width();
        for node in 0..m.num_nodes {
            for b in 1..m.num_bins {
                let t = b as f64 * width;
                let left = m.position(node, t - 1e-13).unwrap();
                let right = m.position(node, t).unwrap();
                for d in 0..m.dim {
                    assert!(
                        (left[d] - right[d]).abs() < 1e-12,
                        "discontinuity at bin {b}: {left:?} vs {right:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn position_at_horizon_uses_last_bin_endpoint() {
        let m = random_model(2, 2, 5, 4);
        let p_end = m.position(0, 1.0).unwrap();
        let p_close = m.position(0, 1.0 - 1e-12).unwrap();
        for d in 0..m.dim {
            assert!((p_end[d] - p_close[d]).abs() < 1e-10);
        }
    }

    #[test]
    fn position_rejects_out_of_range_time() {
        let m = ModelState::zeros(1, 2, 2, 1.0);
        assert!(m.position(0, -0.1).is_err());
        assert!(m.position(0, 1.1).is_err());
    }

    #[test]
    fn intensity_examples_and_symmetry() {
        // Zero distance, zero bias -> 1.
        let m = ModelState::zeros(2, 2, 1, 1.0);
        assert_relative_eq!(m.intensity(0, 1, 0.3).unwrap(), 1.0);

        // Distance^2 = ln 2 -> 0.5.
        let mut m = ModelState::zeros(2, 1, 1, 1.0);
        m.x0 = vec![0.0, (2f64).ln().sqrt()];
        assert_relative_eq!(m.intensity(0, 1, 0.0).unwrap(), 0.5, max_relative = 1e-14);

        let m = random_model(5, 2, 3, 5);
        for &t in &[0.0, 0.4, 0.9] {
            assert_eq!(m.intensity(1, 3, t).unwrap(), m.intensity(3, 1, t).unwrap());
        }
    }

    #[test]
    fn intensity_matches_compositional_form() {
        let m = random_model(4, 2, 3, 6);
        for &t in &[0.1, 0.5, 0.99] {
            let ri = m.position(0, t).unwrap();
            let rj = m.position(2, t).unwrap();
            let d2: f64 = ri.iter().zip(&rj).map(|(a, b)| (a - b) * (a - b)).sum();
            let expected = (m.beta[0] + m.beta[2]).exp() * (-d2).exp();
            assert_relative_eq!(m.intensity(0, 2, t).unwrap(), expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn intensity_rejects_self_pair() {
        let m = ModelState::zeros(2, 2, 1, 1.0);
        assert!(m.intensity(1, 1, 0.5).is_err());
    }

    #[test]
    fn checkpoint_round_trips_bit_exactly() {
        let m = random_model(4, 2, 3, 7);
        let ck = Checkpoint::from_model(&m, None);
        let json = serde_json::to_string(&ck).unwrap();
        let back: Checkpoint = serde_json::from_str(&json).unwrap();
        let (m2, _) = back.into_model().unwrap();
        assert_eq!(m, m2);
    }
}
