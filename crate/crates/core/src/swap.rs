//! Entanglement-swapping latency along a path of equal-length edges.
//!
//! Swaps run level by level over a balanced tree: at iteration j the pairs
//! being joined span 2^(j-1) edges, so the classical signalling delay of that
//! level is 2^(j-1) l / c.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent convention for the per-level signalling delay.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwapExponent {
    /// Level j costs 2^(j-1) l / c.
    #[default]
    Doubling,
    /// Level j costs 2^j l / c. Kept for comparison with the alternate form
    /// used inside the optimization objective.
    Compat,
}

/// Number of swap levels needed to join `edge_count` edges: ceil(log2 M).
pub fn swap_iterations(edge_count: usize) -> Result<u32> {
    if edge_count == 0 {
        return Err(Error::InvalidConfig("a path needs at least one edge".into()));
    }
    Ok(edge_count.next_power_of_two().trailing_zeros())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwapSchedule {
    pub edge_length_km: f64,
    pub light_speed_m_per_s: f64,
    pub iterations: u32,
    pub edge_count: usize,
    #[serde(default)]
    pub exponent: SwapExponent,
}

impl SwapSchedule {
    /// Schedule for `edge_count` edges of `edge_length_km` each, with the
    /// iteration count derived from the edge count.
    pub fn for_path(edge_length_km: f64, light_speed_m_per_s: f64, edge_count: usize) -> Result<Self> {
        if !(light_speed_m_per_s > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "light speed must be > 0, got {light_speed_m_per_s}"
            )));
        }
        if !(edge_length_km >= 0.0 && edge_length_km.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "edge length must be >= 0, got {edge_length_km}"
            )));
        }
        Ok(Self {
            edge_length_km,
            light_speed_m_per_s,
            iterations: swap_iterations(edge_count)?,
            edge_count,
            exponent: SwapExponent::Doubling,
        })
    }

    pub fn with_exponent(mut self, exponent: SwapExponent) -> Self {
        self.exponent = exponent;
        self
    }

    /// One-edge signalling delay l / c in seconds.
    pub fn hop_time(&self) -> f64 {
        self.edge_length_km * 1e3 / self.light_speed_m_per_s
    }

    /// Total swapping delay in seconds, in closed form.
    pub fn total_time(&self) -> f64 {
        let levels = 2f64.powi(self.iterations as i32) - 1.0;
        let factor = match self.exponent {
            SwapExponent::Doubling => levels,
            SwapExponent::Compat => 2.0 * levels,
        };
        factor * self.hop_time()
    }
}

pub fn t_swap(schedule: &SwapSchedule) -> f64 {
    schedule.total_time()
}
