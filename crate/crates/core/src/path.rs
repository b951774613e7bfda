//! End-to-end fidelity of one repeater path.
//!
//! Each of the M equal-length edges is scored with [`edge_cost`]; the memory
//! dwell charged to an edge is the path's total time overhead (swapping plus
//! queueing). Edge fidelities are then folded with the Werner swap rule.

use serde::{Deserialize, Serialize};

use crate::channel::{edge_cost, FiberParams, MemoryParams, PureState};
use crate::error::{check_probability, Error, Result};
use crate::queue::{t_total_overhead, QueueModel, QueueParams};
use crate::swap::{SwapExponent, SwapSchedule};

/// Fidelity after swapping an accumulated link of fidelity `accum` with one
/// more link of fidelity `next`: F f + (1 - F)(1 - f) / 3.
pub fn compose_swap_fidelity(accum: f64, next: f64) -> f64 {
    accum * next + (1.0 - accum) * (1.0 - next) / 3.0
}

/// Left fold of [`compose_swap_fidelity`] starting from the first edge.
pub fn path_fidelity(edge_fidelities: &[f64]) -> Result<f64> {
    let (first, rest) = edge_fidelities
        .split_first()
        .ok_or_else(|| Error::InvalidConfig("a path needs at least one edge".into()))?;
    for &f in edge_fidelities {
        check_probability("edge fidelity", f)?;
    }
    Ok(rest
        .iter()
        .fold(*first, |acc, &f| compose_swap_fidelity(acc, f))
        .clamp(0.0, 1.0))
}

/// How the total time overhead is charged as memory dwell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DwellMode {
    /// Every edge's memory sees the full overhead.
    #[default]
    EveryEdge,
    /// Only the first edge's memory sees it; the others store for zero time.
    Once,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub total_length_km: f64,
    pub edge_count: usize,
    pub memory_units: usize,
    pub input_state: PureState,
}

impl PathConfig {
    pub fn new(total_length_km: f64, edge_count: usize, memory_units: usize) -> Result<Self> {
        if edge_count == 0 {
            return Err(Error::InvalidConfig("edge count must be >= 1".into()));
        }
        if memory_units == 0 {
            return Err(Error::InvalidConfig("memory units must be >= 1".into()));
        }
        if !(total_length_km > 0.0 && total_length_km.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "path length must be > 0, got {total_length_km}"
            )));
        }
        Ok(Self {
            total_length_km,
            edge_count,
            memory_units,
            input_state: PureState::zero(),
        })
    }

    pub fn with_state(mut self, state: PureState) -> Self {
        self.input_state = state;
        self
    }

    pub fn edge_length_km(&self) -> f64 {
        self.total_length_km / self.edge_count as f64
    }

    pub fn repeater_count(&self) -> usize {
        self.edge_count - 1
    }
}

/// Physical constants shared by every edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub attenuation_db_per_km: f64,
    pub light_speed_m_per_s: f64,
    pub memory_time_constant_s: f64,
    pub swap_exponent: SwapExponent,
    pub dwell: DwellMode,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            attenuation_db_per_km: 0.2,
            light_speed_m_per_s: 2e8,
            memory_time_constant_s: 1e-3,
            swap_exponent: SwapExponent::Doubling,
            dwell: DwellMode::EveryEdge,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathReport {
    pub edge_costs: Vec<f64>,
    pub path_fidelity: f64,
    pub path_cost: f64,
    pub t_swap_s: f64,
    pub t_queue_s: f64,
    pub t_total_s: f64,
}

/// Scores a path whose repeaters queue according to `q` (capacity is taken
/// from `pc.memory_units`).
pub fn evaluate_path(
    pc: &PathConfig,
    q: &QueueParams,
    cp: &ChannelParams,
    backend: &dyn QueueModel,
) -> Result<PathReport> {
    let queue = QueueParams::new(q.arrival_rate_hz, q.serving_rate_hz, pc.memory_units)?;
    let t_queue_s = backend.mean_wait(&queue)?;
    let schedule = SwapSchedule::for_path(pc.edge_length_km(), cp.light_speed_m_per_s, pc.edge_count)?
        .with_exponent(cp.swap_exponent);
    let t_swap_s = schedule.total_time();
    let t_total_s = t_total_overhead(t_swap_s, t_queue_s)?;

    let fiber = FiberParams::new(cp.attenuation_db_per_km, pc.edge_length_km())?;
    let stored = MemoryParams::new(t_total_s, cp.memory_time_constant_s)?;
    let idle = MemoryParams::new(0.0, cp.memory_time_constant_s)?;

    let mut edge_costs = Vec::with_capacity(pc.edge_count);
    for m in 0..pc.edge_count {
        let memory = match cp.dwell {
            DwellMode::EveryEdge => &stored,
            DwellMode::Once if m == 0 => &stored,
            DwellMode::Once => &idle,
        };
        edge_costs.push(edge_cost(&pc.input_state, &fiber, memory)?);
    }
    let fidelities: Vec<f64> = edge_costs.iter().map(|c| 1.0 - c).collect();
    let path_fidelity = path_fidelity(&fidelities)?;

    Ok(PathReport {
        edge_costs,
        path_fidelity,
        path_cost: 1.0 - path_fidelity,
        t_swap_s,
        t_queue_s,
        t_total_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::queue::MarkovQueue;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn compose_examples() {
        assert_eq!(compose_swap_fidelity(1.0, 1.0), 1.0);
        for f in [0.0, 0.3, 0.77, 1.0] {
            assert_abs_diff_eq!(compose_swap_fidelity(f, 1.0), f, epsilon = 1e-15);
            assert_abs_diff_eq!(compose_swap_fidelity(0.25, f), 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn fold_examples() {
        assert_eq!(path_fidelity(&[1.0; 4]).unwrap(), 1.0);
        assert_abs_diff_eq!(path_fidelity(&[0.9, 0.9]).unwrap(), 0.81 + 0.01 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(path_fidelity(&[0.9, 0.9]).unwrap(), 0.813333, epsilon = 1e-6);
        let two = 0.81 + 0.01 / 3.0;
        assert_abs_diff_eq!(
            path_fidelity(&[0.9, 0.9, 0.9]).unwrap(),
            two * 0.9 + (1.0 - two) * 0.1 / 3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(path_fidelity(&[0.9, 0.9, 0.9]).unwrap(), 0.738222, epsilon = 1e-6);
        assert!(path_fidelity(&[]).is_err());
        assert!(path_fidelity(&[0.5, 1.5]).is_err());
    }

    #[test]
    fn single_edge_path_is_edge_fidelity() {
        let pc = PathConfig::new(80.0, 1, 3).unwrap();
        let q = QueueParams::new(1.0, 1e6, 3).unwrap();
        let cp = ChannelParams::default();
        let r = evaluate_path(&pc, &q, &cp, &MarkovQueue).unwrap();
        assert_eq!(r.t_swap_s, 0.0);
        assert_eq!(r.edge_costs.len(), 1);
        assert_abs_diff_eq!(r.path_fidelity, 1.0 - r.edge_costs[0], epsilon = 1e-15);
    }

    #[test]
    fn end_to_end_matches_hand_pipeline() {
        // L=80 km, M=4, I=1, lambda=0.2 MHz, gamma=0.025 MHz, T=1 ms, |0>.
        let pc = PathConfig::new(80.0, 4, 1).unwrap();
        let q = QueueParams::new(2e5, 2.5e4, 1).unwrap();
        let cp = ChannelParams::default();
        let r = evaluate_path(&pc, &q, &cp, &MarkovQueue).unwrap();

        // Recomputed from the closed forms of the constituent stages.
        let t_swap = 3.0 * 20e3 / 2e8;
        let p_fib = 1.0 - 10f64.powf(-0.2 * 20.0 / 10.0);
        let p_mem = 1.0 - (-t_swap / 1e-3f64).exp();
        let after_fiber = 1.0 - 0.5 * p_fib;
        let edge_f = (1.0 - p_mem) * after_fiber + p_mem * (1.0 - after_fiber);
        let mut fold = edge_f;
        for _ in 1..4 {
            fold = fold * edge_f + (1.0 - fold) * (1.0 - edge_f) / 3.0;
        }
        assert_eq!(r.t_queue_s, 0.0);
        assert_abs_diff_eq!(r.t_swap_s, t_swap, epsilon = 1e-18);
        assert_abs_diff_eq!(r.t_total_s, t_swap, epsilon = 1e-18);
        for c in &r.edge_costs {
            assert_abs_diff_eq!(*c, 1.0 - edge_f, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(r.path_fidelity, fold, epsilon = 1e-12);
        assert_abs_diff_eq!(r.path_cost + r.path_fidelity, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dwell_once_is_never_worse() {
        let q = QueueParams::new(2e5, 2.5e4, 5).unwrap();
        let pc = PathConfig::new(80.0, 8, 5).unwrap();
        let every = evaluate_path(&pc, &q, &ChannelParams::default(), &MarkovQueue).unwrap();
        let once = evaluate_path(
            &pc,
            &q,
            &ChannelParams {
                dwell: DwellMode::Once,
                ..ChannelParams::default()
            },
            &MarkovQueue,
        )
        .unwrap();
        assert!(once.path_fidelity >= every.path_fidelity);
        assert!(once.edge_costs[1..].iter().all(|&c| c == once.edge_costs[1]));
        assert!(once.edge_costs[1] < once.edge_costs[0]);
    }

    #[test]
    fn fidelity_falls_with_memory_units() {
        let cp = ChannelParams::default();
        for l in [80.0, 120.0] {
            for m in [2, 4, 8] {
                let mut prev = 2.0;
                for i in [1, 3, 5, 7, 9] {
                    let pc = PathConfig::new(l, m, i).unwrap();
                    let q = QueueParams::new(2e5, 2.5e4, i).unwrap();
                    let f = evaluate_path(&pc, &q, &cp, &MarkovQueue).unwrap().path_fidelity;
                    assert!(f <= prev);
                    prev = f;
                }
            }
        }
    }

    proptest! {
        #[test]
        fn fold_decreases_toward_quarter(f in 0.2500001f64..0.9999999, n in 1usize..30) {
            let shorter = path_fidelity(&vec![f; n]).unwrap();
            let longer = path_fidelity(&vec![f; n + 1]).unwrap();
            prop_assert!(longer <= shorter);
            if shorter - 0.25 > 1e-12 {
                prop_assert!(longer < shorter);
            }
            prop_assert!(longer >= 0.25 - 1e-15);
        }

        #[test]
        fn quarter_is_a_fixed_point(f in 0.0f64..=1.0) {
            prop_assert!((compose_swap_fidelity(0.25, f) - 0.25).abs() <= 1e-12);
        }
    }
}
