//! Waiting time in repeater memory under a finite-capacity M/D/1/I queue.
//!
//! Three interchangeable backends sit behind [`QueueModel`]:
//!
//! * `markov` - departure-epoch embedded Markov chain, converted to
//!   time-stationary probabilities; the default everywhere downstream.
//! * `analytic` - the closed-form coefficient expression, evaluated exactly
//!   as written. It is degenerate for some capacities and is kept for
//!   comparison only.
//! * `des` - seeded discrete-event simulation, the independent oracle.

mod analytic;
mod des;
mod markov;

pub use analytic::{b_coefficients, mean_wait_analytic, AnalyticQueue};
pub use des::{merge_replications, simulate_queue, DesQueue};
pub use markov::{mean_wait_markov, MarkovQueue};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::registry::Registry;

/// Poisson arrivals at `arrival_rate_hz`, deterministic service of length
/// 1/`serving_rate_hz`, and `capacity` positions including the one in service.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueueParams {
    pub arrival_rate_hz: f64,
    pub serving_rate_hz: f64,
    pub capacity: usize,
}

impl QueueParams {
    pub fn new(arrival_rate_hz: f64, serving_rate_hz: f64, capacity: usize) -> Result<Self> {
        if !(arrival_rate_hz > 0.0 && arrival_rate_hz.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "arrival rate must be > 0, got {arrival_rate_hz}"
            )));
        }
        if !(serving_rate_hz > 0.0 && serving_rate_hz.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "serving rate must be > 0, got {serving_rate_hz}"
            )));
        }
        if capacity == 0 {
            return Err(Error::InvalidConfig("queue capacity must be >= 1".into()));
        }
        Ok(Self {
            arrival_rate_hz,
            serving_rate_hz,
            capacity,
        })
    }

    /// lambda / gamma
    pub fn utilization(&self) -> f64 {
        self.arrival_rate_hz / self.serving_rate_hz
    }

    pub fn service_time(&self) -> f64 {
        1.0 / self.serving_rate_hz
    }

    /// Upper bound on any accepted customer's wait: a full buffer ahead of it.
    pub fn max_wait(&self) -> f64 {
        (self.capacity - 1) as f64 * self.service_time()
    }
}

/// Output of a queue backend. Fields a backend cannot provide are `None` or
/// empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueueStats {
    /// Mean time an accepted customer spends waiting before service, seconds.
    pub mean_wait_s: f64,
    pub mean_number_in_system: Option<f64>,
    pub blocking_probability: Option<f64>,
    /// Time-stationary probability of 0..=capacity customers in the system.
    pub stationary_distribution: Vec<f64>,
    /// Standard error of `mean_wait_s`; zero for deterministic backends.
    pub stderr_s: f64,
    /// Accepted customers observed (simulation only).
    pub served: u64,
}

impl QueueStats {
    pub(crate) fn exact(mean_wait_s: f64) -> Self {
        Self {
            mean_wait_s,
            mean_number_in_system: None,
            blocking_probability: None,
            stationary_distribution: Vec::new(),
            stderr_s: 0.0,
            served: 0,
        }
    }
}

/// A method of computing queue statistics.
pub trait QueueModel: Send + Sync {
    fn name(&self) -> &'static str;

    fn solve(&self, q: &QueueParams) -> Result<QueueStats>;

    fn mean_wait(&self, q: &QueueParams) -> Result<f64> {
        self.solve(q).map(|s| s.mean_wait_s)
    }
}

/// Knobs consumed by the simulation backend; deterministic backends ignore them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueOptions {
    pub served_target: u64,
    pub seed: u64,
}

impl Default for QueueOptions {
    fn default() -> Self {
        Self {
            served_target: 1_000_000,
            seed: 0x5eed,
        }
    }
}

pub type QueueFactory = fn(&QueueOptions) -> Box<dyn QueueModel>;

/// All built-in queue backends, keyed by name.
pub fn queue_backends() -> Registry<QueueFactory> {
    let mut reg: Registry<QueueFactory> = Registry::new("queue backend");
    reg.register("markov", |_| Box::new(MarkovQueue))
        .register("analytic", |_| Box::new(AnalyticQueue))
        .register("des", |o| {
            Box::new(DesQueue {
                served_target: o.served_target,
                seed: o.seed,
            })
        });
    reg
}

pub fn queue_backend(name: &str, options: &QueueOptions) -> Result<Box<dyn QueueModel>> {
    Ok((queue_backends().get(name)?)(options))
}

/// t_w = t_swap + t_queue
pub fn t_total_overhead(t_swap: f64, t_queue: f64) -> Result<f64> {
    if !(t_swap >= 0.0) || !(t_queue >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "time overheads must be >= 0 (swap {t_swap}, queue {t_queue})"
        )));
    }
    Ok(t_swap + t_queue)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(QueueParams::new(0.0, 1.0, 1).is_err());
        assert!(QueueParams::new(1.0, -1.0, 1).is_err());
        assert!(QueueParams::new(1.0, 1.0, 0).is_err());
        // Overload is allowed because capacity is finite.
        let q = QueueParams::new(2e5, 1e5, 5).unwrap();
        assert_eq!(q.utilization(), 2.0);
        assert_eq!(q.max_wait(), 4e-5);
    }

    #[test]
    fn registry_resolves_every_backend() {
        let reg = queue_backends();
        assert_eq!(reg.names(), vec!["markov", "analytic", "des"]);
        let opts = QueueOptions::default();
        for name in reg.names() {
            assert_eq!(queue_backend(name, &opts).unwrap().name(), name);
        }
        assert!(queue_backend("mm1", &opts).is_err());
    }

    #[test]
    fn total_overhead() {
        assert_eq!(t_total_overhead(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(t_total_overhead(3.5e-4, 0.0).unwrap(), 3.5e-4);
        let q = QueueParams::new(2e5, 1e5, 5).unwrap();
        let wq = mean_wait_markov(&q).unwrap().mean_wait_s;
        assert_eq!(t_total_overhead(3.5e-4, wq).unwrap(), 3.5e-4 + wq);
        assert!(t_total_overhead(-1.0, 0.0).is_err());
    }
}
