use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use super::{QueueModel, QueueParams, QueueStats};
use crate::error::{Error, Result};

const BATCHES: usize = 50;

/// Discrete-event simulation backend.
#[derive(Clone, Copy, Debug)]
pub struct DesQueue {
    pub served_target: u64,
    pub seed: u64,
}

impl QueueModel for DesQueue {
    fn name(&self) -> &'static str {
        "des"
    }

    fn solve(&self, q: &QueueParams) -> Result<QueueStats> {
        simulate_queue(q, self.served_target, self.seed)
    }
}

/// Simulates FCFS Poisson arrivals into `capacity` positions with
/// deterministic service; arrivals that find every position occupied are
/// dropped.
///
/// Runs until `served_target` customers have been accepted after a warm-up
/// of `served_target / 100` customers. The standard error of the mean wait
/// comes from non-overlapping batch means.
pub fn simulate_queue(q: &QueueParams, served_target: u64, seed: u64) -> Result<QueueStats> {
    if served_target < 10_000 {
        return Err(Error::InvalidInput(format!(
            "served_target must be >= 10000, got {served_target}"
        )));
    }
    let cap = q.capacity;
    let service = q.service_time();
    let inter_arrival = Exp::new(q.arrival_rate_hz)
        .map_err(|e| Error::InvalidInput(format!("arrival rate: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let warmup = served_target / 100;
    let batch_len = served_target / BATCHES as u64;

    // Departure times of customers currently in the system, in FCFS order.
    let mut departures: VecDeque<f64> = VecDeque::with_capacity(cap);
    let mut now = 0.0f64;
    let mut last_change = 0.0f64;
    let mut occupancy_time = vec![0.0f64; cap + 1];
    let mut measuring = warmup == 0;
    let mut measure_start = 0.0;
    let mut warm_accepted: u64 = 0;

    let mut accepted: u64 = 0;
    let mut arrivals: u64 = 0;
    let mut dropped: u64 = 0;
    let mut wait_sum = 0.0;
    let mut batch_sum = 0.0;
    let mut batch_means: Vec<f64> = Vec::with_capacity(BATCHES + 1);

    while accepted < served_target {
        now += inter_arrival.sample(&mut rng);

        while let Some(&done) = departures.front() {
            if done > now {
                break;
            }
            if measuring {
                occupancy_time[departures.len()] += done - last_change;
            }
            last_change = done;
            departures.pop_front();
        }
        if measuring {
            occupancy_time[departures.len()] += now - last_change;
        }
        last_change = now;

        if measuring {
            arrivals += 1;
        }
        if departures.len() == cap {
            if measuring {
                dropped += 1;
            }
            continue;
        }
        let start = departures.back().map_or(now, |&d| d.max(now));
        departures.push_back(start + service);
        let wait = start - now;

        if measuring {
            accepted += 1;
            wait_sum += wait;
            batch_sum += wait;
            if accepted.is_multiple_of(batch_len) {
                batch_means.push(batch_sum / batch_len as f64);
                batch_sum = 0.0;
            }
        } else {
            warm_accepted += 1;
            if warm_accepted >= warmup {
                measuring = true;
                measure_start = now;
            }
        }
    }

    let span = last_change - measure_start;
    let stationary_distribution: Vec<f64> = if span > 0.0 {
        occupancy_time.iter().map(|t| t / span).collect()
    } else {
        let mut v = vec![0.0; cap + 1];
        v[0] = 1.0;
        v
    };
    let mean_number = stationary_distribution
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum();

    let mean_wait = wait_sum / accepted as f64;
    let stderr = batch_stderr(&batch_means);

    Ok(QueueStats {
        mean_wait_s: mean_wait,
        mean_number_in_system: Some(mean_number),
        blocking_probability: Some(dropped as f64 / arrivals as f64),
        stationary_distribution,
        stderr_s: stderr,
        served: accepted,
    })
}

fn batch_stderr(means: &[f64]) -> f64 {
    let n = means.len();
    if n < 2 {
        return 0.0;
    }
    let mean = means.iter().sum::<f64>() / n as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Combines independent replications, weighting each by customers served.
pub fn merge_replications(reps: &[QueueStats]) -> Option<QueueStats> {
    let total: u64 = reps.iter().map(|r| r.served).sum();
    if total == 0 {
        return None;
    }
    let w = |r: &QueueStats| r.served as f64 / total as f64;
    let mean_wait_s = reps.iter().map(|r| w(r) * r.mean_wait_s).sum();
    let stderr_s = reps
        .iter()
        .map(|r| (w(r) * r.stderr_s).powi(2))
        .sum::<f64>()
        .sqrt();
    let avg_opt = |f: fn(&QueueStats) -> Option<f64>| -> Option<f64> {
        reps.iter().map(|r| f(r).map(|v| w(r) * v)).sum()
    };
    let len = reps.iter().map(|r| r.stationary_distribution.len()).max().unwrap_or(0);
    let mut dist = vec![0.0; len];
    for r in reps {
        for (slot, p) in dist.iter_mut().zip(&r.stationary_distribution) {
            *slot += w(r) * p;
        }
    }
    Some(QueueStats {
        mean_wait_s,
        mean_number_in_system: avg_opt(|r| r.mean_number_in_system),
        blocking_probability: avg_opt(|r| r.blocking_probability),
        stationary_distribution: dist,
        stderr_s,
        served: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_tiny_runs() {
        let q = QueueParams::new(1.0, 2.0, 3).unwrap();
        assert!(simulate_queue(&q, 100, 1).is_err());
    }

    #[test]
    fn reproducible_per_seed() {
        let q = QueueParams::new(2e5, 1e5, 5).unwrap();
        let a = simulate_queue(&q, 20_000, 7).unwrap();
        let b = simulate_queue(&q, 20_000, 7).unwrap();
        assert_eq!(a, b);
        let c = simulate_queue(&q, 20_000, 8).unwrap();
        assert_ne!(a.mean_wait_s, c.mean_wait_s);
    }

    #[test]
    fn fast_server_means_no_wait() {
        let q = QueueParams::new(1.0, 1e9, 5).unwrap();
        let s = simulate_queue(&q, 20_000, 3).unwrap();
        assert!(s.mean_wait_s < 1e-12);
        assert_eq!(s.blocking_probability, Some(0.0));
    }

    #[test]
    fn single_position_never_waits() {
        let q = QueueParams::new(2e5, 1e5, 1).unwrap();
        let s = simulate_queue(&q, 20_000, 3).unwrap();
        assert_eq!(s.mean_wait_s, 0.0);
        assert!(s.blocking_probability.unwrap() > 0.0);
    }

    #[test]
    fn overload_saturates() {
        let q = QueueParams::new(2e5, 1e5, 5).unwrap();
        let s = simulate_queue(&q, 100_000, 11).unwrap();
        assert!(s.blocking_probability.unwrap() >= 0.5);
        assert!(s.mean_wait_s <= q.max_wait());
        assert!(s.mean_wait_s > 0.8 * q.max_wait());
        let total: f64 = s.stationary_distribution.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn merged_replications_weight_by_served() {
        let q = QueueParams::new(5e4, 1e5, 3).unwrap();
        let reps: Vec<_> = (0..3).map(|s| simulate_queue(&q, 10_000, s).unwrap()).collect();
        let m = merge_replications(&reps).unwrap();
        let plain = reps.iter().map(|r| r.mean_wait_s).sum::<f64>() / 3.0;
        assert!((m.mean_wait_s - plain).abs() < 1e-15 * plain.max(1.0));
        assert_eq!(m.served, 30_000);
        assert!(merge_replications(&[]).is_none());
    }
}
