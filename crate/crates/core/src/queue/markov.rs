use nalgebra::{DMatrix, DVector};

use super::{QueueModel, QueueParams, QueueStats};
use crate::error::{Error, Result};

/// Embedded-chain solver for M/D/1/I.
#[derive(Clone, Copy, Debug, Default)]
pub struct MarkovQueue;

impl QueueModel for MarkovQueue {
    fn name(&self) -> &'static str {
        "markov"
    }

    fn solve(&self, q: &QueueParams) -> Result<QueueStats> {
        mean_wait_markov(q)
    }
}

/// Poisson probabilities of k arrivals during one service, k = 0..n.
fn arrival_counts(rho: f64, n: usize) -> Vec<f64> {
    let mut a = Vec::with_capacity(n);
    let mut term = (-rho).exp();
    for k in 0..n {
        if k > 0 {
            term *= rho / k as f64;
        }
        a.push(term);
    }
    a
}

/// Stationary distribution of the number left behind at departure epochs,
/// over states 0..capacity-1.
fn departure_distribution(capacity: usize, rho: f64) -> Result<Vec<f64>> {
    let n = capacity;
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let a = arrival_counts(rho, n);
    let mut p = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        // A departure leaving 0 behind waits for the next arrival, which then
        // behaves like a departure leaving 1.
        let base = i.saturating_sub(1);
        let mut mass = 0.0;
        for j in base..n - 1 {
            p[(i, j)] = a[j - base];
            mass += a[j - base];
        }
        // Arrivals beyond the buffer are lost; fold the Poisson tail into
        // the full state.
        p[(i, n - 1)] = (1.0 - mass).max(0.0);
    }

    // pi (P - I) = 0 with the last balance equation replaced by sum(pi) = 1.
    let mut system = p.transpose() - DMatrix::<f64>::identity(n, n);
    for c in 0..n {
        system[(n - 1, c)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(n);
    rhs[n - 1] = 1.0;
    let pi = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular embedded-chain system".into()))?;
    if pi.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite stationary distribution".into()));
    }
    let mut pi: Vec<f64> = pi.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|v| *v /= total);
    Ok(pi)
}

/// Mean wait of accepted customers from the embedded Markov chain.
///
/// Departure-epoch probabilities d_n (n < I) map to time-stationary ones as
/// p_n = d_n / (d_0 + rho) and p_I = 1 - 1 / (d_0 + rho); the wait follows
/// from Little's law on the queue with the accepted arrival rate.
pub fn mean_wait_markov(q: &QueueParams) -> Result<QueueStats> {
    let rho = q.utilization();
    let cap = q.capacity;
    let d = departure_distribution(cap, rho)?;
    let norm = d[0] + rho;

    let mut dist: Vec<f64> = d.iter().map(|v| v / norm).collect();
    let blocking = (1.0 - 1.0 / norm).clamp(0.0, 1.0);
    dist.push(blocking);

    let in_system: f64 = dist.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    let busy = 1.0 - dist[0];
    let in_queue = (in_system - busy).max(0.0);
    let accepted_rate = q.arrival_rate_hz * (1.0 - blocking);
    let wait = if cap == 1 || in_queue == 0.0 {
        0.0
    } else {
        in_queue / accepted_rate
    };

    Ok(QueueStats {
        mean_wait_s: wait.min(q.max_wait()),
        mean_number_in_system: Some(in_system),
        blocking_probability: Some(blocking),
        stationary_distribution: dist,
        stderr_s: 0.0,
        served: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(l: f64, g: f64, cap: usize) -> QueueParams {
        QueueParams::new(l, g, cap).unwrap()
    }

    #[test]
    fn single_position_has_no_wait() {
        for (l, g) in [(2e5, 1e5), (5e4, 4.41e6), (1.2e6, 2e4)] {
            let s = mean_wait_markov(&params(l, g, 1)).unwrap();
            assert_eq!(s.mean_wait_s, 0.0);
            let rho = l / g;
            // M/G/1/1 is an Erlang loss system: blocking rho / (1 + rho).
            assert_abs_diff_eq!(s.blocking_probability.unwrap(), rho / (1.0 + rho), epsilon = 1e-12);
            assert!(s.blocking_probability.unwrap() > 0.0);
        }
    }

    #[test]
    fn empty_system_limit() {
        let q = params(1.0, 1e6, 5);
        let s = mean_wait_markov(&q).unwrap();
        assert!(s.mean_wait_s <= 1e-6 * q.utilization());
    }

    #[test]
    fn capacity_two_closed_form() {
        // With one waiting slot, an accepted arrival waits iff the server is
        // busy: the residual of a deterministic service, averaged over busy
        // arrivals that are accepted. Derived by hand from the two-state chain:
        // d_0 = e^-rho, d_1 = 1 - e^-rho.
        let (l, g) = (2e5, 1e5);
        let rho: f64 = l / g;
        let d0 = (-rho).exp();
        let norm = d0 + rho;
        let p0 = d0 / norm;
        let p1 = (1.0 - d0) / norm;
        let p2 = 1.0 - 1.0 / norm;
        let lq = p2;
        let w = lq / (l * (1.0 - p2));
        let s = mean_wait_markov(&params(l, g, 2)).unwrap();
        assert_abs_diff_eq!(s.stationary_distribution[0], p0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.stationary_distribution[1], p1, epsilon = 1e-12);
        assert_abs_diff_eq!(s.mean_wait_s, w, epsilon = 1e-15);
    }

    #[test]
    fn distribution_is_normalized_and_wait_bounded() {
        for &l in &[5e4, 2e5, 5e5, 1.2e6] {
            for &g in &[2e4, 2.5e4, 5e4, 1e5, 4.41e6] {
                let mut prev = 0.0;
                for cap in 1..=12 {
                    let q = params(l, g, cap);
                    let s = mean_wait_markov(&q).unwrap();
                    let total: f64 = s.stationary_distribution.iter().sum();
                    assert!((total - 1.0).abs() < 1e-9);
                    assert!(s.stationary_distribution.iter().all(|&p| p >= 0.0));
                    let n = s.mean_number_in_system.unwrap();
                    assert!((0.0..=cap as f64).contains(&n));
                    assert!(s.mean_wait_s <= q.max_wait() * (1.0 + 1e-12));
                    assert!(s.mean_wait_s >= prev, "wait not monotone at l={l} g={g} cap={cap}");
                    prev = s.mean_wait_s;
                }
            }
        }
    }

    #[test]
    fn deep_overload_saturates() {
        let q = params(1.2e6, 2e4, 9);
        let s = mean_wait_markov(&q).unwrap();
        assert!(s.blocking_probability.unwrap() > 0.9);
        assert!((q.max_wait() - s.mean_wait_s) / q.max_wait() < 0.05);
    }
}
