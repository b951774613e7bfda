use super::{QueueModel, QueueParams, QueueStats};
use crate::error::{Error, Result};

/// Closed-form coefficient expression, evaluated term by term as printed.
#[derive(Clone, Copy, Debug, Default)]
pub struct AnalyticQueue;

impl QueueModel for AnalyticQueue {
    fn name(&self) -> &'static str {
        "analytic"
    }

    fn solve(&self, q: &QueueParams) -> Result<QueueStats> {
        mean_wait_analytic(q).map(QueueStats::exact)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Coefficients b_0..=b_capacity.
///
/// b_n = sum_{i=1..n} (-1)^i / i! (n-i)^i e^{(n-i) rho} rho^i for n >= 1 and
/// b_0 = 1 (the empty sum would make the capacity-one wait 0/0).
pub fn b_coefficients(capacity: usize, rho: f64) -> Vec<f64> {
    let mut b = Vec::with_capacity(capacity + 1);
    b.push(1.0);
    for n in 1..=capacity {
        let mut sum = 0.0;
        for i in 1..=n {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let gap = (n - i) as f64;
            sum += sign / factorial(i) * gap.powi(i as i32) * (gap * rho).exp() * rho.powi(i as i32);
        }
        b.push(sum);
    }
    b
}

/// (I - 1 - (sum_{i<I} b_i - I) / (rho b_{I-1})) / gamma
pub fn mean_wait_analytic(q: &QueueParams) -> Result<f64> {
    let cap = q.capacity;
    let rho = q.utilization();
    let b = b_coefficients(cap, rho);
    let last = b[cap - 1];
    if last == 0.0 || !last.is_finite() {
        return Err(Error::DegenerateFormula(format!(
            "b_{} = {last} at capacity {cap}, rho {rho}",
            cap - 1
        )));
    }
    let sum: f64 = b[..cap].iter().sum();
    let wait = (cap as f64 - 1.0 - (sum - cap as f64) / (rho * last)) / q.serving_rate_hz;
    if !wait.is_finite() {
        return Err(Error::DegenerateFormula(format!(
            "non-finite wait at capacity {cap}, rho {rho}"
        )));
    }
    Ok(wait)
}
