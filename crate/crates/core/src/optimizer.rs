//! Accuracy-weighted logical qubit rate and its exhaustive maximization.
//!
//! For a configuration (M edges per path, K paths, I memory units) the raw
//! rate is 1 / t_total and the objective is raw rate x (1 - P_logical), where
//! P_logical is the exact repetition-code failure probability with every path
//! carrying the same flip probability.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::{decoder, flip_mapping, flip_probability_from_fidelity, logical_error_exact, CodeConfig};
use crate::error::{Error, Result};
use crate::path::{evaluate_path, ChannelParams, PathConfig};
use crate::queue::{queue_backend, QueueOptions, QueueParams};

/// Reciprocal of the total time overhead.
pub fn raw_rate(t_total_s: f64) -> Result<f64> {
    if t_total_s == 0.0 {
        return Err(Error::InfiniteRate);
    }
    if !(t_total_s > 0.0) {
        return Err(Error::InvalidInput(format!(
            "time overhead must be > 0, got {t_total_s}"
        )));
    }
    Ok(1.0 / t_total_s)
}

/// Which per-path constraint decides feasibility.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    /// Path fidelity must reach the threshold.
    #[default]
    FidelityAtLeast,
    /// Path cost must exceed the threshold (the objective's constraint read
    /// literally).
    CostAbove,
}

impl Constraint {
    pub fn admits(&self, path_fidelity: f64, threshold: f64) -> bool {
        match self {
            Constraint::FidelityAtLeast => path_fidelity >= threshold,
            Constraint::CostAbove => 1.0 - path_fidelity > threshold,
        }
    }
}

/// Everything held fixed while the grid varies (M, K, I).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub total_length_km: f64,
    pub arrival_rate_hz: f64,
    pub serving_rate_hz: f64,
    pub channel: ChannelParams,
    pub decoder: String,
    pub mapping: String,
    pub queue_backend: String,
    pub queue_options: QueueOptions,
    pub threshold: f64,
    pub constraint: Constraint,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            total_length_km: 80.0,
            arrival_rate_hz: 2e5,
            serving_rate_hz: 2.5e4,
            channel: ChannelParams::default(),
            decoder: "lut".into(),
            mapping: "werner".into(),
            queue_backend: "markov".into(),
            queue_options: QueueOptions::default(),
            threshold: 0.5,
            constraint: Constraint::FidelityAtLeast,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GridPoint {
    pub edge_count: usize,
    pub k: usize,
    pub memory_units: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigRow {
    pub point: GridPoint,
    pub t_swap_s: f64,
    pub t_queue_s: f64,
    pub t_total_s: f64,
    pub path_fidelity: f64,
    pub flip_probability: f64,
    pub logical_error: f64,
    pub accuracy: f64,
    pub raw_rate_hz: f64,
    pub objective_hz: f64,
    pub feasible: bool,
}

/// Scores one grid point.
pub fn evaluate_config(scenario: &Scenario, point: GridPoint) -> Result<ConfigRow> {
    let pc = PathConfig::new(scenario.total_length_km, point.edge_count, point.memory_units)?;
    let q = QueueParams::new(scenario.arrival_rate_hz, scenario.serving_rate_hz, point.memory_units)?;
    let backend = queue_backend(&scenario.queue_backend, &scenario.queue_options)?;
    let report = evaluate_path(&pc, &q, &scenario.channel, backend.as_ref())?;

    let mapping = flip_mapping(&scenario.mapping)?;
    let flip = flip_probability_from_fidelity(report.path_fidelity, mapping.as_ref())?;
    let code = CodeConfig::uniform(point.k, flip)?;
    let dec = decoder(&scenario.decoder, &code)?;
    let logical_error = logical_error_exact(&code, dec.as_ref())?;
    let accuracy = 1.0 - logical_error;
    let rate = raw_rate(report.t_total_s)?;

    Ok(ConfigRow {
        point,
        t_swap_s: report.t_swap_s,
        t_queue_s: report.t_queue_s,
        t_total_s: report.t_total_s,
        path_fidelity: report.path_fidelity,
        flip_probability: flip,
        logical_error,
        accuracy,
        raw_rate_hz: rate,
        objective_hz: rate * accuracy,
        feasible: scenario.constraint.admits(report.path_fidelity, scenario.threshold),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub edge_counts: Vec<usize>,
    pub k_values: Vec<usize>,
    pub memory_units: Vec<usize>,
    pub scenario: Scenario,
}

impl SearchSpace {
    /// Grid points in lexicographic (M, K, I) order.
    pub fn points(&self) -> Vec<GridPoint> {
        let mut pts = Vec::new();
        for &edge_count in &self.edge_counts {
            for &k in &self.k_values {
                for &memory_units in &self.memory_units {
                    pts.push(GridPoint {
                        edge_count,
                        k,
                        memory_units,
                    });
                }
            }
        }
        pts
    }

    fn validate(&self) -> Result<()> {
        if self.edge_counts.is_empty() || self.k_values.is_empty() || self.memory_units.is_empty() {
            return Err(Error::InvalidConfig("search space has an empty axis".into()));
        }
        if !(0.0..=1.0).contains(&self.scenario.threshold) {
            return Err(Error::InvalidConfig(format!(
                "threshold {} outside [0, 1]",
                self.scenario.threshold
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best: ConfigRow,
    pub feasible_count: usize,
    pub table: Vec<ConfigRow>,
}

/// Higher objective wins; equal objectives go to the smaller grid point.
fn better(a: &ConfigRow, b: &ConfigRow) -> Ordering {
    a.objective_hz
        .total_cmp(&b.objective_hz)
        .then_with(|| b.point.cmp(&a.point))
}

/// Best row among `rows` regardless of feasibility.
pub fn argmax(rows: &[ConfigRow]) -> Option<&ConfigRow> {
    rows.iter().max_by(|a, b| better(a, b))
}

/// Evaluates every grid point, rows in lexicographic order.
pub fn evaluate_grid(space: &SearchSpace) -> Result<Vec<ConfigRow>> {
    space.validate()?;
    space
        .points()
        .into_par_iter()
        .map(|p| evaluate_config(&space.scenario, p))
        .collect()
}

/// Picks the feasible argmax from an evaluated table.
pub fn select_best(table: Vec<ConfigRow>) -> Result<OptimizationResult> {
    let feasible: Vec<&ConfigRow> = table.iter().filter(|r| r.feasible).collect();
    let best = feasible.iter().copied().max_by(|a, b| better(a, b)).cloned();
    match best {
        Some(best) => Ok(OptimizationResult {
            best,
            feasible_count: feasible.len(),
            table,
        }),
        None => {
            let top = argmax(&table)
                .ok_or_else(|| Error::InvalidConfig("empty evaluation table".into()))?;
            Err(Error::Infeasible {
                m: top.point.edge_count,
                k: top.point.k,
                i: top.point.memory_units,
                objective: top.objective_hz,
            })
        }
    }
}

pub fn grid_search(space: &SearchSpace) -> Result<OptimizationResult> {
    select_best(evaluate_grid(space)?)
}
