//! Experiment configuration and the data behind each result figure.
//!
//! Every command is a pure function of an [`ExperimentConfig`]: rows come out
//! in grid order and every random stream is seeded from the configured seed
//! and the row's grid coordinates, so output is byte-identical across runs
//! regardless of thread scheduling.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::PureState;
use crate::code::{decoder, decoders, flip_mapping, flip_mappings, flip_probability_from_fidelity, logical_error_mc, CodeConfig};
use crate::error::{Error, Result};
use crate::optimizer::{argmax, evaluate_grid, select_best, ConfigRow, Constraint, Scenario, SearchSpace};
use crate::output::{fmt_opt, fmt_sig, write_table, Format, Record};
use crate::path::{evaluate_path, ChannelParams, DwellMode, PathConfig};
use crate::queue::{queue_backend, queue_backends, QueueOptions, QueueParams};
use crate::swap::SwapExponent;

const MHZ: f64 = 1e6;

/// All run parameters. Rates are in MHz, lengths in km, times in seconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub light_speed_m_per_s: f64,
    pub path_lengths_km: Vec<f64>,
    pub attenuation_db_per_km: f64,
    pub arrival_rates_mhz: Vec<f64>,
    pub serving_rates_mhz: Vec<f64>,
    pub k_values: Vec<usize>,
    /// Edge counts M for the fidelity sweep.
    pub edge_counts: Vec<usize>,
    pub memory_units: Vec<usize>,
    pub memory_time_constant_s: f64,
    /// Arrival/serving pair used by the fidelity, decoding and optimization runs.
    pub sweep_arrival_rate_mhz: f64,
    pub sweep_serving_rate_mhz: f64,
    pub decode_path_length_km: f64,
    /// Edge counts M for the decoding and optimization runs.
    pub decode_edge_counts: Vec<usize>,
    pub decoder: String,
    pub mapping: String,
    pub queue_backend: String,
    pub threshold: f64,
    pub literal_constraint: bool,
    pub compat_swap_exponent: bool,
    pub dwell: DwellMode,
    /// Bloch vector of the state each edge is scored against.
    pub input_state: [f64; 3],
    pub seed: u64,
    pub trials: u64,
    pub served_target: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            light_speed_m_per_s: 2e8,
            path_lengths_km: vec![80.0, 120.0],
            attenuation_db_per_km: 0.2,
            arrival_rates_mhz: vec![0.05, 0.2, 0.5, 1.2],
            serving_rates_mhz: vec![0.02, 0.025, 0.05, 0.1, 4.41],
            k_values: vec![3, 5, 7],
            edge_counts: vec![1, 2, 4, 8],
            memory_units: (1..=9).collect(),
            memory_time_constant_s: 1e-3,
            sweep_arrival_rate_mhz: 0.2,
            sweep_serving_rate_mhz: 0.025,
            decode_path_length_km: 80.0,
            decode_edge_counts: vec![4, 8],
            decoder: "lut".into(),
            mapping: "werner".into(),
            queue_backend: "markov".into(),
            threshold: 0.5,
            literal_constraint: false,
            compat_swap_exponent: false,
            dwell: DwellMode::EveryEdge,
            input_state: [0.0, 0.0, 1.0],
            seed: 20240601,
            trials: 1_000_000,
            served_target: 1_000_000,
            format: Format::Csv,
            out: None,
        }
    }
}

fn nonempty<T>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        Err(Error::Config(format!("`{name}` must not be empty")))
    } else {
        Ok(())
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("`{name}` must be > 0, got {v}")))
    }
}

impl ExperimentConfig {
    /// Parses TOML text. Missing keys take their defaults; unknown keys and
    /// out-of-range values are errors.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Effective configuration with every default filled in.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        positive("light_speed_m_per_s", self.light_speed_m_per_s)?;
        positive("memory_time_constant_s", self.memory_time_constant_s)?;
        positive("sweep_arrival_rate_mhz", self.sweep_arrival_rate_mhz)?;
        positive("sweep_serving_rate_mhz", self.sweep_serving_rate_mhz)?;
        positive("decode_path_length_km", self.decode_path_length_km)?;
        if !(self.attenuation_db_per_km >= 0.0) {
            return Err(Error::Config("`attenuation_db_per_km` must be >= 0".into()));
        }
        for (name, v) in [
            ("path_lengths_km", &self.path_lengths_km),
            ("arrival_rates_mhz", &self.arrival_rates_mhz),
            ("serving_rates_mhz", &self.serving_rates_mhz),
        ] {
            nonempty(name, v)?;
            for &x in v.iter() {
                positive(name, x)?;
            }
        }
        for (name, v) in [
            ("k_values", &self.k_values),
            ("edge_counts", &self.edge_counts),
            ("memory_units", &self.memory_units),
            ("decode_edge_counts", &self.decode_edge_counts),
        ] {
            nonempty(name, v)?;
            if v.contains(&0) {
                return Err(Error::Config(format!("`{name}` entries must be >= 1")));
            }
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Config(format!("`threshold` {} outside [0, 1]", self.threshold)));
        }
        for (key, ok, names) in [
            ("decoder", decoders().contains(&self.decoder), decoders().names()),
            ("mapping", flip_mappings().contains(&self.mapping), flip_mappings().names()),
            ("queue_backend", queue_backends().contains(&self.queue_backend), queue_backends().names()),
        ] {
            if !ok {
                return Err(Error::Config(format!(
                    "`{key}` must be one of {}",
                    names.join(", ")
                )));
            }
        }
        if self.trials < 10_000 {
            return Err(Error::Config("`trials` must be >= 10000".into()));
        }
        if self.served_target < 10_000 {
            return Err(Error::Config("`served_target` must be >= 10000".into()));
        }
        let [x, y, z] = self.input_state;
        PureState::from_bloch(x, y, z).map_err(|e| Error::Config(format!("`input_state`: {e}")))?;
        Ok(())
    }

    pub fn channel(&self) -> ChannelParams {
        ChannelParams {
            attenuation_db_per_km: self.attenuation_db_per_km,
            light_speed_m_per_s: self.light_speed_m_per_s,
            memory_time_constant_s: self.memory_time_constant_s,
            swap_exponent: if self.compat_swap_exponent {
                SwapExponent::Compat
            } else {
                SwapExponent::Doubling
            },
            dwell: self.dwell,
        }
    }

    pub fn state(&self) -> PureState {
        let [x, y, z] = self.input_state;
        PureState::from_bloch(x, y, z).unwrap_or_default()
    }

    pub fn queue_options(&self, seed: u64) -> QueueOptions {
        QueueOptions {
            served_target: self.served_target,
            seed,
        }
    }

    pub fn scenario(&self, decoder: &str) -> Scenario {
        Scenario {
            total_length_km: self.decode_path_length_km,
            arrival_rate_hz: self.sweep_arrival_rate_mhz * MHZ,
            serving_rate_hz: self.sweep_serving_rate_mhz * MHZ,
            channel: self.channel(),
            decoder: decoder.to_string(),
            mapping: self.mapping.clone(),
            queue_backend: self.queue_backend.clone(),
            queue_options: self.queue_options(derive_seed(self.seed, &[0x09]),),
            threshold: self.threshold,
            constraint: if self.literal_constraint {
                Constraint::CostAbove
            } else {
                Constraint::FidelityAtLeast
            },
        }
    }

    pub fn search_space(&self, decoder: &str) -> SearchSpace {
        SearchSpace {
            edge_counts: self.decode_edge_counts.clone(),
            k_values: self.k_values.clone(),
            memory_units: self.memory_units.clone(),
            scenario: self.scenario(decoder),
        }
    }
}

/// Mixes grid coordinates into a base seed (splitmix64 finalizer per step).
pub fn derive_seed(base: u64, coords: &[u64]) -> u64 {
    coords.iter().fold(base, |acc, &c| {
        let mut z = acc ^ c.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_mul(0xd1b5_4a32_d192_ed03);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    })
}

// ---------------------------------------------------------------------------
// Queue waiting time
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueueRow {
    pub lambda_hz: f64,
    pub gamma_hz: f64,
    pub capacity: usize,
    pub backend: String,
    pub mean_wait_s: Option<f64>,
    pub blocking: Option<f64>,
    pub stderr_s: Option<f64>,
    pub note: String,
}

impl Record for QueueRow {
    fn header() -> &'static [&'static str] {
        &["lambda_hz", "gamma_hz", "capacity", "backend", "mean_wait_s", "blocking", "stderr_s", "note"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            fmt_sig(self.lambda_hz),
            fmt_sig(self.gamma_hz),
            self.capacity.to_string(),
            self.backend.clone(),
            fmt_opt(self.mean_wait_s),
            fmt_opt(self.blocking),
            fmt_opt(self.stderr_s),
            self.note.clone(),
        ]
    }
}

/// Mean wait for every (lambda, gamma, I) under every backend; rows for one
/// parameter point are adjacent (markov, des, analytic).
pub fn queue_wait_rows(cfg: &ExperimentConfig) -> Result<Vec<QueueRow>> {
    let mut points = Vec::new();
    for (a, &l) in cfg.arrival_rates_mhz.iter().enumerate() {
        for (g, &s) in cfg.serving_rates_mhz.iter().enumerate() {
            for &cap in &cfg.memory_units {
                points.push((a as u64, g as u64, l * MHZ, s * MHZ, cap));
            }
        }
    }
    let rows: Result<Vec<Vec<QueueRow>>> = points
        .into_par_iter()
        .map(|(a, g, l, s, cap)| {
            let q = QueueParams::new(l, s, cap)?;
            let opts = cfg.queue_options(derive_seed(cfg.seed, &[0x01, a, g, cap as u64]));
            ["markov", "des", "analytic"]
                .iter()
                .map(|&name| {
                    let row = |wait, blocking, stderr, note: String| QueueRow {
                        lambda_hz: l,
                        gamma_hz: s,
                        capacity: cap,
                        backend: name.to_string(),
                        mean_wait_s: wait,
                        blocking,
                        stderr_s: stderr,
                        note,
                    };
                    match queue_backend(name, &opts)?.solve(&q) {
                        Ok(st) => Ok(row(
                            Some(st.mean_wait_s),
                            st.blocking_probability,
                            Some(st.stderr_s),
                            String::new(),
                        )),
                        Err(Error::DegenerateFormula(msg)) => Ok(row(None, None, None, msg)),
                        Err(e) => Err(e),
                    }
                })
                .collect()
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

// ---------------------------------------------------------------------------
// Path fidelity
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathRow {
    pub length_km: f64,
    pub edge_count: usize,
    pub memory_units: usize,
    pub lambda_hz: f64,
    pub gamma_hz: f64,
    pub t_swap_s: f64,
    pub t_queue_s: f64,
    pub t_total_s: f64,
    pub fidelity: f64,
    pub cost: f64,
}

impl Record for PathRow {
    fn header() -> &'static [&'static str] {
        &["length_km", "edge_count", "memory_units", "lambda_hz", "gamma_hz", "t_swap_s", "t_queue_s", "t_total_s", "fidelity", "cost"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            fmt_sig(self.length_km),
            self.edge_count.to_string(),
            self.memory_units.to_string(),
            fmt_sig(self.lambda_hz),
            fmt_sig(self.gamma_hz),
            fmt_sig(self.t_swap_s),
            fmt_sig(self.t_queue_s),
            fmt_sig(self.t_total_s),
            fmt_sig(self.fidelity),
            fmt_sig(self.cost),
        ]
    }
}

/// Path fidelity for every (L, M, I) at the sweep arrival/serving pair.
pub fn fidelity_rows(cfg: &ExperimentConfig) -> Result<Vec<PathRow>> {
    let (l, s) = (cfg.sweep_arrival_rate_mhz * MHZ, cfg.sweep_serving_rate_mhz * MHZ);
    let channel = cfg.channel();
    let backend = queue_backend(&cfg.queue_backend, &cfg.queue_options(derive_seed(cfg.seed, &[0x02])))?;
    let mut rows = Vec::new();
    for &length in &cfg.path_lengths_km {
        for &m in &cfg.edge_counts {
            for &i in &cfg.memory_units {
                let pc = PathConfig::new(length, m, i)?.with_state(cfg.state());
                let q = QueueParams::new(l, s, i)?;
                let r = evaluate_path(&pc, &q, &channel, backend.as_ref())?;
                rows.push(PathRow {
                    length_km: length,
                    edge_count: m,
                    memory_units: i,
                    lambda_hz: l,
                    gamma_hz: s,
                    t_swap_s: r.t_swap_s,
                    t_queue_s: r.t_queue_s,
                    t_total_s: r.t_total_s,
                    fidelity: r.path_fidelity,
                    cost: r.path_cost,
                });
            }
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Decoding error
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeRow {
    pub k: usize,
    pub edge_count: usize,
    pub memory_units: usize,
    pub decoder: String,
    pub path_fidelity: f64,
    pub flip_probability: f64,
    pub p_exact: Option<f64>,
    pub p_mc: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

impl Record for DecodeRow {
    fn header() -> &'static [&'static str] {
        &["k", "edge_count", "memory_units", "decoder", "path_fidelity", "flip_probability", "p_exact", "p_mc", "stderr", "trials", "seed"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            self.edge_count.to_string(),
            self.memory_units.to_string(),
            self.decoder.clone(),
            fmt_sig(self.path_fidelity),
            fmt_sig(self.flip_probability),
            fmt_opt(self.p_exact),
            fmt_sig(self.p_mc),
            fmt_sig(self.stderr),
            self.trials.to_string(),
            self.seed.to_string(),
        ]
    }
}

/// Logical error for every (K, M, I) under both decoders, on the decoding
/// path length.
pub fn decode_rows(cfg: &ExperimentConfig) -> Result<Vec<DecodeRow>> {
    let (l, s) = (cfg.sweep_arrival_rate_mhz * MHZ, cfg.sweep_serving_rate_mhz * MHZ);
    let channel = cfg.channel();
    let backend = queue_backend(&cfg.queue_backend, &cfg.queue_options(derive_seed(cfg.seed, &[0x03])))?;
    let mapping = flip_mapping(&cfg.mapping)?;

    let mut jobs = Vec::new();
    for &k in &cfg.k_values {
        for &m in &cfg.decode_edge_counts {
            for &i in &cfg.memory_units {
                let pc = PathConfig::new(cfg.decode_path_length_km, m, i)?.with_state(cfg.state());
                let q = QueueParams::new(l, s, i)?;
                let f = evaluate_path(&pc, &q, &channel, backend.as_ref())?.path_fidelity;
                let p = flip_probability_from_fidelity(f, mapping.as_ref())?;
                for (d, name) in decoders().names().into_iter().enumerate() {
                    let seed = derive_seed(cfg.seed, &[0x04, k as u64, m as u64, i as u64, d as u64]);
                    jobs.push((k, m, i, name, f, p, seed));
                }
            }
        }
    }
    jobs.into_par_iter()
        .map(|(k, m, i, name, f, p, seed)| {
            let code = CodeConfig::uniform(k, p)?;
            let dec = decoder(name, &code)?;
            let r = logical_error_mc(&code, dec.as_ref(), cfg.trials, seed)?;
            Ok(DecodeRow {
                k,
                edge_count: m,
                memory_units: i,
                decoder: name.to_string(),
                path_fidelity: f,
                flip_probability: p,
                p_exact: r.logical_error_exact,
                p_mc: r.logical_error_mc,
                stderr: r.mc_stderr,
                trials: r.trials,
                seed,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Optimization
// ---------------------------------------------------------------------------

impl Record for ConfigRow {
    fn header() -> &'static [&'static str] {
        &["edge_count", "k", "memory_units", "t_swap_s", "t_queue_s", "t_total_s", "path_fidelity", "flip_probability", "logical_error", "accuracy", "raw_rate_hz", "objective_hz", "feasible"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.point.edge_count.to_string(),
            self.point.k.to_string(),
            self.point.memory_units.to_string(),
            fmt_sig(self.t_swap_s),
            fmt_sig(self.t_queue_s),
            fmt_sig(self.t_total_s),
            fmt_sig(self.path_fidelity),
            fmt_sig(self.flip_probability),
            fmt_sig(self.logical_error),
            fmt_sig(self.accuracy),
            fmt_sig(self.raw_rate_hz),
            fmt_sig(self.objective_hz),
            self.feasible.to_string(),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizeStatus {
    Optimal,
    Infeasible,
}

/// Structured summary of one optimization run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeSummary {
    pub decoder: String,
    pub status: OptimizeStatus,
    /// Feasible optimum, absent when nothing is feasible.
    pub best: Option<ConfigRow>,
    /// Argmax over every evaluated row, feasible or not.
    pub best_overall: ConfigRow,
    pub feasible_count: usize,
    pub evaluated: usize,
    pub threshold: f64,
    pub constraint: Constraint,
}

pub struct OptimizeRun {
    pub summary: OptimizeSummary,
    pub table: Vec<ConfigRow>,
}

pub fn optimize(cfg: &ExperimentConfig, decoder: &str) -> Result<OptimizeRun> {
    let space = cfg.search_space(decoder);
    let table = evaluate_grid(&space)?;
    let best_overall = argmax(&table)
        .cloned()
        .ok_or_else(|| Error::InvalidConfig("empty search space".into()))?;
    let (status, best, feasible_count) = match select_best(table.clone()) {
        Ok(r) => (OptimizeStatus::Optimal, Some(r.best), r.feasible_count),
        Err(Error::Infeasible { .. }) => (OptimizeStatus::Infeasible, None, 0),
        Err(e) => return Err(e),
    };
    Ok(OptimizeRun {
        summary: OptimizeSummary {
            decoder: decoder.to_string(),
            status,
            best,
            best_overall,
            feasible_count,
            evaluated: table.len(),
            threshold: space.scenario.threshold,
            constraint: space.scenario.constraint,
        },
        table,
    })
}

// ---------------------------------------------------------------------------
// Everything at once
// ---------------------------------------------------------------------------

/// Files written by [`reproduce_figures`], relative to the output directory.
pub fn figure_files(format: Format) -> Vec<String> {
    let ext = format.extension();
    vec![
        format!("queue_wait.{ext}"),
        format!("fidelity_sweep.{ext}"),
        format!("decode_error.{ext}"),
        format!("optimize_mwm.{ext}"),
        format!("optimize_lut.{ext}"),
        "optimize_summary.json".to_string(),
        "effective_config.toml".to_string(),
    ]
}

fn write_file<R: Record>(dir: &Path, name: &str, rows: &[R], format: Format) -> Result<()> {
    let file = fs::File::create(dir.join(name))?;
    write_table(rows, format, std::io::BufWriter::new(file))
}

/// Runs all four experiments and writes their tables into `dir`.
pub fn reproduce_figures(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<OptimizeSummary>> {
    fs::create_dir_all(dir)?;
    let files = figure_files(cfg.format);
    write_file(dir, &files[0], &queue_wait_rows(cfg)?, cfg.format)?;
    write_file(dir, &files[1], &fidelity_rows(cfg)?, cfg.format)?;
    write_file(dir, &files[2], &decode_rows(cfg)?, cfg.format)?;
    let mut summaries = Vec::new();
    for (name, file) in [("mwm", &files[3]), ("lut", &files[4])] {
        let run = optimize(cfg, name)?;
        write_file(dir, file, &run.table, cfg.format)?;
        summaries.push(run.summary);
    }
    fs::write(dir.join(&files[5]), serde_json::to_string_pretty(&summaries)? + "\n")?;
    // The directory is implied by where the file sits; leaving it out keeps
    // runs into different directories byte-identical.
    let effective = ExperimentConfig { out: None, ..cfg.clone() };
    fs::write(dir.join(&files[6]), effective.to_toml()?)?;
    Ok(summaries)
}
