//! Seeded experiment orchestration: run trials concurrently, measure with
//! the oracles, and aggregate deterministically.
//!
//! Every trial's seed chain is `derive(master, trial)` and then per
//! component, so results are independent of worker count and execution
//! order; records are folded in (group, trial) order. Oracle size-guard
//! errors are recorded on the trial and the experiment continues.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use thinning::balance::balance_stream;
use thinning::cdf::CdfModel;
use thinning::dyadic::{encode_point, Resolution};
use thinning::oracle::{max_slice_count, two_sample_discrepancy};
use thinning::pipeline::{thin_two_samples, ThinningParams};
use thinning::seed::{derive, derive_str};
use thinning::sparse::SparseVector;
use thinning::stats::{mean_and_se, median};
use thinning::Point;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Generate, thin, and measure.
    Thin,
    /// Balance dyadic encodings and record round statistics.
    Balance,
    /// Generate and measure only (the no-thinning baseline).
    Measure,
    /// Thin across the whole `t` list.
    Sweep,
}

fn default_trials() -> usize {
    1
}

fn default_d() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub n: usize,
    #[serde(default = "default_d")]
    pub d: usize,
    /// Thinning aggressiveness values; `thin` uses the first, `sweep` all.
    #[serde(default)]
    pub t: Vec<f64>,
    /// Dyadic resolution override.
    #[serde(default)]
    pub l: Option<u32>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub seed: u64,
    /// Per-axis models for generation (and transform, when thinning).
    #[serde(default)]
    pub dist: Option<Vec<CdfModel>>,
    /// Worker threads; defaults to all cores. Results do not depend on it.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let body = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("open {}: {e}", path.display())))?;
        let mut config: ExperimentConfig = serde_json::from_str(&body)
            .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
        config.validate()?;
        if let Some(dist) = config.dist.take() {
            config.dist = Some(
                dist.into_iter()
                    .map(|m| m.validated().map_err(CliError::from))
                    .collect::<Result<_, _>>()?,
            );
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials < 1 {
            return Err(CliError::config("trials must be >= 1"));
        }
        if self.n < 1 {
            return Err(CliError::config("n must be >= 1"));
        }
        if matches!(self.mode, Mode::Thin | Mode::Sweep) && self.t.is_empty() {
            return Err(CliError::config(
                "thin/sweep modes need at least one t value",
            ));
        }
        if let Some(dist) = &self.dist {
            if dist.len() != self.d {
                return Err(CliError::config(format!(
                    "dist has {} axis models but d = {}",
                    dist.len(),
                    self.d
                )));
            }
        }
        Ok(())
    }

    fn levels(&self) -> u32 {
        self.l.unwrap_or_else(|| Resolution::default_levels(self.n))
    }

    fn t_values(&self) -> Vec<Option<f64>> {
        match self.mode {
            Mode::Thin => vec![Some(self.t[0])],
            Mode::Sweep => self.t.iter().copied().map(Some).collect(),
            Mode::Measure | Mode::Balance => vec![None],
        }
    }
}

/// One trial's measurements; absent fields did not apply (or hit an oracle
/// guard, see `oracle_note`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub mode: String,
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub l: u32,
    pub t: Option<f64>,
    pub kept_x: Option<usize>,
    pub kept_y: Option<usize>,
    pub discarded_x: Option<usize>,
    pub discarded_y: Option<usize>,
    pub unprocessed: Option<usize>,
    pub dyadic_max: Option<u64>,
    pub disc_before: Option<f64>,
    pub disc_after: Option<f64>,
    pub slice_max: Option<u64>,
    pub rounds_used: Option<u32>,
    pub prefix_linf_max: Option<f64>,
    pub s1: Option<f64>,
    pub oracle_note: Option<String>,
}

impl TrialRecord {
    fn new(config: &ExperimentConfig, t: Option<f64>, trial: usize, seed: u64) -> Self {
        TrialRecord {
            mode: format!("{:?}", config.mode).to_lowercase(),
            trial,
            seed,
            n: config.n,
            d: config.d,
            l: config.levels(),
            t,
            kept_x: None,
            kept_y: None,
            discarded_x: None,
            discarded_y: None,
            unprocessed: None,
            dyadic_max: None,
            disc_before: None,
            disc_after: None,
            slice_max: None,
            rounds_used: None,
            prefix_linf_max: None,
            s1: None,
            oracle_note: None,
        }
    }
}

/// Aggregates for one `t` group.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupSummary {
    pub t: Option<f64>,
    pub trials: usize,
    pub mean_total_discarded: Option<f64>,
    pub se_total_discarded: Option<f64>,
    /// Empirical constant `C` in `discards <= C n / T`, measured not asserted.
    pub measured_c: Option<f64>,
    pub mean_disc_before: Option<f64>,
    pub mean_disc_before_over_sqrt_n: Option<f64>,
    pub mean_disc_after: Option<f64>,
    pub se_disc_after: Option<f64>,
    pub median_disc_after: Option<f64>,
    pub max_dyadic_max: Option<u64>,
    pub mean_rounds_used: Option<f64>,
    pub mean_prefix_linf_max: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub groups: Vec<GroupSummary>,
}

fn gen_points(models: &[CdfModel], n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| models.iter().map(|m| m.sample(&mut rng)).collect())
        .collect()
}

/// Generate a dataset from per-axis models (uniform on the unit cube when
/// no models are given).
pub fn gen_dataset(
    dist: Option<&[CdfModel]>,
    n: usize,
    d: usize,
    seed: u64,
) -> Result<Vec<Point>, CliError> {
    let models = match dist {
        Some(models) => models.to_vec(),
        None => vec![CdfModel::uniform(0.0, 1.0).map_err(CliError::from)?; d],
    };
    if models.len() != d {
        return Err(CliError::config(format!(
            "dist has {} axis models but d = {d}",
            models.len()
        )));
    }
    Ok(gen_points(&models, n, seed))
}

fn run_thin_trial(
    config: &ExperimentConfig,
    t: f64,
    trial: usize,
    trial_seed: u64,
    t_index: usize,
) -> Result<TrialRecord, CliError> {
    let mut record = TrialRecord::new(config, Some(t), trial, trial_seed);
    let xs = gen_dataset(
        config.dist.as_deref(),
        config.n,
        config.d,
        derive(trial_seed, 1),
    )?;
    let ys = gen_dataset(
        config.dist.as_deref(),
        config.n,
        config.d,
        derive(trial_seed, 2),
    )?;

    let note = |r: &mut TrialRecord, what: &str, e: thinning::Error| {
        let msg = format!("{what}: {e}");
        r.oracle_note = Some(match r.oracle_note.take() {
            Some(prev) => format!("{prev}; {msg}"),
            None => msg,
        });
    };

    match two_sample_discrepancy(&xs, &ys) {
        Ok(r) => record.disc_before = Some(r.value),
        Err(e) => note(&mut record, "disc_before", e),
    }

    let params = ThinningParams {
        t,
        levels: Some(config.levels()),
        seed: derive(derive_str(trial_seed, "pipeline"), t_index as u64),
        models: config.dist.clone(),
    };
    let out = thin_two_samples(&xs, &ys, &params).map_err(CliError::from)?;
    record.kept_x = Some(out.report.kept_x);
    record.kept_y = Some(out.report.kept_y);
    record.discarded_x = Some(out.report.discarded_x);
    record.discarded_y = Some(out.report.discarded_y);
    record.unprocessed = Some(out.report.unprocessed);
    record.dyadic_max = Some(out.report.dyadic_max);

    match two_sample_discrepancy(&out.kept_x, &out.kept_y) {
        Ok(r) => record.disc_after = Some(r.value),
        Err(e) => note(&mut record, "disc_after", e),
    }
    if config.dist.is_none() {
        let all: Vec<Point> = xs.iter().chain(&ys).cloned().collect();
        match max_slice_count(&all, config.levels()) {
            Ok(v) => record.slice_max = Some(v),
            Err(e) => note(&mut record, "slice_max", e),
        }
    }
    Ok(record)
}

fn run_measure_trial(
    config: &ExperimentConfig,
    trial: usize,
    trial_seed: u64,
) -> Result<TrialRecord, CliError> {
    let mut record = TrialRecord::new(config, None, trial, trial_seed);
    let xs = gen_dataset(
        config.dist.as_deref(),
        config.n,
        config.d,
        derive(trial_seed, 1),
    )?;
    let ys = gen_dataset(
        config.dist.as_deref(),
        config.n,
        config.d,
        derive(trial_seed, 2),
    )?;
    match two_sample_discrepancy(&xs, &ys) {
        Ok(r) => record.disc_before = Some(r.value),
        Err(e) => record.oracle_note = Some(format!("disc_before: {e}")),
    }
    Ok(record)
}

fn run_balance_trial(
    config: &ExperimentConfig,
    trial: usize,
    trial_seed: u64,
) -> Result<TrialRecord, CliError> {
    let mut record = TrialRecord::new(config, None, trial, trial_seed);
    let levels = config.levels();
    let res = Resolution::new(levels, config.d as u32).map_err(CliError::from)?;
    let points = gen_dataset(None, config.n, config.d, derive(trial_seed, 1))?;
    let vectors: Vec<SparseVector> = points
        .iter()
        .map(|p| encode_point(p, &res).map_err(CliError::from))
        .collect::<Result<_, _>>()?;
    let bound = res.boxes_per_point() as f64;
    let (_, stats) = balance_stream(&vectors, bound, derive_str(trial_seed, "balance"))
        .map_err(CliError::from)?;
    record.rounds_used = Some(stats.rounds_used);
    record.prefix_linf_max = Some(stats.prefix_linf_max);
    record.s1 = Some(stats.s1);
    Ok(record)
}

fn summarize(config: &ExperimentConfig, t: Option<f64>, records: &[&TrialRecord]) -> GroupSummary {
    let collect = |f: &dyn Fn(&TrialRecord) -> Option<f64>| -> Vec<f64> {
        records.iter().filter_map(|r| f(r)).collect()
    };
    let totals = collect(&|r| match (r.discarded_x, r.discarded_y, r.unprocessed) {
        (Some(a), Some(b), Some(c)) => Some((a + b + c) as f64),
        _ => None,
    });
    let before = collect(&|r| r.disc_before);
    let after = collect(&|r| r.disc_after);
    let rounds = collect(&|r| r.rounds_used.map(f64::from));
    let prefix = collect(&|r| r.prefix_linf_max);

    let (mean_total, se_total) = mean_and_se(&totals);
    let (mean_before, _) = mean_and_se(&before);
    let (mean_after, se_after) = mean_and_se(&after);
    GroupSummary {
        t,
        trials: records.len(),
        mean_total_discarded: (!totals.is_empty()).then_some(mean_total),
        se_total_discarded: (!totals.is_empty()).then_some(se_total),
        measured_c: match (t, !totals.is_empty()) {
            (Some(t), true) => Some(t * mean_total / config.n as f64),
            _ => None,
        },
        mean_disc_before: (!before.is_empty()).then_some(mean_before),
        mean_disc_before_over_sqrt_n: (!before.is_empty())
            .then_some(mean_before / (config.n as f64).sqrt()),
        mean_disc_after: (!after.is_empty()).then_some(mean_after),
        se_disc_after: (!after.is_empty()).then_some(se_after),
        median_disc_after: (!after.is_empty()).then_some(median(&after)),
        max_dyadic_max: records.iter().filter_map(|r| r.dyadic_max).max(),
        mean_rounds_used: (!rounds.is_empty()).then_some(mean_and_se(&rounds).0),
        mean_prefix_linf_max: (!prefix.is_empty()).then_some(mean_and_se(&prefix).0),
    }
}

/// Run all (t, trial) cells concurrently and fold deterministically.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(Vec<TrialRecord>, Summary), CliError> {
    config.validate()?;
    let t_values = config.t_values();
    let cells: Vec<(usize, usize)> = (0..t_values.len())
        .flat_map(|ti| (0..config.trials).map(move |trial| (ti, trial)))
        .collect();

    let run_all = || -> Result<Vec<TrialRecord>, CliError> {
        let mut rows: Vec<((usize, usize), TrialRecord)> = cells
            .par_iter()
            .map(|&(ti, trial)| {
                let trial_seed = derive(derive_str(config.seed, "trial"), trial as u64);
                let record = match (config.mode, t_values[ti]) {
                    (Mode::Thin | Mode::Sweep, Some(t)) => {
                        run_thin_trial(config, t, trial, trial_seed, ti)
                    }
                    (Mode::Measure, _) => run_measure_trial(config, trial, trial_seed),
                    (Mode::Balance, _) => run_balance_trial(config, trial, trial_seed),
                    _ => unreachable!("validated t list"),
                }?;
                Ok(((ti, trial), record))
            })
            .collect::<Result<_, CliError>>()?;
        rows.sort_by_key(|(key, _)| *key);
        Ok(rows.into_iter().map(|(_, r)| r).collect())
    };

    let records = match config.workers {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| CliError::config(format!("worker pool: {e}")))?
            .install(run_all),
        None => run_all(),
    }?;

    let groups = t_values
        .iter()
        .enumerate()
        .map(|(ti, &t)| {
            let group: Vec<&TrialRecord> = records
                .iter()
                .skip(ti * config.trials)
                .take(config.trials)
                .collect();
            summarize(config, t, &group)
        })
        .collect();
    let summary = Summary {
        config: config.clone(),
        groups,
    };
    Ok((records, summary))
}

/// Serialize records as CSV (header row from the field names).
pub fn records_to_csv(records: &[TrialRecord]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)
            .map_err(|e| CliError::parse(format!("serialize record: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::parse(format!("flush records: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::parse(format!("records utf8: {e}")))
}
