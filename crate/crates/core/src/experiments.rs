//! Seeded, replicated Monte-Carlo experiments and their CSV/JSON reports.
//!
//! Replica `r` of an experiment with master seed `s` walks with seed
//! [`derive_seed`]`(s, r)`, so every replica can be recomputed on its own and
//! the runner is free to execute them in any order or in parallel.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dimension::{default_fit_range, estimate_dimension, DimensionEstimate};
use crate::error::{Error, Result};
use crate::grid::{cantor_set, embed_in_binary, matching_depth, CantorSpec, GridSet};
use crate::rng::{derive_seed, PRNG_VERSION, SEED_SCHEME_VERSION};
use crate::stats::{ks_critical_value, ks_two_sample, Aggregate};
use crate::walk::{sample_walk, LatticePoint, MAX_STEPS_LOG2};
use crate::TOOLKIT_VERSION;

/// Significance level of the reported KS critical value.
pub const KS_SIGNIFICANCE: f64 = 0.01;

const SMOKE_STEPS_LOG2: u32 = 10;
const SMOKE_REPLICAS: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitRange {
    pub lo: u32,
    pub hi: u32,
}

/// Digit rule of a self-similar set, without a depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitRule {
    pub base: u32,
    pub kept_digits: Vec<u32>,
}

impl DigitRule {
    pub fn triadic() -> Self {
        Self {
            base: 3,
            kept_digits: vec![0, 2],
        }
    }

    pub fn at_depth(&self, depth: u32) -> CantorSpec {
        CantorSpec {
            base: self.base,
            kept_digits: self.kept_digits.clone(),
            depth,
        }
    }

    pub fn dimension(&self) -> f64 {
        self.at_depth(0).similarity_dimension()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ZeroSetDim,
    Doubling,
    Perkins,
    LevyIdentity,
    CantorExact,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::ZeroSetDim => "zero_set_dim",
            Self::Doubling => "doubling",
            Self::Perkins => "perkins",
            Self::LevyIdentity => "levy_identity",
            Self::CantorExact => "cantor_exact",
        }
    }
}

/// Kind-specific parameters, tagged by `kind` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentParams {
    ZeroSetDim {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fit: Option<FitRange>,
    },
    Doubling {
        cantor: DigitRule,
        /// Levels of the nominal image grid (depth `⌈m/2⌉`).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fit: Option<FitRange>,
    },
    Perkins {
        deltas: Vec<f64>,
    },
    LevyIdentity,
    CantorExact {
        #[serde(default = "DigitRule::triadic")]
        cantor: DigitRule,
        depth: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fit: Option<FitRange>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Walk length exponent `m` (`N = 2^m`). Unused by `cantor_exact`.
    #[serde(default)]
    pub steps_log2: u32,
    pub replicas: u64,
    pub master_seed: u64,
    #[serde(flatten)]
    pub params: ExperimentParams,
}

impl ExperimentConfig {
    pub fn kind(&self) -> ExperimentKind {
        match self.params {
            ExperimentParams::ZeroSetDim { .. } => ExperimentKind::ZeroSetDim,
            ExperimentParams::Doubling { .. } => ExperimentKind::Doubling,
            ExperimentParams::Perkins { .. } => ExperimentKind::Perkins,
            ExperimentParams::LevyIdentity => ExperimentKind::LevyIdentity,
            ExperimentParams::CantorExact { .. } => ExperimentKind::CantorExact,
        }
    }

    /// A reasonable configuration for each kind.
    pub fn preset(kind: ExperimentKind, master_seed: u64) -> Self {
        let (steps_log2, replicas, params) = match kind {
            ExperimentKind::ZeroSetDim => (20, 50, ExperimentParams::ZeroSetDim { fit: None }),
            ExperimentKind::Doubling => (
                22,
                30,
                ExperimentParams::Doubling {
                    cantor: DigitRule {
                        base: 5,
                        kept_digits: vec![0, 4],
                    },
                    fit: None,
                },
            ),
            ExperimentKind::Perkins => (
                18,
                100,
                ExperimentParams::Perkins {
                    deltas: [4, 6, 8, 10].iter().map(|&e| 2f64.powi(-e)).collect(),
                },
            ),
            ExperimentKind::LevyIdentity => (14, 5000, ExperimentParams::LevyIdentity),
            ExperimentKind::CantorExact => (
                0,
                1,
                ExperimentParams::CantorExact {
                    cantor: DigitRule::triadic(),
                    depth: 20,
                    beta: None,
                    fit: None,
                },
            ),
        };
        Self {
            steps_log2,
            replicas,
            master_seed,
            params,
        }
    }

    /// Shrinks the run to at most `m = 10` and 5 replicas, dropping explicit
    /// fit ranges that may no longer fit.
    pub fn smoke(&self) -> Self {
        let mut cfg = self.clone();
        cfg.steps_log2 = cfg.steps_log2.min(SMOKE_STEPS_LOG2);
        cfg.replicas = cfg.replicas.min(SMOKE_REPLICAS);
        match &mut cfg.params {
            ExperimentParams::ZeroSetDim { fit } | ExperimentParams::Doubling { fit, .. } => *fit = None,
            ExperimentParams::CantorExact { depth, fit, .. } => {
                *depth = (*depth).min(SMOKE_STEPS_LOG2);
                *fit = None;
            }
            ExperimentParams::Perkins { .. } | ExperimentParams::LevyIdentity => {}
        }
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas < 1 {
            return Err(Error::Config("replicas must be at least 1".into()));
        }
        let needs_walk = self.kind() != ExperimentKind::CantorExact;
        if needs_walk && !(1..=MAX_STEPS_LOG2).contains(&self.steps_log2) {
            return Err(Error::Config(format!(
                "steps_log2 must lie in 1..={MAX_STEPS_LOG2}, got {}",
                self.steps_log2
            )));
        }
        let check_fit = |fit: &Option<FitRange>| match fit {
            Some(f) if f.lo >= f.hi => Err(Error::Config(format!("fit range [{}, {}] is empty", f.lo, f.hi))),
            _ => Ok(()),
        };
        match &self.params {
            ExperimentParams::ZeroSetDim { fit } => check_fit(fit)?,
            ExperimentParams::Doubling { cantor, fit } => {
                check_fit(fit)?;
                cantor.at_depth(0).validate()?;
                let alpha = cantor.dimension();
                if alpha >= 0.5 {
                    return Err(Error::Config(format!(
                        "doubling needs a time set of dimension below 1/2, got {alpha}"
                    )));
                }
            }
            ExperimentParams::Perkins { deltas } => {
                if deltas.is_empty() {
                    return Err(Error::Config("perkins needs at least one delta".into()));
                }
                if deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
                    return Err(Error::Config("deltas must be positive".into()));
                }
                if deltas.windows(2).any(|w| w[0] <= w[1]) {
                    return Err(Error::Config("deltas must be strictly decreasing".into()));
                }
            }
            ExperimentParams::LevyIdentity => {}
            ExperimentParams::CantorExact { cantor, depth, beta, fit } => {
                check_fit(fit)?;
                cantor.at_depth(*depth).validate()?;
                if let Some(b) = beta {
                    if !(0.0..=1.0).contains(b) {
                        return Err(Error::Config(format!("beta must lie in [0, 1], got {b}")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplicaFlag {
    Ok,
    /// The set was too sparse to fit over the requested range.
    Sparse,
    ZeroLocalTime,
}

impl ReplicaFlag {
    pub fn is_ok(self) -> bool {
        self == ReplicaFlag::Ok
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaRow {
    pub replica: u64,
    pub seed: u64,
    pub flag: ReplicaFlag,
    pub stats: Vec<(String, f64)>,
}

/// One line of the report CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRecord {
    pub replica: u64,
    pub seed: u64,
    pub flag: ReplicaFlag,
    pub stat_name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub toolkit_version: String,
    pub prng_version: String,
    pub seed_scheme: String,
    pub replicas: u64,
    pub rows_used: u64,
    pub rows_flagged: u64,
    /// Per statistic, over unflagged rows.
    pub aggregates: BTreeMap<String, Aggregate>,
    /// Experiment-level numbers (targets, ratios, test statistics).
    pub summary: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub rows: Vec<ReplicaRow>,
}

/// Per-statistic aggregates over the unflagged rows.
pub fn aggregate_rows(rows: &[ReplicaRow]) -> BTreeMap<String, Aggregate> {
    let mut samples: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.flag.is_ok()) {
        for (name, value) in &row.stats {
            samples.entry(name.clone()).or_default().push(*value);
        }
    }
    samples
        .into_iter()
        .filter_map(|(name, values)| Aggregate::of(&values).map(|a| (name, a)))
        .collect()
}

impl ExperimentReport {
    fn new(config: &ExperimentConfig, mut rows: Vec<ReplicaRow>) -> Self {
        rows.sort_by_key(|r| r.replica);
        let rows_used = rows.iter().filter(|r| r.flag.is_ok()).count() as u64;
        Self {
            config: config.clone(),
            toolkit_version: TOOLKIT_VERSION.to_string(),
            prng_version: PRNG_VERSION.to_string(),
            seed_scheme: SEED_SCHEME_VERSION.to_string(),
            replicas: rows.len() as u64,
            rows_used,
            rows_flagged: rows.len() as u64 - rows_used,
            aggregates: aggregate_rows(&rows),
            summary: BTreeMap::new(),
            notes: Vec::new(),
            rows,
        }
    }

    pub fn kind(&self) -> ExperimentKind {
        self.config.kind()
    }

    pub fn mean(&self, stat: &str) -> Option<f64> {
        self.aggregates.get(stat).map(|a| a.mean)
    }

    /// Values of one statistic across unflagged rows, in replica order.
    pub fn values(&self, stat: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.flag.is_ok())
            .flat_map(|r| r.stats.iter().filter(|(n, _)| n == stat).map(|(_, v)| *v))
            .collect()
    }

    pub fn csv_records(&self) -> Vec<CsvRecord> {
        self.rows
            .iter()
            .flat_map(|r| {
                r.stats.iter().map(move |(name, value)| CsvRecord {
                    replica: r.replica,
                    seed: r.seed,
                    flag: r.flag,
                    stat_name: name.clone(),
                    value: *value,
                })
            })
            .collect()
    }

    /// Rows as `replica,seed,flag,stat_name,value`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for rec in self.csv_records() {
            w.serialize(rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Aggregates and metadata as pretty JSON, newline-terminated.
    pub fn write_json<W: Write>(&self, mut writer: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut writer, self)?;
        writer.write_all(b"\n")?;
        Ok(())
    }

    /// Writes `<kind>.csv` and `<kind>.json` into `dir`, creating it if needed.
    pub fn save(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.kind().name()));
        let json_path = dir.join(format!("{}.json", self.kind().name()));
        self.write_csv(fs::File::create(&csv_path)?)?;
        self.write_json(fs::File::create(&json_path)?)?;
        Ok((csv_path, json_path))
    }
}

/// Reads back the rows of a report CSV.
pub fn read_csv_records<R: Read>(reader: R) -> Result<Vec<CsvRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Regroups CSV records into replica rows.
pub fn rows_from_records(records: &[CsvRecord]) -> Vec<ReplicaRow> {
    let mut rows: Vec<ReplicaRow> = Vec::new();
    for rec in records {
        match rows.last_mut() {
            Some(row) if row.replica == rec.replica => row.stats.push((rec.stat_name.clone(), rec.value)),
            _ => rows.push(ReplicaRow {
                replica: rec.replica,
                seed: rec.seed,
                flag: rec.flag,
                stats: vec![(rec.stat_name.clone(), rec.value)],
            }),
        }
    }
    rows
}

/// Runs every replica through `f`, in parallel on `jobs` threads (rayon's
/// default width when `None`).
fn map_replicas<F>(config: &ExperimentConfig, jobs: Option<usize>, f: F) -> Result<Vec<ReplicaRow>>
where
    F: Fn(u64, u64) -> Result<ReplicaRow> + Sync + Send,
{
    let work = || {
        (0..config.replicas)
            .into_par_iter()
            .map(|r| f(r, derive_seed(config.master_seed, r)))
            .collect::<Result<Vec<_>>>()
    };
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

fn fit_stats(est: &DimensionEstimate, prefix: &str) -> Vec<(String, f64)> {
    vec![
        (format!("{prefix}slope"), est.slope),
        (format!("{prefix}intercept"), est.intercept),
        (format!("{prefix}rms_residual"), est.rms_residual),
    ]
}

fn resolve_fit(fit: Option<FitRange>, default: (u32, u32)) -> (u32, u32) {
    fit.map_or(default, |f| (f.lo, f.hi))
}

/// Runs any experiment kind.
pub fn run(config: &ExperimentConfig, jobs: Option<usize>) -> Result<ExperimentReport> {
    config.validate()?;
    match config.kind() {
        ExperimentKind::ZeroSetDim => run_zero_set_dim(config, jobs),
        ExperimentKind::Doubling => run_doubling(config, jobs),
        ExperimentKind::Perkins => run_perkins(config, jobs),
        ExperimentKind::LevyIdentity => run_levy_identity(config, jobs),
        ExperimentKind::CantorExact => run_cantor_exact(config),
    }
}

fn expect_kind(config: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    config.validate()?;
    if config.kind() != kind {
        return Err(Error::Config(format!(
            "expected a {} config, got {}",
            kind.name(),
            config.kind().name()
        )));
    }
    Ok(())
}

/// Slope of the zero set's scale counts, per replica.
pub fn run_zero_set_dim(config: &ExperimentConfig, jobs: Option<usize>) -> Result<ExperimentReport> {
    expect_kind(config, ExperimentKind::ZeroSetDim)?;
    let ExperimentParams::ZeroSetDim { fit } = &config.params else {
        unreachable!()
    };
    let m = config.steps_log2;
    let (lo, hi) = resolve_fit(*fit, default_fit_range(m));
    let rows = map_replicas(config, jobs, |replica, seed| {
        let walk = sample_walk(m, seed)?;
        let zeros = walk.level_set(LatticePoint::ZERO);
        let counts = zeros.scale_counts();
        let mut stats = vec![("zero_count".to_string(), zeros.len() as f64)];
        let flag = match estimate_dimension(&counts, lo, hi) {
            Ok(est) => {
                stats.extend(fit_stats(&est, ""));
                ReplicaFlag::Ok
            }
            Err(Error::EmptyLevel { .. } | Error::DegenerateFit(_) | Error::LevelOutOfRange { .. }) => {
                ReplicaFlag::Sparse
            }
            Err(e) => return Err(e),
        };
        Ok(ReplicaRow {
            replica,
            seed,
            flag,
            stats,
        })
    })?;
    let mut report = ExperimentReport::new(config, rows);
    report.summary.insert("fit_lo".into(), f64::from(lo));
    report.summary.insert("fit_hi".into(), f64::from(hi));
    report.summary.insert("target_dimension".into(), 0.5);
    if let Some(mean) = report.mean("slope") {
        report.summary.insert("mean_slope".into(), mean);
    }
    Ok(report)
}

/// Default fit range for image sets: the finer half of the nominal image levels.
pub fn default_image_fit_range(nominal_depth: u32) -> (u32, u32) {
    (nominal_depth / 2, nominal_depth)
}

/// The Cantor time set used by the doubling experiment, on the base-2 grid
/// of depth `steps_log2`.
pub fn doubling_time_set(rule: &DigitRule, steps_log2: u32) -> Result<GridSet> {
    let depth = matching_depth(rule.base, steps_log2);
    embed_in_binary(&cantor_set(&rule.at_depth(depth))?, steps_log2)
}

/// Slope of the Brownian image of a self-similar time set, per replica.
pub fn run_doubling(config: &ExperimentConfig, jobs: Option<usize>) -> Result<ExperimentReport> {
    expect_kind(config, ExperimentKind::Doubling)?;
    let ExperimentParams::Doubling { cantor, fit } = &config.params else {
        unreachable!()
    };
    let m = config.steps_log2;
    let alpha = cantor.dimension();
    let times = doubling_time_set(cantor, m)?;
    let nominal = m.div_ceil(2);
    let (lo, hi) = resolve_fit(*fit, default_image_fit_range(nominal));
    let rows = map_replicas(config, jobs, |replica, seed| {
        let walk = sample_walk(m, seed)?;
        let image = walk.image_set(&times)?;
        // a widened window adds coarse levels on top; shift the fit with them
        let extra = image.depth() - nominal;
        let mut stats = vec![
            ("image_count".to_string(), image.len() as f64),
            ("window_extra_levels".to_string(), f64::from(extra)),
        ];
        let flag = match estimate_dimension(&image.scale_counts(), lo + extra, hi + extra) {
            Ok(est) => {
                stats.extend(fit_stats(&est, "image_"));
                ReplicaFlag::Ok
            }
            Err(Error::EmptyLevel { .. } | Error::DegenerateFit(_) | Error::LevelOutOfRange { .. }) => {
                ReplicaFlag::Sparse
            }
            Err(e) => return Err(e),
        };
        Ok(ReplicaRow {
            replica,
            seed,
            flag,
            stats,
        })
    })?;
    let mut report = ExperimentReport::new(config, rows);
    report.summary.insert("alpha".into(), alpha);
    report.summary.insert("target_dimension".into(), 2.0 * alpha);
    report.summary.insert("time_set_cells".into(), times.len() as f64);
    report.summary.insert("fit_lo".into(), f64::from(lo));
    report.summary.insert("fit_hi".into(), f64::from(hi));
    if let Some(mean) = report.mean("image_slope") {
        report.summary.insert("mean_image_dimension".into(), mean);
        report.summary.insert("ratio_to_alpha".into(), mean / alpha);
    }
    Ok(report)
}

/// Statistic name for the Perkins ratio at one δ.
pub fn perkins_stat_name(delta: f64) -> String {
    format!("perkins_ratio@delta={delta}")
}

/// Perkins ratio at `x = 0`, `t = 1` for every δ, per replica.
pub fn run_perkins(config: &ExperimentConfig, jobs: Option<usize>) -> Result<ExperimentReport> {
    expect_kind(config, ExperimentKind::Perkins)?;
    let ExperimentParams::Perkins { deltas } = &config.params else {
        unreachable!()
    };
    let m = config.steps_log2;
    let rows = map_replicas(config, jobs, |replica, seed| {
        let walk = sample_walk(m, seed)?;
        let mut stats = Vec::with_capacity(deltas.len());
        for &delta in deltas {
            match walk.perkins_ratio(walk.steps(), LatticePoint::ZERO, delta) {
                Ok(r) => stats.push((perkins_stat_name(delta), r)),
                Err(Error::ZeroLocalTime) => {
                    return Ok(ReplicaRow {
                        replica,
                        seed,
                        flag: ReplicaFlag::ZeroLocalTime,
                        stats: vec![("local_time".into(), 0.0)],
                    })
                }
                Err(e) => return Err(e),
            }
        }
        Ok(ReplicaRow {
            replica,
            seed,
            flag: ReplicaFlag::Ok,
            stats,
        })
    })?;
    let mut report = ExperimentReport::new(config, rows);
    for &delta in deltas {
        if let Some(mean) = report.mean(&perkins_stat_name(delta)) {
            report.summary.insert(format!("distance_from_one@delta={delta}"), (mean - 1.0).abs());
        }
    }
    Ok(report)
}

/// Paired samples of `l(1, 0)` and `M(1)`, compared by a two-sample KS test.
pub fn run_levy_identity(config: &ExperimentConfig, jobs: Option<usize>) -> Result<ExperimentReport> {
    expect_kind(config, ExperimentKind::LevyIdentity)?;
    let m = config.steps_log2;
    let rows = map_replicas(config, jobs, |replica, seed| {
        let walk = sample_walk(m, seed)?;
        let local = walk.local_time(walk.steps(), LatticePoint::ZERO)?;
        let max = walk.positions().iter().copied().max().unwrap_or(0);
        Ok(ReplicaRow {
            replica,
            seed,
            flag: ReplicaFlag::Ok,
            stats: vec![
                ("local_time".into(), local),
                ("running_max".into(), f64::from(max) * walk.space_step()),
            ],
        })
    })?;
    let mut report = ExperimentReport::new(config, rows);
    let local = report.values("local_time");
    let max = report.values("running_max");
    let positive = max.iter().filter(|&&v| v > 0.0).count() as f64;
    report.summary.insert("p_max_positive".into(), positive / max.len() as f64);
    if local.len() < 2 {
        report.notes.push("ks_degenerate: fewer than two replicas".into());
    } else {
        report.summary.insert("ks_statistic".into(), ks_two_sample(&local, &max));
        report.summary.insert(
            "ks_critical_1pct".into(),
            ks_critical_value(KS_SIGNIFICANCE, local.len(), max.len()),
        );
    }
    Ok(report)
}

/// Cover sum and slope of a deterministic self-similar set.
pub fn run_cantor_exact(config: &ExperimentConfig) -> Result<ExperimentReport> {
    expect_kind(config, ExperimentKind::CantorExact)?;
    let ExperimentParams::CantorExact { cantor, depth, beta, fit } = &config.params else {
        unreachable!()
    };
    let spec = cantor.at_depth(*depth);
    let beta = beta.unwrap_or_else(|| spec.similarity_dimension());
    let set = cantor_set(&spec)?;
    let sum = set.hausdorff_sum(beta, *depth)?;
    let (lo, hi) = resolve_fit(*fit, default_fit_range(*depth));
    let mut stats = vec![("hausdorff_sum".to_string(), sum)];
    if hi > lo {
        stats.extend(fit_stats(&estimate_dimension(&set.scale_counts(), lo, hi)?, ""));
    }
    let rows = (0..config.replicas)
        .map(|replica| ReplicaRow {
            replica,
            seed: derive_seed(config.master_seed, replica),
            flag: ReplicaFlag::Ok,
            stats: stats.clone(),
        })
        .collect();
    let mut report = ExperimentReport::new(config, rows);
    report.summary.insert("beta".into(), beta);
    report.summary.insert("similarity_dimension".into(), spec.similarity_dimension());
    Ok(report)
}
