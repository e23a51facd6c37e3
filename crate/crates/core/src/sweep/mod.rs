//! Parameter-grid sweeps: evaluate many scheme instances on many datasets,
//! pick winners, and emit machine-readable reports.
//!
//! A [`SweepConfig`] pairs datasets with per-kind parameter grids.
//! [`evaluate_all`] expands the grids, computes one [`EvalRecord`] per
//! applicable (dataset, instance) pair — in parallel, with a deterministic
//! output ordering — and assembles a [`SweepReport`] with two winner
//! selections and a per-dataset Pareto front:
//!
//! * `by_delta` — lowest distance-to-corner δ among records with β at or
//!   under the cap;
//! * `by_threshold` — lowest expansion β among records with k-anonymity α₂
//!   at or above the threshold.
//!
//! Reports serialize to CSV (one row per record), JSON (records plus
//! winners, Pareto front, and skip log), and a dependency-free SVG scatter.

mod config;
mod svg;

use std::collections::BTreeMap;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freqdist::FrequencyTable;
use crate::metrics::{self, EvalRecord};
use crate::padding::{SchemeInstance, SchemeKind};

pub use config::{load_config, parse_config, ConfigError};
pub use svg::{scatter_svg, ScatterAxis};

/// Errors from grid construction, evaluation, and report emission.
#[derive(Debug, Error)]
pub enum SweepError {
    #[error("empty range {lo}..{hi}")]
    EmptyRange { lo: u32, hi: u32 },
    #[error("range step must be >= 1")]
    ZeroStep,
    #[error("grid expands to no scheme instances")]
    EmptyGrid,
    #[error("dataset `{label}` has no entries")]
    EmptyDataset { label: String },
    #[error("duplicate dataset label `{label}`")]
    DuplicateDatasetLabel { label: String },
    #[error("no records: every (dataset, instance) pair was skipped or capped")]
    NothingEvaluated,
    #[error("no record for dataset `{dataset}` with beta <= {cap}")]
    NoRecordUnderCap { dataset: String, cap: f64 },
    #[error("no record for dataset `{dataset}` with alpha2 >= {k}")]
    NoRecordMeetsThreshold { dataset: String, k: u64 },
    #[error("unknown report format `{format}` (expected csv, json, or svg-scatter)")]
    UnknownFormat { format: String },
    #[error("report has no records")]
    EmptyReport,
    #[error("report serialization failed: {detail}")]
    Emit { detail: String },
}

/// Inclusive integer range with a step, e.g. `2..16:2` → 2, 4, …, 16.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntRange {
    lo: u32,
    hi: u32,
    step: u32,
}

impl IntRange {
    pub fn new(lo: u32, hi: u32, step: u32) -> Result<Self, SweepError> {
        if step == 0 {
            return Err(SweepError::ZeroStep);
        }
        if lo > hi {
            return Err(SweepError::EmptyRange { lo, hi });
        }
        Ok(Self { lo, hi, step })
    }

    pub fn single(value: u32) -> Self {
        Self {
            lo: value,
            hi: value,
            step: 1,
        }
    }

    pub fn values(&self) -> impl Iterator<Item = u32> {
        (self.lo..=self.hi).step_by(self.step as usize)
    }
}

/// Per-kind parameter ranges. `None` disables a kind; invalid parameter
/// combinations inside a range product (e.g. a `blk` min that is not a
/// multiple of the size, or `taBlk` bands out of order) are skipped, not
/// errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    pub identity: bool,
    /// One `maxL` instance per dataset, at that dataset's maximum length.
    pub max_l: bool,
    /// (size, min).
    pub blk: Option<(IntRange, IntRange)>,
    /// (base, min).
    pub pwr: Option<(IntRange, IntRange)>,
    /// (size, blocks, min).
    pub rnd_blk: Option<(IntRange, IntRange, IntRange)>,
    /// Extra-octet bound.
    pub rnd_len: Option<IntRange>,
    /// (l, m, r) bands.
    pub ta_blk: Option<(IntRange, IntRange, IntRange)>,
}

impl GridSpec {
    /// The bundled default grid: a few hundred instances dominated by
    /// `taBlk`, with the `taBlk` upper band anchored at `max_len` so every
    /// instance applies to data up to that length.
    pub fn default_grid(max_len: u32) -> Self {
        let r_lo = max_len.max(1);
        Self {
            identity: true,
            max_l: true,
            blk: Some((range(2, 16, 2), range(2, 32, 2))),
            pwr: Some((range(2, 4, 1), range(1, 16, 3))),
            rnd_blk: Some((range(2, 8, 2), range(2, 4, 1), range(2, 16, 2))),
            rnd_len: Some(range(1, 32, 1)),
            ta_blk: Some((
                range(2, 20, 2),
                range(5, 45, 5),
                range(r_lo, r_lo.saturating_add(10), 5),
            )),
        }
    }
}

fn range(lo: u32, hi: u32, step: u32) -> IntRange {
    IntRange::new(lo, hi, step).expect("static range is valid")
}

/// Datasets, grids, and winner-selection knobs for one sweep.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub datasets: Vec<FrequencyTable>,
    pub grid: GridSpec,
    /// Records with β above the cap are dropped (and logged as skipped);
    /// also bounds the `by_delta` winner search.
    pub beta_cap: Option<f64>,
    /// Minimum α₂ for the `by_threshold` winner selection.
    pub k_threshold: Option<u64>,
}

/// Key facts about one dataset, echoed into reports for reference lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub label: String,
    pub population: u64,
    #[serde(rename = "hU")]
    pub h_u: f64,
    pub max_length: u32,
    pub min_class_length: u32,
    pub min_class_count: u64,
}

/// A (dataset, instance) pair that produced no record, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedInstance {
    pub dataset: String,
    pub scheme: SchemeInstance,
    pub reason: String,
}

/// Per-dataset winner records, keyed by dataset label. A dataset is absent
/// from a map when no record qualified.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Winners {
    pub by_delta: BTreeMap<String, EvalRecord>,
    pub by_threshold: BTreeMap<String, EvalRecord>,
}

/// Full sweep outcome; serializes to the stable JSON report schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub datasets: Vec<DatasetSummary>,
    pub records: Vec<EvalRecord>,
    pub winners: Winners,
    pub pareto: Vec<EvalRecord>,
    pub skipped: Vec<SkippedInstance>,
}

/// Report output format; parses from `csv`, `json`, `svg-scatter`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    SvgScatter,
}

impl FromStr for ReportFormat {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "svg-scatter" => Ok(Self::SvgScatter),
            other => Err(SweepError::UnknownFormat {
                format: other.to_string(),
            }),
        }
    }
}

/// Expands the configured grids into a deterministic, duplicate-free,
/// code-ordered instance list. `maxL` contributes one instance per dataset,
/// sized to that dataset's maximum length.
pub fn expand_grid(cfg: &SweepConfig) -> Result<Vec<SchemeInstance>, SweepError> {
    fn push_ok(
        out: &mut Vec<SchemeInstance>,
        inst: Result<SchemeInstance, crate::padding::PadError>,
    ) {
        if let Ok(s) = inst {
            out.push(s);
        }
    }

    let g = &cfg.grid;
    let mut out: Vec<SchemeInstance> = Vec::new();
    if let Some((size, min)) = &g.blk {
        for sz in size.values() {
            for m in min.values() {
                push_ok(&mut out, SchemeInstance::blk(sz, m));
            }
        }
    }
    if let Some((base, min)) = &g.pwr {
        for b in base.values() {
            for m in min.values() {
                push_ok(&mut out, SchemeInstance::pwr(b, m));
            }
        }
    }
    if let Some((size, blocks, min)) = &g.rnd_blk {
        for sz in size.values() {
            for blks in blocks.values() {
                for m in min.values() {
                    push_ok(&mut out, SchemeInstance::rnd_blk(sz, blks, m));
                }
            }
        }
    }
    if let Some(len) = &g.rnd_len {
        for l in len.values() {
            out.push(SchemeInstance::rnd_len(l));
        }
    }
    if let Some((left, mid, right)) = &g.ta_blk {
        for l in left.values() {
            for m in mid.values() {
                for r in right.values() {
                    push_ok(&mut out, SchemeInstance::ta_blk(l, m, r));
                }
            }
        }
    }
    if g.identity {
        out.push(SchemeInstance::identity());
    }
    if g.max_l {
        for table in &cfg.datasets {
            if let Some(max) = table.max_length() {
                push_ok(&mut out, SchemeInstance::max_l(max));
            }
        }
    }

    out.sort_by_key(|s| s.code());
    out.dedup();
    if out.is_empty() {
        return Err(SweepError::EmptyGrid);
    }
    Ok(out)
}

/// Evaluates every applicable (dataset, instance) pair and assembles the
/// report. Pair evaluations run in parallel; the result ordering is fixed by
/// (dataset label, scheme code), so identical configs give identical bytes.
///
/// Instances whose preconditions fail on a dataset, and records dropped by
/// `beta_cap`, land in the `skipped` list with a reason instead of aborting
/// the sweep.
pub fn evaluate_all(cfg: &SweepConfig) -> Result<SweepReport, SweepError> {
    validate_datasets(&cfg.datasets)?;
    let instances = expand_grid(cfg)?;

    let pairs: Vec<(&FrequencyTable, &SchemeInstance)> = cfg
        .datasets
        .iter()
        .flat_map(|table| {
            instances
                .iter()
                .filter(|inst| applies_to(inst, table))
                .map(move |inst| (table, inst))
        })
        .collect();

    let outcomes: Vec<Result<EvalRecord, SkippedInstance>> = pairs
        .par_iter()
        .map(|&(table, inst)| {
            metrics::evaluate(table, inst).map_err(|err| SkippedInstance {
                dataset: table.label().to_string(),
                scheme: *inst,
                reason: err.to_string(),
            })
        })
        .collect();

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(record) => records.push(record),
            Err(skip) => skipped.push(skip),
        }
    }

    if let Some(cap) = cfg.beta_cap {
        let (kept, capped): (Vec<_>, Vec<_>) = records.into_iter().partition(|r| r.beta <= cap);
        records = kept;
        skipped.extend(capped.into_iter().map(|r| SkippedInstance {
            dataset: r.dataset.clone(),
            scheme: r.scheme,
            reason: format!("beta {:.6} exceeds cap {cap}", r.beta),
        }));
    }
    if records.is_empty() {
        return Err(SweepError::NothingEvaluated);
    }

    records.sort_by(|a, b| {
        (a.dataset.as_str(), a.scheme.code()).cmp(&(b.dataset.as_str(), b.scheme.code()))
    });
    skipped.sort_by(|a, b| {
        (a.dataset.as_str(), a.scheme.code()).cmp(&(b.dataset.as_str(), b.scheme.code()))
    });

    let mut winners = Winners::default();
    let mut pareto = Vec::new();
    for table in &cfg.datasets {
        let label = table.label();
        let cap = cfg.beta_cap.unwrap_or(f64::INFINITY);
        if let Ok(best) = best_by_delta(&records, label, cap) {
            winners.by_delta.insert(label.to_string(), best.clone());
        }
        if let Some(k) = cfg.k_threshold {
            if let Ok(best) = best_by_threshold(&records, label, k) {
                winners.by_threshold.insert(label.to_string(), best.clone());
            }
        }
        pareto.extend(pareto_front(&records, label));
    }

    Ok(SweepReport {
        datasets: cfg.datasets.iter().map(summarize).collect(),
        records,
        winners,
        pareto,
        skipped,
    })
}

/// The record minimizing δ among `dataset` records with β ≤ `beta_cap`.
/// Ties break to the smaller β, then the smaller scheme code.
pub fn best_by_delta<'a>(
    records: &'a [EvalRecord],
    dataset: &str,
    beta_cap: f64,
) -> Result<&'a EvalRecord, SweepError> {
    records
        .iter()
        .filter(|r| r.dataset == dataset && r.beta <= beta_cap)
        .min_by(|a, b| {
            a.delta
                .total_cmp(&b.delta)
                .then(a.beta.total_cmp(&b.beta))
                .then_with(|| a.scheme.code().cmp(&b.scheme.code()))
        })
        .ok_or_else(|| SweepError::NoRecordUnderCap {
            dataset: dataset.to_string(),
            cap: beta_cap,
        })
}

/// The record minimizing β among `dataset` records with α₂ ≥ `k`.
/// Ties break to the larger α₂, then the smaller scheme code.
pub fn best_by_threshold<'a>(
    records: &'a [EvalRecord],
    dataset: &str,
    k: u64,
) -> Result<&'a EvalRecord, SweepError> {
    records
        .iter()
        .filter(|r| r.dataset == dataset && r.alpha2 >= k)
        .min_by(|a, b| {
            a.beta
                .total_cmp(&b.beta)
                .then(b.alpha2.cmp(&a.alpha2))
                .then_with(|| a.scheme.code().cmp(&b.scheme.code()))
        })
        .ok_or_else(|| SweepError::NoRecordMeetsThreshold {
            dataset: dataset.to_string(),
            k,
        })
}

/// All `dataset` records not dominated in (β minimized, α₁ maximized).
pub fn pareto_front(records: &[EvalRecord], dataset: &str) -> Vec<EvalRecord> {
    let pool: Vec<&EvalRecord> = records.iter().filter(|r| r.dataset == dataset).collect();
    pool.iter()
        .filter(|r| !pool.iter().any(|other| dominates(other, r)))
        .map(|r| (*r).clone())
        .collect()
}

fn dominates(a: &EvalRecord, b: &EvalRecord) -> bool {
    a.beta <= b.beta && a.alpha1 >= b.alpha1 && (a.beta < b.beta || a.alpha1 > b.alpha1)
}

/// Serializes the report. CSV carries one row per record; JSON carries the
/// full report; `svg-scatter` renders both metric panels into one 800×600
/// image.
pub fn emit(report: &SweepReport, format: ReportFormat) -> Result<Vec<u8>, SweepError> {
    if report.records.is_empty() {
        return Err(SweepError::EmptyReport);
    }
    match format {
        ReportFormat::Csv => emit_csv(report),
        ReportFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(report).map_err(emit_err)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        ReportFormat::SvgScatter => Ok(svg::combined_svg(report).into_bytes()),
    }
}

fn emit_csv(report: &SweepReport) -> Result<Vec<u8>, SweepError> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record([
        "dataset", "scheme", "alpha1", "alpha2", "beta", "delta", "hU",
    ])
    .map_err(emit_err)?;
    for r in &report.records {
        wtr.serialize((
            &r.dataset,
            r.scheme.code(),
            r.alpha1,
            r.alpha2,
            r.beta,
            r.delta,
            r.h_u,
        ))
        .map_err(emit_err)?;
    }
    wtr.into_inner().map_err(emit_err)
}

fn emit_err(err: impl std::fmt::Display) -> SweepError {
    SweepError::Emit {
        detail: err.to_string(),
    }
}

fn validate_datasets(datasets: &[FrequencyTable]) -> Result<(), SweepError> {
    let mut seen = std::collections::BTreeSet::new();
    for table in datasets {
        if table.is_empty() {
            return Err(SweepError::EmptyDataset {
                label: table.label().to_string(),
            });
        }
        if !seen.insert(table.label().to_string()) {
            return Err(SweepError::DuplicateDatasetLabel {
                label: table.label().to_string(),
            });
        }
    }
    Ok(())
}

/// `maxL` instances pair only with the dataset they were sized for; every
/// other kind pairs with every dataset.
fn applies_to(inst: &SchemeInstance, table: &FrequencyTable) -> bool {
    match inst.kind() {
        SchemeKind::MaxL => inst.max_input() == table.max_length(),
        _ => true,
    }
}

fn summarize(table: &FrequencyTable) -> DatasetSummary {
    let (min_class_length, min_class_count) = table.min_class().expect("datasets are validated");
    DatasetSummary {
        label: table.label().to_string(),
        population: table.population(),
        h_u: table.entropy(),
        max_length: table.max_length().expect("datasets are validated"),
        min_class_length,
        min_class_count,
    }
}
