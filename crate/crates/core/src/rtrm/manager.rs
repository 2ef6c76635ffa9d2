//! Scenario detection, AWM selection, the managed batch loop, and
//! management-overhead measurement.

use std::hint::black_box;
use std::time::Instant;

use super::{
    step_lifecycle, Awm, BatchLog, BatchRecord, ExcState, LifecycleEvent, QualityReport, Recipe,
    Scenario, Thresholds, Val,
};
use crate::error::{Error, Result};
use crate::hydrology::{simulate_rr, Hydrograph, TimeSeries};
use crate::platform::{estimate, CostEstimate, PlatformSpec, WorkloadProfile};
use crate::uncertainty::{precision_metric, quantiles, run_ensemble, QuantileBand};

/// Quantile bands computed for every batch.
pub const DEFAULT_QUANTILES: [f64; 3] = [0.05, 0.5, 0.95];
const MEDIAN_BAND: usize = 1;

/// Emergency operation is signalled by discharge exceeding the flood
/// threshold or any precipitation step exceeding the flash-flood threshold.
pub fn detect_scenario(
    latest: &Hydrograph,
    recent_precip: &TimeSeries,
    thresholds: &Thresholds,
) -> Scenario {
    let max_precip = recent_precip.values.iter().cloned().fold(0.0, f64::max);
    if latest.peak() > thresholds.flood_discharge_m3s
        || max_precip > thresholds.flash_precip_mm_per_step
    {
        Scenario::Emergency
    } else {
        Scenario::Standard
    }
}

// Comparators over validated (finite) AWM fields. Ids are unique, so both
// chains induce a strict total order and selection is deterministic.
fn by_energy(a: &Awm, b: &Awm) -> std::cmp::Ordering {
    a.expected_energy_j
        .partial_cmp(&b.expected_energy_j)
        .unwrap()
        .then(
            a.expected_precision
                .partial_cmp(&b.expected_precision)
                .unwrap(),
        )
        .then(a.id.cmp(&b.id))
}

fn by_time(a: &Awm, b: &Awm) -> std::cmp::Ordering {
    a.expected_time_s
        .partial_cmp(&b.expected_time_s)
        .unwrap()
        .then(
            a.expected_precision
                .partial_cmp(&b.expected_precision)
                .unwrap(),
        )
        .then(
            a.expected_energy_j
                .partial_cmp(&b.expected_energy_j)
                .unwrap(),
        )
        .then(a.id.cmp(&b.id))
}

/// Pick the AWM for a scenario.
///
/// Standard operation only has to finish before the next batch starts, so
/// it takes the lowest-energy AWM that fits the batch period (falling back
/// to the fastest one when none fits). Emergency operation wants results
/// as soon as possible and always takes the fastest AWM.
pub fn select_awm(recipe: &Recipe, scenario: Scenario, batch_period_s: f64) -> Result<&Awm> {
    if batch_period_s.is_nan() || batch_period_s <= 0.0 {
        return Err(Error::Domain(format!(
            "batch period must be positive, got {batch_period_s}"
        )));
    }
    if recipe.awms.is_empty() {
        return Err(Error::EmptyRecipe);
    }
    let fastest = recipe.awms.iter().min_by(|a, b| by_time(a, b)).unwrap();
    Ok(match scenario {
        Scenario::Emergency => fastest,
        Scenario::Standard => recipe
            .awms
            .iter()
            .filter(|a| a.expected_time_s <= batch_period_s)
            .min_by(|a, b| by_energy(a, b))
            .unwrap_or(fastest),
    })
}

/// Everything one batch produced.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchResult {
    pub bands: Vec<QuantileBand>,
    pub report: QualityReport,
    pub cost: CostEstimate,
}

/// Run one batch of the wrapped model: the deterministic simulation, the
/// Monte Carlo ensemble at the AWM's iteration count, quantile bands, the
/// precision metric, and the platform cost of the configuration.
///
/// The ensemble fan-out is capped at `min(val.workers_uncertainty,
/// awm.alloc.cores)` workers.
pub fn run_batch(
    val: &Val,
    awm: &Awm,
    platform: &PlatformSpec,
    profile: &WorkloadProfile,
    seed: u64,
) -> Result<BatchResult> {
    val.validate()?;
    awm.validate()?;
    platform.validate_alloc(&awm.alloc)?;
    let deterministic = simulate_rr(&val.rainfall, &val.sampling.base)?;
    let workers = val.workers_uncertainty.min(awm.alloc.cores as usize).max(1);
    let ensemble = run_ensemble(
        &val.rainfall,
        &val.sampling,
        awm.iterations as usize,
        seed,
        workers,
    )?;
    let bands = quantiles(&ensemble, &DEFAULT_QUANTILES)?;
    let precision = precision_metric(&deterministic, &ensemble)?;
    let cost = estimate(profile, awm.iterations, &awm.alloc, platform)?;
    Ok(BatchResult {
        bands,
        report: QualityReport {
            precision,
            time_s: cost.time_s,
        },
        cost,
    })
}

fn window_series(full: &TimeSeries, batch: usize, width: usize) -> Result<TimeSeries> {
    TimeSeries::new(
        full.timestamp(batch * width),
        full.step_s,
        full.values[batch * width..(batch + 1) * width].to_vec(),
    )
}

/// Drive the managed 24/7 loop for `n_batches` batches.
///
/// The rainfall series is consumed one equal-length window per batch (its
/// length must divide by `n_batches`), standing in for the new data each
/// batch period delivers. Batch 0 starts in the Standard scenario; every
/// later batch detects its scenario from the previous batch's median band
/// and precipitation window, so a threshold crossing in batch k changes
/// scheduling at batch k+1. QoS is acceptable when the simulated batch
/// time fits the batch period; a QoS failure or an AWM change passes
/// through Configured before the next run. Batch `b` seeds the ensemble
/// with `seed + b`.
#[allow(clippy::too_many_arguments)]
pub fn run_managed(
    recipe: &Recipe,
    val: &Val,
    platform: &PlatformSpec,
    profile: &WorkloadProfile,
    thresholds: &Thresholds,
    batch_period_s: f64,
    n_batches: usize,
    seed: u64,
) -> Result<BatchLog> {
    val.validate()?;
    recipe.validate_against(platform)?;
    if n_batches == 0 {
        return Err(Error::Domain("n_batches must be at least 1".into()));
    }
    if !val.rainfall.len().is_multiple_of(n_batches) {
        return Err(Error::Domain(format!(
            "rainfall length {} is not divisible into {n_batches} batch windows",
            val.rainfall.len()
        )));
    }
    let width = val.rainfall.len() / n_batches;

    struct Previous {
        median: Hydrograph,
        window: TimeSeries,
        qos_ok: bool,
        awm_id: u32,
    }

    let mut state = step_lifecycle(ExcState::Setup, LifecycleEvent::Scheduled)?;
    let mut log = BatchLog::default();
    let mut previous: Option<Previous> = None;

    for batch in 0..n_batches {
        let window = window_series(&val.rainfall, batch, width)?;
        let scenario = match &previous {
            None => Scenario::Standard,
            Some(p) => detect_scenario(&p.median, &p.window, thresholds),
        };
        let awm = select_awm(recipe, scenario, batch_period_s)?;

        match &previous {
            None => {
                // Setup already moved us to Configured; adopt the first AWM.
                state = step_lifecycle(state, LifecycleEvent::Start)?;
            }
            Some(p) => {
                let event = if p.qos_ok && awm.id == p.awm_id {
                    LifecycleEvent::QosOk
                } else {
                    LifecycleEvent::QosFail
                };
                state = step_lifecycle(state, event)?;
                if state == ExcState::Configured {
                    state = step_lifecycle(state, LifecycleEvent::Start)?;
                }
            }
        }
        debug_assert_eq!(state, ExcState::Running);

        let val_b = Val {
            rainfall: window.clone(),
            ..val.clone()
        };
        let out = run_batch(
            &val_b,
            awm,
            platform,
            profile,
            seed.wrapping_add(batch as u64),
        )
        .map_err(|e| Error::ManagedBatch {
            batch,
            completed: log.clone(),
            source: Box::new(e),
        })?;
        state = step_lifecycle(state, LifecycleEvent::RunDone)?;

        let qos_ok = out.report.time_s <= batch_period_s;
        log.records.push(BatchRecord {
            batch,
            scenario,
            awm_id: awm.id,
            precision: out.report.precision,
            time_s: out.cost.time_s,
            energy_j: out.cost.energy_j,
            qos_ok,
        });
        previous = Some(Previous {
            median: out.bands[MEDIAN_BAND].series.clone(),
            window,
            qos_ok,
            awm_id: awm.id,
        });
    }

    state = step_lifecycle(state, LifecycleEvent::Terminated)?;
    debug_assert_eq!(state, ExcState::Released);
    Ok(log)
}

fn median_of(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// The bare pipeline the manager wraps: identical numeric work, none of
/// the lifecycle bookkeeping.
fn bare_pipeline(
    val: &Val,
    awm: &Awm,
    platform: &PlatformSpec,
    profile: &WorkloadProfile,
    seed: u64,
) -> Result<()> {
    let deterministic = simulate_rr(&val.rainfall, &val.sampling.base)?;
    let workers = val.workers_uncertainty.min(awm.alloc.cores as usize).max(1);
    let ensemble = run_ensemble(
        &val.rainfall,
        &val.sampling,
        awm.iterations as usize,
        seed,
        workers,
    )?;
    black_box(quantiles(&ensemble, &DEFAULT_QUANTILES)?);
    black_box(precision_metric(&deterministic, &ensemble)?);
    black_box(estimate(profile, awm.iterations, &awm.alloc, platform)?);
    Ok(())
}

/// Wall-clock overhead of managed execution over the bare pipeline.
///
/// Runs `reps` repetitions of each with identical inputs and returns the
/// ratio of the wall-clock medians. Medians damp scheduler noise; real
/// elapsed time is measured, not simulated time.
pub fn measure_overhead(
    val: &Val,
    awm: &Awm,
    platform: &PlatformSpec,
    profile: &WorkloadProfile,
    reps: usize,
    seed: u64,
) -> Result<f64> {
    if reps < 3 {
        return Err(Error::Domain(format!(
            "reps must be at least 3, got {reps}"
        )));
    }
    let recipe = Recipe::new(0, vec![awm.clone()])?;
    let thresholds = Thresholds::new(f64::MAX, f64::MAX)?;

    let mut managed = Vec::with_capacity(reps);
    let mut bare = Vec::with_capacity(reps);
    for _ in 0..reps {
        let t = Instant::now();
        black_box(run_managed(
            &recipe,
            val,
            platform,
            profile,
            &thresholds,
            f64::MAX,
            1,
            seed,
        )?);
        managed.push(t.elapsed().as_secs_f64());

        let t = Instant::now();
        bare_pipeline(val, awm, platform, profile, seed)?;
        bare.push(t.elapsed().as_secs_f64());
    }
    Ok(median_of(managed) / median_of(bare))
}
