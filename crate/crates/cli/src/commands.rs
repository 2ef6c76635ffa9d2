//! Implementations of the five subcommands.

use std::path::Path;

use floodsim_core::{
    emit_recipe, estimate, explore, measure_overhead, nash_sutcliffe, pareto_front, parse_recipe,
    precision_trace, quantiles, run_ensemble, run_managed, serialize_recipe, simulate_rr, Awm,
    ConfigGrid, Error, ResourceAllocation, Val,
};

use crate::config::{load_catchment, load_platform, load_profile, load_sampling, load_thresholds};
use crate::io::{
    bands_csv, batchlog_csv, hydrograph_csv, parse_discharge_csv, parse_rainfall_csv, trace_csv,
    tradeoff_csv,
};
use crate::{CliError, DseArgs, EnsembleArgs, ManagedArgs, OverheadArgs, SimulateArgs};

fn runtime(e: Error) -> CliError {
    CliError::Runtime(e.to_string())
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn parse_u32_list(flag: &str, raw: &str) -> Result<Vec<u32>, CliError> {
    raw.split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{flag}: invalid integer '{}'", part.trim())))
        })
        .collect()
}

fn parse_f64_list(flag: &str, raw: &str) -> Result<Vec<f64>, CliError> {
    if raw.trim().is_empty() {
        return Err(CliError::Usage(format!(
            "{flag}: expected a comma-separated list"
        )));
    }
    raw.split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{flag}: invalid number '{}'", part.trim())))
        })
        .collect()
}

/// Recipe-file failures split into document errors (exit 2) and
/// platform-infeasibility (exit 3).
fn recipe_err(path: &Path, e: Error) -> CliError {
    match e {
        Error::Recipe(_) | Error::DuplicateAwmId(_) | Error::EmptyRecipe | Error::Domain(_) => {
            CliError::Parse(format!("{}: {e}", path.display()))
        }
        other => CliError::Runtime(format!("{}: {other}", path.display())),
    }
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let rainfall = parse_rainfall_csv(&read_input(&args.rainfall)?)?;
    let catchment = load_catchment(&args.catchment)?;
    let hydrograph = simulate_rr(&rainfall, &catchment).map_err(runtime)?;
    write_output(&args.out, &hydrograph_csv(&hydrograph))?;
    if let Some(observed_path) = &args.observed {
        let observed = parse_discharge_csv(&read_input(observed_path)?)?;
        let e = nash_sutcliffe(&observed, &hydrograph).map_err(runtime)?;
        println!("nash_sutcliffe = {e}");
    }
    println!(
        "wrote hydrograph ({} steps) to {}",
        hydrograph.len(),
        args.out.display()
    );
    Ok(())
}

/// Decade checkpoints 10, 100, ... capped by (and always including) `n`.
fn decade_checkpoints(n: usize) -> Vec<usize> {
    let mut checkpoints = Vec::new();
    let mut decade = 10;
    while decade < n {
        checkpoints.push(decade);
        decade *= 10;
    }
    checkpoints.push(n);
    checkpoints
}

pub fn ensemble(args: &EnsembleArgs) -> Result<(), CliError> {
    let rainfall = parse_rainfall_csv(&read_input(&args.rainfall)?)?;
    let base = load_catchment(&args.catchment)?;
    let spec = load_sampling(&args.sampling, base)?;
    let qs = parse_f64_list("--quantiles", &args.quantiles)?;

    let ensemble = run_ensemble(&rainfall, &spec, args.iterations, args.seed, args.workers)
        .map_err(runtime)?;
    let bands = quantiles(&ensemble, &qs).map_err(runtime)?;
    write_output(&args.out, &bands_csv(&bands))?;

    if let Some(trace_path) = &args.trace_out {
        let checkpoints = decade_checkpoints(args.iterations);
        let trace = precision_trace(&rainfall, &spec, &checkpoints, args.seed, args.workers)
            .map_err(runtime)?;
        write_output(trace_path, &trace_csv(&trace))?;
    }
    println!(
        "wrote {} bands over {} iterations to {}",
        bands.len(),
        args.iterations,
        args.out.display()
    );
    Ok(())
}

/// Up to six evenly spaced core counts ending at the managed-core limit.
fn default_core_counts(managed: u32) -> Vec<u32> {
    let step = managed.div_ceil(6);
    let mut counts: Vec<u32> = (1..=6)
        .map(|i| i * step)
        .filter(|&c| c <= managed)
        .collect();
    if counts.last() != Some(&managed) {
        counts.push(managed);
    }
    counts
}

pub fn dse(args: &DseArgs) -> Result<(), CliError> {
    let rainfall = parse_rainfall_csv(&read_input(&args.rainfall)?)?;
    let base = load_catchment(&args.catchment)?;
    let spec = load_sampling(&args.sampling, base)?;
    let platform = load_platform(&args.platform)?;
    let profile = load_profile(&args.profile)?;

    let grid = ConfigGrid {
        iteration_levels: parse_u32_list("--iteration-levels", &args.iteration_levels)?,
        core_counts: match &args.cores {
            Some(raw) => parse_u32_list("--cores", raw)?,
            None => default_core_counts(platform.managed_cores()),
        },
        freq_levels_mhz: match &args.freqs {
            Some(raw) => parse_u32_list("--freqs", raw)?,
            None => platform.freq_levels_mhz.clone(),
        },
    };

    let points = explore(
        &grid,
        &rainfall,
        &spec,
        &profile,
        &platform,
        args.seed,
        args.workers,
    )
    .map_err(runtime)?;
    let front = pareto_front(&points);
    write_output(&args.out, &tradeoff_csv(&points, &front))?;
    if let Some(recipe_path) = &args.recipe_out {
        let recipe = emit_recipe(&front, args.priority).map_err(runtime)?;
        write_output(recipe_path, &serialize_recipe(&recipe))?;
    }
    println!(
        "evaluated {} configurations, {} on the Pareto front",
        points.len(),
        front.points.len()
    );
    Ok(())
}

pub fn managed(args: &ManagedArgs) -> Result<(), CliError> {
    let rainfall = parse_rainfall_csv(&read_input(&args.rainfall)?)?;
    let base = load_catchment(&args.catchment)?;
    let sampling = load_sampling(&args.sampling, base)?;
    let platform = load_platform(&args.platform)?;
    let profile = load_profile(&args.profile)?;
    let thresholds = load_thresholds(&args.thresholds)?;
    let recipe_text = read_input(&args.recipe)?;
    let recipe = parse_recipe(&recipe_text, &platform).map_err(|e| recipe_err(&args.recipe, e))?;

    let val = Val {
        sampling,
        rainfall,
        workers_uncertainty: args.workers,
        workers_model: 1,
    };
    let log = match run_managed(
        &recipe,
        &val,
        &platform,
        &profile,
        &thresholds,
        args.batch_period,
        args.batches,
        args.seed,
    ) {
        Ok(log) => log,
        // Keep the batches that did complete on disk before failing.
        Err(Error::ManagedBatch {
            batch,
            completed,
            source,
        }) => {
            write_output(&args.out, &batchlog_csv(&completed))?;
            return Err(CliError::Runtime(format!(
                "batch {batch} failed after {} completed (partial log at {}): {source}",
                completed.len(),
                args.out.display()
            )));
        }
        Err(e) => return Err(runtime(e)),
    };
    write_output(&args.out, &batchlog_csv(&log))?;
    println!(
        "completed {} batches, log at {}",
        log.len(),
        args.out.display()
    );
    Ok(())
}

pub fn overhead(args: &OverheadArgs) -> Result<(), CliError> {
    let rainfall = parse_rainfall_csv(&read_input(&args.rainfall)?)?;
    let base = load_catchment(&args.catchment)?;
    let sampling = load_sampling(&args.sampling, base)?;
    let platform = load_platform(&args.platform)?;
    let profile = load_profile(&args.profile)?;

    let alloc = ResourceAllocation {
        cores: args.cores.unwrap_or_else(|| platform.managed_cores()),
        freq_mhz: args.freq.unwrap_or(platform.f_ref_mhz),
    };
    let cost = estimate(&profile, args.iterations, &alloc, &platform).map_err(runtime)?;
    let awm = Awm {
        id: 0,
        alloc,
        iterations: args.iterations,
        expected_precision: 0.0,
        expected_time_s: cost.time_s,
        expected_energy_j: cost.energy_j,
    };
    let val = Val {
        sampling,
        rainfall,
        workers_uncertainty: args.workers,
        workers_model: 1,
    };
    let ratio =
        measure_overhead(&val, &awm, &platform, &profile, args.reps, args.seed).map_err(runtime)?;
    println!("overhead_ratio = {ratio:.4}");
    Ok(())
}
