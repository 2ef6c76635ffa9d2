//! Design-time exploration of the (precision, time, energy) space.
//!
//! Enumerates iteration-count / core-count / frequency configurations,
//! evaluates each into a trade-off point, extracts the Pareto-optimal
//! subset under minimization of all three objectives, and emits the front
//! as a recipe the runtime manager can schedule from.
//!
//! All configurations share one seed, so precision depends only on the
//! iteration count: resources change time and energy, never the math.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hydrology::{simulate_rr, TimeSeries};
use crate::platform::{estimate, PlatformSpec, ResourceAllocation, WorkloadProfile};
use crate::rtrm::{Awm, Recipe};
use crate::uncertainty::{precision_metric, run_ensemble, SamplingSpec};

/// Axes of the exploration grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigGrid {
    /// Monte Carlo iteration counts, ascending (e.g. 100 / 1000 / 10000).
    pub iteration_levels: Vec<u32>,
    pub core_counts: Vec<u32>,
    /// Frequencies to explore; must be a subset of the platform levels.
    pub freq_levels_mhz: Vec<u32>,
}

impl ConfigGrid {
    pub fn validate(&self, platform: &PlatformSpec) -> Result<()> {
        platform.validate()?;
        if self.iteration_levels.is_empty() {
            return Err(Error::EmptyAxis("iteration_levels"));
        }
        if self.core_counts.is_empty() {
            return Err(Error::EmptyAxis("core_counts"));
        }
        if self.freq_levels_mhz.is_empty() {
            return Err(Error::EmptyAxis("freq_levels_mhz"));
        }
        for (name, axis) in [
            ("iteration_levels", &self.iteration_levels),
            ("core_counts", &self.core_counts),
            ("freq_levels_mhz", &self.freq_levels_mhz),
        ] {
            if axis[0] == 0 {
                return Err(Error::Domain(format!("{name} must be positive")));
            }
            if !axis.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::Domain(format!("{name} must be strictly ascending")));
            }
        }
        for &cores in &self.core_counts {
            if cores > platform.managed_cores() {
                return Err(Error::AllocationExceedsManaged {
                    cores,
                    managed: platform.managed_cores(),
                });
            }
        }
        for &f in &self.freq_levels_mhz {
            if !platform.freq_levels_mhz.contains(&f) {
                return Err(Error::UnknownFrequency { freq_mhz: f });
            }
        }
        Ok(())
    }
}

/// One grid configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridPoint {
    pub iterations: u32,
    pub cores: u32,
    pub freq_mhz: u32,
}

/// One evaluated configuration in objective space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffPoint {
    pub config: GridPoint,
    pub precision: f64,
    pub time_s: f64,
    pub energy_j: f64,
}

/// The non-dominated subset, sorted by ascending time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParetoFront {
    pub points: Vec<TradeoffPoint>,
}

/// Full Cartesian product of the grid axes in lexicographic
/// (iterations, cores, freq) order.
pub fn enumerate(grid: &ConfigGrid) -> Result<Vec<GridPoint>> {
    for (name, axis) in [
        ("iteration_levels", &grid.iteration_levels),
        ("core_counts", &grid.core_counts),
        ("freq_levels_mhz", &grid.freq_levels_mhz),
    ] {
        if axis.is_empty() {
            return Err(Error::EmptyAxis(name));
        }
    }
    let mut configs = Vec::with_capacity(
        grid.iteration_levels.len() * grid.core_counts.len() * grid.freq_levels_mhz.len(),
    );
    for &iterations in &grid.iteration_levels {
        for &cores in &grid.core_counts {
            for &freq_mhz in &grid.freq_levels_mhz {
                configs.push(GridPoint {
                    iterations,
                    cores,
                    freq_mhz,
                });
            }
        }
    }
    Ok(configs)
}

/// Evaluate one configuration: precision from a seeded ensemble of
/// `config.iterations`, time and energy from the platform model.
#[allow(clippy::too_many_arguments)]
pub fn evaluate(
    config: GridPoint,
    rainfall: &TimeSeries,
    spec: &SamplingSpec,
    profile: &WorkloadProfile,
    platform: &PlatformSpec,
    seed: u64,
    workers: usize,
) -> Result<TradeoffPoint> {
    let deterministic = simulate_rr(rainfall, &spec.base)?;
    let ensemble = run_ensemble(rainfall, spec, config.iterations as usize, seed, workers)?;
    let precision = precision_metric(&deterministic, &ensemble)?;
    let alloc = ResourceAllocation {
        cores: config.cores,
        freq_mhz: config.freq_mhz,
    };
    let cost = estimate(profile, config.iterations, &alloc, platform)?;
    Ok(TradeoffPoint {
        config,
        precision,
        time_s: cost.time_s,
        energy_j: cost.energy_j,
    })
}

/// Evaluate the whole grid in enumeration order.
///
/// Equivalent to calling [`evaluate`] per configuration; the ensemble is
/// only run once per iteration level because precision is resource
/// independent.
#[allow(clippy::too_many_arguments)]
pub fn explore(
    grid: &ConfigGrid,
    rainfall: &TimeSeries,
    spec: &SamplingSpec,
    profile: &WorkloadProfile,
    platform: &PlatformSpec,
    seed: u64,
    workers: usize,
) -> Result<Vec<TradeoffPoint>> {
    grid.validate(platform)?;
    let deterministic = simulate_rr(rainfall, &spec.base)?;
    let precisions: Vec<(u32, f64)> = grid
        .iteration_levels
        .iter()
        .map(|&iterations| {
            let ensemble = run_ensemble(rainfall, spec, iterations as usize, seed, workers)?;
            Ok((iterations, precision_metric(&deterministic, &ensemble)?))
        })
        .collect::<Result<_>>()?;

    enumerate(grid)?
        .into_iter()
        .map(|config| {
            let precision = precisions
                .iter()
                .find(|(n, _)| *n == config.iterations)
                .expect("every grid iteration level was evaluated")
                .1;
            let alloc = ResourceAllocation {
                cores: config.cores,
                freq_mhz: config.freq_mhz,
            };
            let cost = estimate(profile, config.iterations, &alloc, platform)?;
            Ok(TradeoffPoint {
                config,
                precision,
                time_s: cost.time_s,
                energy_j: cost.energy_j,
            })
        })
        .collect()
}

/// `a` dominates `b` when it is no worse in every minimized objective and
/// strictly better in at least one. Equal triples do not dominate each
/// other, so duplicates are all retained.
fn dominates(a: &TradeoffPoint, b: &TradeoffPoint) -> bool {
    a.precision <= b.precision
        && a.time_s <= b.time_s
        && a.energy_j <= b.energy_j
        && (a.precision < b.precision || a.time_s < b.time_s || a.energy_j < b.energy_j)
}

/// Extract the non-dominated subset. Membership does not depend on input
/// order; the front is returned sorted by ascending time (stable, so
/// equal times keep their input order).
pub fn pareto_front(points: &[TradeoffPoint]) -> ParetoFront {
    let mut front: Vec<TradeoffPoint> = points
        .par_iter()
        .filter(|p| !points.iter().any(|q| dominates(q, p)))
        .cloned()
        .collect();
    front.sort_by(|a, b| a.time_s.partial_cmp(&b.time_s).unwrap());
    ParetoFront { points: front }
}

/// Turn a Pareto front into a recipe: one AWM per point, ids assigned
/// 0..k-1 in ascending-time order, expected fields copied from the point.
pub fn emit_recipe(front: &ParetoFront, priority: u32) -> Result<Recipe> {
    if front.points.is_empty() {
        return Err(Error::EmptyFront);
    }
    let awms = front
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| Awm {
            id: i as u32,
            alloc: ResourceAllocation {
                cores: p.config.cores,
                freq_mhz: p.config.freq_mhz,
            },
            iterations: p.config.iterations,
            expected_precision: p.precision,
            expected_time_s: p.time_s,
            expected_energy_j: p.energy_j,
        })
        .collect();
    Recipe::new(priority, awms)
}
