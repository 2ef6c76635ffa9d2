//! Runtime resource manager.
//!
//! A managed application declares its Application Working Modes (AWMs) in
//! a recipe; the manager drives the application lifecycle, detects the
//! operating scenario from recent results, selects the AWM the scenario
//! calls for, and logs what each batch achieved.

mod lifecycle;
mod manager;
mod recipe;

pub use lifecycle::{step_lifecycle, ExcState, LifecycleEvent};
pub use manager::{
    detect_scenario, measure_overhead, run_batch, run_managed, select_awm, BatchResult,
    DEFAULT_QUANTILES,
};
pub use recipe::{parse_recipe, serialize_recipe};

use crate::error::{Error, Result};
use crate::hydrology::TimeSeries;
use crate::platform::{PlatformSpec, ResourceAllocation};
use crate::uncertainty::SamplingSpec;

/// One Application Working Mode: a resource allocation plus the quality
/// and cost the design-time exploration predicted for it.
#[derive(Debug, Clone, PartialEq)]
pub struct Awm {
    pub id: u32,
    pub alloc: ResourceAllocation,
    /// Monte Carlo iterations this mode runs per batch.
    pub iterations: u32,
    /// Predicted precision metric (lower is better).
    pub expected_precision: f64,
    pub expected_time_s: f64,
    pub expected_energy_j: f64,
}

impl Awm {
    fn validate(&self) -> Result<()> {
        if self.alloc.cores == 0 {
            return Err(Error::Domain(format!(
                "awm {}: cores must be positive",
                self.id
            )));
        }
        if self.iterations == 0 {
            return Err(Error::Domain(format!(
                "awm {}: iterations must be positive",
                self.id
            )));
        }
        if !(self.expected_precision >= 0.0 && self.expected_precision.is_finite()) {
            return Err(Error::Domain(format!(
                "awm {}: precision must be finite and non-negative",
                self.id
            )));
        }
        if !(self.expected_time_s > 0.0 && self.expected_time_s.is_finite()) {
            return Err(Error::Domain(format!(
                "awm {}: time_s must be positive",
                self.id
            )));
        }
        if !(self.expected_energy_j > 0.0 && self.expected_energy_j.is_finite()) {
            return Err(Error::Domain(format!(
                "awm {}: energy_j must be positive",
                self.id
            )));
        }
        Ok(())
    }
}

/// The ordered list of AWMs an application exposes to the manager.
#[derive(Debug, Clone, PartialEq)]
pub struct Recipe {
    pub priority: u32,
    pub awms: Vec<Awm>,
}

impl Recipe {
    /// Builds a recipe, enforcing non-emptiness, unique ids and per-AWM
    /// field ranges. Platform fit is checked separately where a platform
    /// is in scope ([`parse_recipe`], [`run_managed`]).
    pub fn new(priority: u32, awms: Vec<Awm>) -> Result<Self> {
        if awms.is_empty() {
            return Err(Error::EmptyRecipe);
        }
        let mut seen = std::collections::HashSet::new();
        for awm in &awms {
            awm.validate()?;
            if !seen.insert(awm.id) {
                return Err(Error::DuplicateAwmId(awm.id));
            }
        }
        Ok(Self { priority, awms })
    }

    pub fn validate_against(&self, platform: &PlatformSpec) -> Result<()> {
        for awm in &self.awms {
            platform.validate_alloc(&awm.alloc)?;
        }
        Ok(())
    }
}

/// Input structure of the managed application: everything that can vary
/// the uncertainty simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Val {
    pub sampling: SamplingSpec,
    pub rainfall: TimeSeries,
    /// Worker cap for the Monte Carlo fan-out.
    pub workers_uncertainty: usize,
    /// Workers for the rainfall-runoff kernel itself (the kernel here is
    /// sequential; the field is carried for the wrapped model's contract).
    pub workers_model: usize,
}

impl Val {
    pub fn validate(&self) -> Result<()> {
        self.sampling.validate()?;
        self.rainfall.validate()?;
        if self.workers_uncertainty == 0 || self.workers_model == 0 {
            return Err(Error::Domain("worker counts must be at least 1".into()));
        }
        Ok(())
    }
}

/// Flood-emergency trigger levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub flood_discharge_m3s: f64,
    pub flash_precip_mm_per_step: f64,
}

impl Thresholds {
    pub fn new(flood_discharge_m3s: f64, flash_precip_mm_per_step: f64) -> Result<Self> {
        let positive = |v: f64| v > 0.0 && !v.is_nan();
        if !positive(flood_discharge_m3s) || !positive(flash_precip_mm_per_step) {
            return Err(Error::Domain("thresholds must be positive".into()));
        }
        Ok(Self {
            flood_discharge_m3s,
            flash_precip_mm_per_step,
        })
    }
}

/// Operating scenario of the application.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Standard,
    Emergency,
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scenario::Standard => write!(f, "standard"),
            Scenario::Emergency => write!(f, "emergency"),
        }
    }
}

/// Quality of one wrapped model run: the precision metric and the
/// (simulated) execution time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub precision: f64,
    pub time_s: f64,
}

/// What one managed batch did and achieved.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchRecord {
    pub batch: usize,
    pub scenario: Scenario,
    pub awm_id: u32,
    pub precision: f64,
    pub time_s: f64,
    pub energy_j: f64,
    pub qos_ok: bool,
}

/// Ordered per-batch records of a managed run; indices are consecutive
/// from 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BatchLog {
    pub records: Vec<BatchRecord>,
}

impl BatchLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}
