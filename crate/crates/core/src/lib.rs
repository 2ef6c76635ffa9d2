//! Core library of the floodsim workspace.
//!
//! A Monte Carlo uncertainty workload over a rainfall-runoff model,
//! managed by a runtime resource manager that schedules Application
//! Working Modes from a Pareto-optimal recipe, on a simulated many-core
//! platform with an analytic power/energy model.
//!
//! Modules:
//!
//! - [`hydrology`]: the rainfall-runoff model and the Nash-Sutcliffe
//!   efficiency coefficient.
//! - [`uncertainty`]: counter-seeded Monte Carlo ensembles, quantile
//!   bands, and the precision metric.
//! - [`platform`]: execution-time, power, and energy prediction for a
//!   many-core node with DVFS.
//! - [`rtrm`]: recipes, the managed lifecycle, scenario-driven AWM
//!   selection, and overhead measurement.
//! - [`dse`]: design-time exploration and Pareto-front extraction.

pub mod dse;
pub mod error;
pub mod hydrology;
pub mod platform;
pub mod rtrm;
pub mod uncertainty;

pub use dse::{
    emit_recipe, enumerate, evaluate, explore, pareto_front, ConfigGrid, GridPoint, ParetoFront,
    TradeoffPoint,
};
pub use error::{Error, Result};
pub use hydrology::{
    nash_sutcliffe, scs_runoff_depth, simulate_rr, CatchmentParams, Hydrograph, TimeSeries,
};
pub use platform::{
    energy, estimate, exec_time, load_fraction, power, CostEstimate, PlatformSpec,
    ResourceAllocation, WorkloadProfile,
};
pub use rtrm::{
    detect_scenario, measure_overhead, parse_recipe, run_batch, run_managed, select_awm,
    serialize_recipe, step_lifecycle, Awm, BatchLog, BatchRecord, BatchResult, ExcState,
    LifecycleEvent, QualityReport, Recipe, Scenario, Thresholds, Val, DEFAULT_QUANTILES,
};
pub use uncertainty::{
    precision_metric, precision_trace, quantiles, run_ensemble, sample_params, Distribution,
    EnsembleResult, PrecisionTrace, QuantileBand, SamplingSpec, TracePoint,
};
