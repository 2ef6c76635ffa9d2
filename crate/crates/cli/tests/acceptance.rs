//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `--nocapture`) and enforcing its runtime budget.
//!
//! Criteria are serialized through a mutex so the wall-clock measurements
//! (overhead, end-to-end timing) are not disturbed by sibling tests.

mod common;

use std::sync::{Mutex, PoisonError};
use std::time::{Duration, Instant};

use chrono::{DateTime, Utc};
use common::*;
use tempfile::TempDir;

use floodsim_cli::run_cli;
use floodsim_core::{
    energy, estimate, measure_overhead, nash_sutcliffe, pareto_front, parse_recipe, power,
    precision_metric, precision_trace, run_ensemble, run_managed, scs_runoff_depth,
    serialize_recipe, simulate_rr, step_lifecycle, Awm, BatchRecord, CatchmentParams, Distribution,
    ExcState, GridPoint, Hydrograph, LifecycleEvent, PlatformSpec, Recipe, ResourceAllocation,
    SamplingSpec, Scenario, Thresholds, TimeSeries, TradeoffPoint, Val, WorkloadProfile,
};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(PoisonError::into_inner)
}

fn t0() -> DateTime<Utc> {
    start()
}

fn platform() -> PlatformSpec {
    PlatformSpec::smp48(100.0, 300.0).unwrap()
}

fn profile() -> WorkloadProfile {
    WorkloadProfile::new(0.01, 0.1).unwrap()
}

fn base() -> CatchmentParams {
    CatchmentParams::new(80.0, 0.1, 150.0, 250.0, 36_000.0).unwrap()
}

/// The convergence benchmark: the 64-step storm with uncertainty sampled
/// tightly around the base parameters.
fn benchmark_spec() -> SamplingSpec {
    SamplingSpec::new(
        Distribution::Uniform { lo: 75.0, hi: 85.0 },
        Distribution::Uniform { lo: 0.09, hi: 0.11 },
        base(),
    )
    .unwrap()
}

fn benchmark_storm() -> TimeSeries {
    TimeSeries::new(t0(), 600.0, storm_values(64)).unwrap()
}

fn hydro(values: Vec<f64>) -> Hydrograph {
    Hydrograph::new(t0(), 600.0, values).unwrap()
}

fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    assert!(
        (got - want).abs() <= tol,
        "{what}: got {got}, want {want} (tol {tol})"
    );
}

#[test]
fn acceptance_01_formula_oracles() {
    let _guard = serial();
    let clock = Instant::now();

    // SCS curve-number runoff.
    assert_close(
        scs_runoff_depth(50.0, 100.0).unwrap(),
        50.0,
        1e-9,
        "scs cn=100",
    );
    assert_close(
        scs_runoff_depth(10.0, 80.0).unwrap(),
        0.0,
        1e-9,
        "scs below Ia",
    );
    assert_close(
        scs_runoff_depth(50.0, 80.0).unwrap(),
        13.802,
        1e-3,
        "scs hand value",
    );

    // Nash-Sutcliffe.
    let obs = hydro(vec![1.0, 2.0, 3.0]);
    assert_close(
        nash_sutcliffe(&obs, &obs).unwrap(),
        1.0,
        1e-9,
        "nse identity",
    );
    assert_close(
        nash_sutcliffe(&obs, &hydro(vec![2.0, 2.0, 2.0])).unwrap(),
        0.0,
        1e-9,
        "nse mean model",
    );
    assert_close(
        nash_sutcliffe(&obs, &hydro(vec![1.0, 2.0, 4.0])).unwrap(),
        0.5,
        1e-9,
        "nse hand value",
    );

    // Load-linear power model.
    let p = platform();
    assert_close(power(0.0, &p).unwrap(), 100.0, 1e-9, "power idle");
    assert_close(power(100.0, &p).unwrap(), 300.0, 1e-9, "power full");
    assert_close(power(50.0, &p).unwrap(), 200.0, 1e-9, "power midpoint");

    // Energy.
    assert_close(
        energy(200.0, 10.0).unwrap(),
        2000.0,
        1e-9,
        "energy 200W*10s",
    );
    assert_close(energy(300.0, 0.0).unwrap(), 0.0, 1e-9, "energy t=0");
    assert_close(energy(100.0, 1.0).unwrap(), 100.0, 1e-9, "energy idle 1s");

    let elapsed = clock.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!("[acceptance] criterion 1 (formula oracles): PASS ({elapsed:?})");
}

/// Small deterministic generator for the random point sets; independent of
/// the crate's sampling machinery.
struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn f64(&mut self) -> f64 {
        (self.next() >> 11) as f64 / (1u64 << 53) as f64
    }
}

#[test]
fn acceptance_02_pareto_equivalence() {
    let _guard = serial();
    let clock = Instant::now();
    let mut rng = SplitMix(0xF100D);

    for case in 0..200usize {
        let size = case % 65;
        let points: Vec<TradeoffPoint> = (0..size)
            .map(|i| {
                // Half the coordinates snap to a coarse grid so ties and
                // exact duplicates occur.
                let mut coord = |scale: f64| {
                    let v = rng.f64() * scale;
                    if rng.next().is_multiple_of(2) {
                        (v * 4.0).round() / 4.0
                    } else {
                        v
                    }
                };
                TradeoffPoint {
                    config: GridPoint {
                        iterations: i as u32 + 1,
                        cores: 1,
                        freq_mhz: 2100,
                    },
                    precision: coord(2.0),
                    time_s: coord(10.0) + 0.125,
                    energy_j: coord(100.0) + 0.125,
                }
            })
            .collect();

        // Brute-force O(n²) dominance filter, written from the definition.
        let expected: Vec<GridPoint> = points
            .iter()
            .filter(|p| {
                !points.iter().any(|q| {
                    q.precision <= p.precision
                        && q.time_s <= p.time_s
                        && q.energy_j <= p.energy_j
                        && (q.precision < p.precision
                            || q.time_s < p.time_s
                            || q.energy_j < p.energy_j)
                })
            })
            .map(|p| p.config)
            .collect();

        let front = pareto_front(&points);
        let mut got: Vec<u32> = front.points.iter().map(|p| p.config.iterations).collect();
        let mut want: Vec<u32> = expected.iter().map(|c| c.iterations).collect();
        got.sort_unstable();
        want.sort_unstable();
        assert_eq!(got, want, "case {case} (size {size})");
        assert!(
            front.points.windows(2).all(|w| w[0].time_s <= w[1].time_s),
            "front not time-sorted in case {case}"
        );
    }

    let elapsed = clock.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    println!("[acceptance] criterion 2 (Pareto equivalence, 200 sets): PASS ({elapsed:?})");
}

#[test]
fn acceptance_03_convergence_shape() {
    let _guard = serial();
    let clock = Instant::now();
    let rain = benchmark_storm();
    let spec = benchmark_spec();

    let mut improved = 0;
    let mut final_below_first = 0;
    let mut gains = Vec::new();
    for seed in 0..20u64 {
        let trace = precision_trace(&rain, &spec, &[100, 1000, 10_000], seed, 8).unwrap();
        let p100 = trace.points[0].precision;
        let p1k = trace.points[1].precision;
        let p10k = trace.points[2].precision;
        if p10k < p1k {
            improved += 1;
        }
        if p10k < p100 {
            final_below_first += 1;
        }
        gains.push((p1k - p10k) / p1k * 100.0);
    }
    gains.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_gain = 0.5 * (gains[9] + gains[10]);
    assert!(improved >= 18, "only {improved}/20 seeds improved");
    assert!(
        final_below_first >= 18,
        "final trace point below the first in only {final_below_first}/20 seeds"
    );

    let elapsed = clock.elapsed();
    println!(
        "[acceptance] criterion 3 (convergence shape): PASS \
         ({improved}/20 seeds improved, median improvement {median_gain:.1}%, {elapsed:?})"
    );
}

#[test]
fn acceptance_04_management_overhead() {
    let _guard = serial();
    let clock = Instant::now();

    let val = Val {
        sampling: benchmark_spec(),
        rainfall: benchmark_storm(),
        workers_uncertainty: 4,
        workers_model: 1,
    };
    let alloc = ResourceAllocation {
        cores: 42,
        freq_mhz: 2100,
    };
    let cost = estimate(&profile(), 1000, &alloc, &platform()).unwrap();
    let awm = Awm {
        id: 0,
        alloc,
        iterations: 1000,
        expected_precision: 0.0,
        expected_time_s: cost.time_s,
        expected_energy_j: cost.energy_j,
    };
    let ratio = measure_overhead(&val, &awm, &platform(), &profile(), 5, 1).unwrap();
    assert!(ratio <= 1.10, "overhead ratio {ratio:.4} exceeds 1.10");

    let elapsed = clock.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    println!(
        "[acceptance] criterion 4 (management overhead): PASS (ratio {ratio:.4}, {elapsed:?})"
    );
}

#[test]
fn acceptance_05_worker_determinism() {
    let _guard = serial();
    let clock = Instant::now();

    let dir = TempDir::new().unwrap();
    write(dir.path(), "rainfall.csv", &rainfall_csv(&storm_values(64)));
    write(dir.path(), "catchment.conf", CATCHMENT_CONF);
    write(dir.path(), "sampling.conf", SAMPLING_CONF);

    let mut outputs = Vec::new();
    for workers in ["1", "4", "8"] {
        let bands = dir.path().join(format!("bands_w{workers}.csv"));
        let trace = dir.path().join(format!("trace_w{workers}.csv"));
        let code = run_cli([
            "floodsim",
            "ensemble",
            "--rainfall",
            dir.path().join("rainfall.csv").to_str().unwrap(),
            "--catchment",
            dir.path().join("catchment.conf").to_str().unwrap(),
            "--sampling",
            dir.path().join("sampling.conf").to_str().unwrap(),
            "--iterations",
            "2000",
            "--seed",
            "42",
            "--workers",
            workers,
            "--out",
            bands.to_str().unwrap(),
            "--trace-out",
            trace.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        outputs.push((
            std::fs::read(&bands).unwrap(),
            std::fs::read(&trace).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1], "workers 1 vs 4 differ");
    assert_eq!(outputs[0], outputs[2], "workers 1 vs 8 differ");

    let elapsed = clock.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!("[acceptance] criterion 5 (worker determinism): PASS ({elapsed:?})");
}

#[test]
fn acceptance_06_lifecycle_soundness() {
    let _guard = serial();
    let clock = Instant::now();

    use ExcState::*;
    use LifecycleEvent::*;
    let states = [Setup, Configured, Running, Monitoring, Released];
    let events = [Scheduled, Start, RunDone, QosOk, QosFail, Terminated];
    let table = [
        (Setup, Scheduled, Configured),
        (Configured, Start, Running),
        (Running, RunDone, Monitoring),
        (Monitoring, QosOk, Running),
        (Monitoring, QosFail, Configured),
        (Monitoring, Terminated, Released),
    ];

    for state in states {
        for event in events {
            let expected = table
                .iter()
                .find(|(s, e, _)| *s == state && *e == event)
                .map(|(_, _, next)| *next);
            match (step_lifecycle(state, event), expected) {
                (Ok(next), Some(want)) => assert_eq!(next, want, "({state:?}, {event:?})"),
                (Err(_), None) => {}
                (got, want) => panic!("({state:?}, {event:?}): got {got:?}, want {want:?}"),
            }
        }
    }

    // Every qos_fail lands in Configured, whose only exit is Start -> Running.
    for state in states {
        if let Ok(next) = step_lifecycle(state, QosFail) {
            assert_eq!(next, Configured);
            for event in events {
                match step_lifecycle(next, event) {
                    Ok(after) => {
                        assert_eq!(event, Start);
                        assert_eq!(after, Running);
                    }
                    Err(_) => assert_ne!(event, Start),
                }
            }
        }
    }

    let elapsed = clock.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!("[acceptance] criterion 6 (lifecycle soundness): PASS ({elapsed:?})");
}

#[test]
fn acceptance_07_scenario_replay() {
    let _guard = serial();
    let clock = Instant::now();

    // Three 8-step windows; the flash threshold (30 mm) is crossed in
    // window 1 only.
    let mut values = light_rain(24);
    values[12] = 40.0;
    let rainfall = TimeSeries::new(t0(), 600.0, values).unwrap();
    let spec = benchmark_spec();
    let val = Val {
        sampling: spec.clone(),
        rainfall: rainfall.clone(),
        workers_uncertainty: 4,
        workers_model: 1,
    };
    let platform = platform();
    let profile = profile();
    let thresholds = Thresholds::new(1e9, 30.0).unwrap();

    // Two AWMs at 100 iterations: 16 cores (low energy) and 42 cores
    // (fastest). Standard selects id 0, Emergency id 1.
    let mk_awm = |id: u32, cores: u32| {
        let alloc = ResourceAllocation {
            cores,
            freq_mhz: 2100,
        };
        let cost = estimate(&profile, 100, &alloc, &platform).unwrap();
        Awm {
            id,
            alloc,
            iterations: 100,
            expected_precision: 0.1,
            expected_time_s: cost.time_s,
            expected_energy_j: cost.energy_j,
        }
    };
    let recipe = Recipe::new(0, vec![mk_awm(0, 16), mk_awm(1, 42)]).unwrap();

    let seed = 42u64;
    let log = run_managed(
        &recipe,
        &val,
        &platform,
        &profile,
        &thresholds,
        3600.0,
        3,
        seed,
    )
    .unwrap();

    // Hand-computed expectation. Times follow the Amdahl expression
    // t = iters * work * (s + (1-s)/cores) * (f_ref/f); power follows
    // P = (Pmax - Pidle) * n/100 + Pidle with n = 100*(cores+6)/48.
    let time_16 = 100.0 * 0.01 * (0.1 + (1.0 - 0.1) / 16.0) * (2100.0 / 2100.0);
    let power_16 = (300.0 - 100.0) * (100.0 * 22.0 / 48.0) / 100.0 + 100.0;
    let time_42 = 100.0 * 0.01 * (0.1 + (1.0 - 0.1) / 42.0) * (2100.0 / 2100.0);
    let power_42 = (300.0 - 100.0) * (100.0 * 48.0 / 48.0) / 100.0 + 100.0;

    // The precision column is the one field that cannot be written down by
    // hand: it is reproduced by the independent composition of the module
    // operations on each batch window.
    let window = |b: usize| {
        TimeSeries::new(
            rainfall.timestamp(b * 8),
            600.0,
            rainfall.values[b * 8..(b + 1) * 8].to_vec(),
        )
        .unwrap()
    };
    let precision_of = |b: usize| {
        let w = window(b);
        let det = simulate_rr(&w, &spec.base).unwrap();
        let ens = run_ensemble(&w, &spec, 100, seed + b as u64, 1).unwrap();
        precision_metric(&det, &ens).unwrap()
    };

    let expected = vec![
        BatchRecord {
            batch: 0,
            scenario: Scenario::Standard,
            awm_id: 0,
            precision: precision_of(0),
            time_s: time_16,
            energy_j: power_16 * time_16,
            qos_ok: true,
        },
        BatchRecord {
            batch: 1,
            scenario: Scenario::Standard,
            awm_id: 0,
            precision: precision_of(1),
            time_s: time_16,
            energy_j: power_16 * time_16,
            qos_ok: true,
        },
        BatchRecord {
            batch: 2,
            scenario: Scenario::Emergency,
            awm_id: 1,
            precision: precision_of(2),
            time_s: time_42,
            energy_j: power_42 * time_42,
            qos_ok: true,
        },
    ];
    assert_eq!(log.records, expected);

    let elapsed = clock.elapsed();
    println!("[acceptance] criterion 7 (scenario replay): PASS ({elapsed:?})");
}

#[test]
fn acceptance_08_end_to_end_dse() {
    let _guard = serial();
    let clock = Instant::now();

    let dir = TempDir::new().unwrap();
    write(dir.path(), "rainfall.csv", &rainfall_csv(&storm_values(64)));
    write(dir.path(), "catchment.conf", CATCHMENT_CONF);
    write(dir.path(), "sampling.conf", SAMPLING_CONF);
    write(dir.path(), "platform.conf", PLATFORM_CONF);
    write(dir.path(), "profile.conf", PROFILE_CONF);
    write(dir.path(), "thresholds.conf", THRESHOLDS_CONF);
    let path = |name: &str| dir.path().join(name).display().to_string();

    // 3 iteration levels x 6 core counts x 3 frequencies.
    let code = run_cli([
        "floodsim",
        "dse",
        "--rainfall",
        &path("rainfall.csv"),
        "--catchment",
        &path("catchment.conf"),
        "--sampling",
        &path("sampling.conf"),
        "--platform",
        &path("platform.conf"),
        "--profile",
        &path("profile.conf"),
        "--iteration-levels",
        "100,1000,10000",
        "--cores",
        "7,14,21,28,35,42",
        "--freqs",
        "800,1400,2100",
        "--seed",
        "42",
        "--workers",
        "8",
        "--out",
        &path("tradeoff.csv"),
        "--recipe-out",
        &path("recipe.xml"),
    ]);
    assert_eq!(code, 0);

    // The trade-off table has all 54 configurations; the minimum-time row
    // is at max cores and max frequency, and precision is constant per
    // iteration level.
    let table = std::fs::read_to_string(path("tradeoff.csv")).unwrap();
    let rows: Vec<Vec<&str>> = table
        .lines()
        .skip(1)
        .map(|line| line.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 54);

    let mut min_time = f64::INFINITY;
    let mut min_row: Option<&Vec<&str>> = None;
    let mut precision_by_level: std::collections::BTreeMap<&str, &str> =
        std::collections::BTreeMap::new();
    for row in &rows {
        let time: f64 = row[4].parse().unwrap();
        if time < min_time {
            min_time = time;
            min_row = Some(row);
        }
        let seen = precision_by_level.entry(row[0]).or_insert(row[3]);
        assert_eq!(
            *seen, row[3],
            "precision differs within iteration level {}",
            row[0]
        );
    }
    let min_row = min_row.unwrap();
    assert_eq!(min_row[1], "42", "min-time row is not at max cores");
    assert_eq!(min_row[2], "2100", "min-time row is not at max frequency");
    assert_eq!(
        min_row[0], "100",
        "min-time row is not at the lowest iteration level"
    );

    // The emitted recipe parses and round-trips byte-for-byte.
    let recipe_text = std::fs::read_to_string(path("recipe.xml")).unwrap();
    let platform = platform();
    let recipe = parse_recipe(&recipe_text, &platform).unwrap();
    assert_eq!(serialize_recipe(&recipe), recipe_text);
    assert!(!recipe.awms.is_empty());

    // The recipe drives a managed run without error. The managed timeline
    // rains in both batch windows (a pulse per window over a light base).
    let managed_rain: Vec<f64> = (0..64)
        .map(|t| {
            14.0 + (t % 4) as f64
                + 26.0 * (-((t as f64 - 12.0).powi(2)) / 18.0).exp()
                + 22.0 * (-((t as f64 - 44.0).powi(2)) / 14.0).exp()
        })
        .collect();
    write(dir.path(), "managed_rain.csv", &rainfall_csv(&managed_rain));
    let code = run_cli([
        "floodsim",
        "managed",
        "--rainfall",
        &path("managed_rain.csv"),
        "--catchment",
        &path("catchment.conf"),
        "--sampling",
        &path("sampling.conf"),
        "--platform",
        &path("platform.conf"),
        "--profile",
        &path("profile.conf"),
        "--thresholds",
        &path("thresholds.conf"),
        "--recipe",
        &path("recipe.xml"),
        "--batch-period",
        "3600",
        "--batches",
        "2",
        "--seed",
        "42",
        "--workers",
        "8",
        "--out",
        &path("batchlog.csv"),
    ]);
    assert_eq!(code, 0);
    let log = std::fs::read_to_string(path("batchlog.csv")).unwrap();
    assert_eq!(log.lines().count(), 3);

    let elapsed = clock.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    println!("[acceptance] criterion 8 (end-to-end DSE): PASS ({elapsed:?})");
}
