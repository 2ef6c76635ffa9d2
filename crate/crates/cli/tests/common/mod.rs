//! Shared fixtures for the CLI integration and acceptance suites.

use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, Utc};

pub const CATCHMENT_CONF: &str = "\
cn = 80
manning_n = 0.1
area_km2 = 150
routing_gain = 250
k_base_s = 36000
";

pub const SAMPLING_CONF: &str = "\
cn_family = uniform
cn_low = 70
cn_high = 90
n_family = uniform
n_low = 0.05
n_high = 0.15
";

pub const PLATFORM_CONF: &str = "\
sockets = 6
cores_per_socket = 8
host_cores_per_socket = 1
freq_levels_mhz = 800,1400,2100
f_ref_mhz = 2100
p_idle_w = 100
p_max_w = 300
";

pub const PROFILE_CONF: &str = "\
work_per_iter_s = 0.01
serial_fraction = 0.1
";

pub const THRESHOLDS_CONF: &str = "\
flood_discharge_m3s = 1000000
flash_precip_mm_per_step = 30
";

pub fn start() -> DateTime<Utc> {
    "2024-01-01T00:00:00Z".parse().unwrap()
}

pub fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

pub fn rainfall_csv(values: &[f64]) -> String {
    let mut out = String::from("timestamp,precip_mm\n");
    for (i, v) in values.iter().enumerate() {
        let ts = start() + Duration::seconds(600 * i as i64);
        out.push_str(&format!(
            "{},{v}\n",
            ts.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
        ));
    }
    out
}

/// The benchmark storm: a 64-step Gaussian pulse peaking at 40 mm.
pub fn storm_values(n: usize) -> Vec<f64> {
    (0..n)
        .map(|t| 40.0 * (-((t as f64 - 12.0).powi(2)) / 18.0).exp())
        .collect()
}

/// Light but runoff-producing rain (14-17 mm per step at CN 80).
pub fn light_rain(n: usize) -> Vec<f64> {
    (0..n).map(|t| 14.0 + (t % 4) as f64).collect()
}
