//! Flat `key = value` configuration files.
//!
//! One key per line, `#` starts a comment, blank lines are ignored.
//! Loaders are strict: unknown keys and duplicates are rejected so typos
//! surface instead of silently falling back.

use std::collections::BTreeMap;
use std::path::Path;

use floodsim_core::{
    CatchmentParams, Distribution, PlatformSpec, SamplingSpec, Thresholds, WorkloadProfile,
};

use crate::CliError;

#[derive(Debug)]
pub struct KvFile {
    path: String,
    map: BTreeMap<String, String>,
}

impl KvFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&path.display().to_string(), &text)
    }

    pub fn parse(path: &str, text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Parse(format!("{path} line {}: expected 'key = value'", idx + 1))
            })?;
            let key = key.trim().to_string();
            if map.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(CliError::Parse(format!(
                    "{path} line {}: duplicate key '{key}'",
                    idx + 1
                )));
            }
        }
        Ok(Self {
            path: path.to_string(),
            map,
        })
    }

    fn get(&self, key: &str) -> Result<&str, CliError> {
        self.map
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| CliError::Parse(format!("{}: missing key '{key}'", self.path)))
    }

    fn f64(&self, key: &str) -> Result<f64, CliError> {
        let raw = self.get(key)?;
        raw.parse().map_err(|_| {
            CliError::Parse(format!(
                "{}: key '{key}': invalid number '{raw}'",
                self.path
            ))
        })
    }

    fn u32(&self, key: &str) -> Result<u32, CliError> {
        let raw = self.get(key)?;
        raw.parse().map_err(|_| {
            CliError::Parse(format!(
                "{}: key '{key}': invalid integer '{raw}'",
                self.path
            ))
        })
    }

    fn u32_list(&self, key: &str) -> Result<Vec<u32>, CliError> {
        let raw = self.get(key)?;
        raw.split(',')
            .map(|part| {
                part.trim().parse().map_err(|_| {
                    CliError::Parse(format!(
                        "{}: key '{key}': invalid integer '{}'",
                        self.path,
                        part.trim()
                    ))
                })
            })
            .collect()
    }

    fn reject_unknown(&self, allowed: &[&str]) -> Result<(), CliError> {
        for key in self.map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::Parse(format!(
                    "{}: unknown key '{key}'",
                    self.path
                )));
            }
        }
        Ok(())
    }
}

fn domain(path: &str, e: floodsim_core::Error) -> CliError {
    CliError::Parse(format!("{path}: {e}"))
}

/// Keys: cn, manning_n, area_km2, routing_gain, k_base_s.
pub fn load_catchment(path: &Path) -> Result<CatchmentParams, CliError> {
    let kv = KvFile::load(path)?;
    kv.reject_unknown(&["cn", "manning_n", "area_km2", "routing_gain", "k_base_s"])?;
    CatchmentParams::new(
        kv.f64("cn")?,
        kv.f64("manning_n")?,
        kv.f64("area_km2")?,
        kv.f64("routing_gain")?,
        kv.f64("k_base_s")?,
    )
    .map_err(|e| domain(&kv.path, e))
}

fn distribution(kv: &KvFile, prefix: &str) -> Result<Distribution, CliError> {
    let family = kv.get(&format!("{prefix}_family"))?;
    let lo = kv.f64(&format!("{prefix}_low"))?;
    let hi = kv.f64(&format!("{prefix}_high"))?;
    match family {
        "uniform" => Ok(Distribution::Uniform { lo, hi }),
        "truncated_normal" => Ok(Distribution::TruncatedNormal {
            mean: kv.f64(&format!("{prefix}_mean"))?,
            stddev: kv.f64(&format!("{prefix}_stddev"))?,
            lo,
            hi,
        }),
        other => Err(CliError::Parse(format!(
            "{}: {prefix}_family must be 'uniform' or 'truncated_normal', got '{other}'",
            kv.path
        ))),
    }
}

/// Keys: cn_family, cn_low, cn_high (+ cn_mean, cn_stddev for
/// truncated_normal), and the same under the n_ prefix.
pub fn load_sampling(path: &Path, base: CatchmentParams) -> Result<SamplingSpec, CliError> {
    let kv = KvFile::load(path)?;
    kv.reject_unknown(&[
        "cn_family",
        "cn_low",
        "cn_high",
        "cn_mean",
        "cn_stddev",
        "n_family",
        "n_low",
        "n_high",
        "n_mean",
        "n_stddev",
    ])?;
    let cn_dist = distribution(&kv, "cn")?;
    let n_dist = distribution(&kv, "n")?;
    SamplingSpec::new(cn_dist, n_dist, base).map_err(|e| domain(&kv.path, e))
}

/// Keys: sockets, cores_per_socket, host_cores_per_socket,
/// freq_levels_mhz (comma list), f_ref_mhz, p_idle_w, p_max_w.
pub fn load_platform(path: &Path) -> Result<PlatformSpec, CliError> {
    let kv = KvFile::load(path)?;
    kv.reject_unknown(&[
        "sockets",
        "cores_per_socket",
        "host_cores_per_socket",
        "freq_levels_mhz",
        "f_ref_mhz",
        "p_idle_w",
        "p_max_w",
    ])?;
    PlatformSpec::new(
        kv.u32("sockets")?,
        kv.u32("cores_per_socket")?,
        kv.u32("host_cores_per_socket")?,
        kv.u32_list("freq_levels_mhz")?,
        kv.u32("f_ref_mhz")?,
        kv.f64("p_idle_w")?,
        kv.f64("p_max_w")?,
    )
    .map_err(|e| domain(&kv.path, e))
}

/// Keys: work_per_iter_s, serial_fraction.
pub fn load_profile(path: &Path) -> Result<WorkloadProfile, CliError> {
    let kv = KvFile::load(path)?;
    kv.reject_unknown(&["work_per_iter_s", "serial_fraction"])?;
    WorkloadProfile::new(kv.f64("work_per_iter_s")?, kv.f64("serial_fraction")?)
        .map_err(|e| domain(&kv.path, e))
}

/// Keys: flood_discharge_m3s, flash_precip_mm_per_step.
pub fn load_thresholds(path: &Path) -> Result<Thresholds, CliError> {
    let kv = KvFile::load(path)?;
    kv.reject_unknown(&["flood_discharge_m3s", "flash_precip_mm_per_step"])?;
    Thresholds::new(
        kv.f64("flood_discharge_m3s")?,
        kv.f64("flash_precip_mm_per_step")?,
    )
    .map_err(|e| domain(&kv.path, e))
}
