//! Simulated many-core node with DVFS.
//!
//! Execution time follows an Amdahl-style scaling law; power is linear in
//! system load between idle and full draw; energy is power times time.
//! Host cores are reserved for platform monitoring, always count as busy,
//! and are never available to managed allocations.

use crate::error::{Error, Result};

/// Description of the simulated machine.
#[derive(Debug, Clone, PartialEq)]
pub struct PlatformSpec {
    pub sockets: u32,
    pub cores_per_socket: u32,
    /// Cores per socket reserved for monitoring, excluded from management.
    pub host_cores_per_socket: u32,
    /// Available DVFS levels, ascending, in MHz.
    pub freq_levels_mhz: Vec<u32>,
    /// Reference frequency the workload profile is calibrated at.
    pub f_ref_mhz: u32,
    pub p_idle_w: f64,
    pub p_max_w: f64,
}

impl PlatformSpec {
    pub fn new(
        sockets: u32,
        cores_per_socket: u32,
        host_cores_per_socket: u32,
        freq_levels_mhz: Vec<u32>,
        f_ref_mhz: u32,
        p_idle_w: f64,
        p_max_w: f64,
    ) -> Result<Self> {
        let p = Self {
            sockets,
            cores_per_socket,
            host_cores_per_socket,
            freq_levels_mhz,
            f_ref_mhz,
            p_idle_w,
            p_max_w,
        };
        p.validate()?;
        Ok(p)
    }

    /// The 48-core SMP node used throughout the docs: 6 sockets of 8
    /// cores, one host core per socket, so 6 cores monitor the platform
    /// and 42 are managed. Power draw has no physical default and must be
    /// supplied.
    pub fn smp48(p_idle_w: f64, p_max_w: f64) -> Result<Self> {
        Self::new(6, 8, 1, vec![800, 1400, 2100], 2100, p_idle_w, p_max_w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sockets == 0 || self.cores_per_socket == 0 {
            return Err(Error::Domain("platform needs at least one core".into()));
        }
        if self.host_cores_per_socket >= self.cores_per_socket {
            return Err(Error::Domain(
                "host cores must leave at least one managed core per socket".into(),
            ));
        }
        if self.freq_levels_mhz.is_empty() {
            return Err(Error::Domain("freq_levels_mhz must be non-empty".into()));
        }
        if self.freq_levels_mhz.contains(&0) {
            return Err(Error::Domain("frequency levels must be positive".into()));
        }
        if !self.freq_levels_mhz.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Domain(
                "freq_levels_mhz must be strictly ascending".into(),
            ));
        }
        if !self.freq_levels_mhz.contains(&self.f_ref_mhz) {
            return Err(Error::UnknownFrequency {
                freq_mhz: self.f_ref_mhz,
            });
        }
        if !(self.p_idle_w > 0.0 && self.p_idle_w.is_finite()) {
            return Err(Error::Domain(format!(
                "p_idle_w must be positive, got {}",
                self.p_idle_w
            )));
        }
        if !(self.p_max_w > self.p_idle_w && self.p_max_w.is_finite()) {
            return Err(Error::Domain(format!(
                "p_max_w must exceed p_idle_w, got {} vs {}",
                self.p_max_w, self.p_idle_w
            )));
        }
        Ok(())
    }

    pub fn total_cores(&self) -> u32 {
        self.sockets * self.cores_per_socket
    }

    pub fn total_host_cores(&self) -> u32 {
        self.sockets * self.host_cores_per_socket
    }

    /// Cores available to managed applications.
    pub fn managed_cores(&self) -> u32 {
        self.sockets * (self.cores_per_socket - self.host_cores_per_socket)
    }

    pub fn validate_alloc(&self, alloc: &ResourceAllocation) -> Result<()> {
        if alloc.cores == 0 {
            return Err(Error::Domain("allocation needs at least one core".into()));
        }
        if alloc.cores > self.managed_cores() {
            return Err(Error::AllocationExceedsManaged {
                cores: alloc.cores,
                managed: self.managed_cores(),
            });
        }
        if !self.freq_levels_mhz.contains(&alloc.freq_mhz) {
            return Err(Error::UnknownFrequency {
                freq_mhz: alloc.freq_mhz,
            });
        }
        Ok(())
    }
}

/// Timing model of the managed workload: seconds per Monte Carlo iteration
/// on one core at the reference frequency, plus the serial fraction that
/// does not parallelize.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkloadProfile {
    pub work_per_iter_s: f64,
    pub serial_fraction: f64,
}

impl WorkloadProfile {
    pub fn new(work_per_iter_s: f64, serial_fraction: f64) -> Result<Self> {
        let p = Self {
            work_per_iter_s,
            serial_fraction,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.work_per_iter_s > 0.0 && self.work_per_iter_s.is_finite()) {
            return Err(Error::Domain(format!(
                "work_per_iter_s must be positive, got {}",
                self.work_per_iter_s
            )));
        }
        if !(0.0..=1.0).contains(&self.serial_fraction) {
            return Err(Error::Domain(format!(
                "serial_fraction must be in [0, 1], got {}",
                self.serial_fraction
            )));
        }
        Ok(())
    }
}

/// Cores and frequency granted to the managed application.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceAllocation {
    pub cores: u32,
    pub freq_mhz: u32,
}

/// Predicted cost of one configuration: execution time, power at the
/// resulting load, and the energy of the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostEstimate {
    pub time_s: f64,
    pub power_w: f64,
    pub energy_j: f64,
    pub load_pct: f64,
}

/// Predicted execution time of `iterations` Monte Carlo iterations.
///
/// t = iterations * work_per_iter_s * (s + (1 - s)/cores) * (f_ref/f).
pub fn exec_time(
    profile: &WorkloadProfile,
    iterations: u32,
    alloc: &ResourceAllocation,
    platform: &PlatformSpec,
) -> Result<f64> {
    profile.validate()?;
    platform.validate()?;
    platform.validate_alloc(alloc)?;
    if iterations == 0 {
        return Err(Error::Domain("iterations must be at least 1".into()));
    }
    let s = profile.serial_fraction;
    let scaling = s + (1.0 - s) / alloc.cores as f64;
    let freq_factor = platform.f_ref_mhz as f64 / alloc.freq_mhz as f64;
    Ok(iterations as f64 * profile.work_per_iter_s * scaling * freq_factor)
}

/// System load as the busy-core percentage of all physical cores. Host
/// cores monitor the platform continuously and always count as busy.
pub fn load_fraction(alloc: &ResourceAllocation, platform: &PlatformSpec) -> Result<f64> {
    platform.validate()?;
    if alloc.cores > platform.managed_cores() {
        return Err(Error::AllocationExceedsManaged {
            cores: alloc.cores,
            managed: platform.managed_cores(),
        });
    }
    let busy = alloc.cores + platform.total_host_cores();
    Ok(100.0 * busy as f64 / platform.total_cores() as f64)
}

/// Power draw at a given load: P = (P_max - P_idle) * n/100 + P_idle.
pub fn power(load_pct: f64, platform: &PlatformSpec) -> Result<f64> {
    platform.validate()?;
    if !(0.0..=100.0).contains(&load_pct) {
        return Err(Error::LoadOutOfRange(load_pct));
    }
    Ok((platform.p_max_w - platform.p_idle_w) * load_pct / 100.0 + platform.p_idle_w)
}

/// Energy of a run: E = P * t.
pub fn energy(power_w: f64, time_s: f64) -> Result<f64> {
    if !(time_s >= 0.0 && time_s.is_finite()) {
        return Err(Error::Domain(format!(
            "time must be non-negative, got {time_s}"
        )));
    }
    Ok(power_w * time_s)
}

/// Full cost of running a configuration on the platform.
pub fn estimate(
    profile: &WorkloadProfile,
    iterations: u32,
    alloc: &ResourceAllocation,
    platform: &PlatformSpec,
) -> Result<CostEstimate> {
    let time_s = exec_time(profile, iterations, alloc, platform)?;
    let load_pct = load_fraction(alloc, platform)?;
    let power_w = power(load_pct, platform)?;
    let energy_j = energy(power_w, time_s)?;
    Ok(CostEstimate {
        time_s,
        power_w,
        energy_j,
        load_pct,
    })
}
