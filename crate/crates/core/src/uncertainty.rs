//! Iterative Monte Carlo uncertainty engine.
//!
//! Samples catchment parameters, runs ensembles of rainfall-runoff
//! simulations, and condenses them into per-timestep quantile bands and a
//! scalar precision metric (distance of the ensemble median from the
//! deterministic run, in Nash-Sutcliffe terms; lower is better).
//!
//! Every random draw is a pure function of `(seed, iteration index)`
//! through a counter-based generator, so ensembles are byte-identical for
//! any worker count and any scheduling.

use chrono::{DateTime, Utc};
use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hydrology::{nash_sutcliffe, simulate_rr, CatchmentParams, Hydrograph, TimeSeries};

const F64_FROM_53_BITS: f64 = 1.0 / (1u64 << 53) as f64;

/// Distribution descriptor for one sampled parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    Uniform {
        lo: f64,
        hi: f64,
    },
    TruncatedNormal {
        mean: f64,
        stddev: f64,
        lo: f64,
        hi: f64,
    },
}

impl Distribution {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Distribution::Uniform { lo, hi } => (lo, hi),
            Distribution::TruncatedNormal { lo, hi, .. } => (lo, hi),
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        let (lo, hi) = self.bounds();
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Domain(format!(
                "{name}: bounds must satisfy lo <= hi, got [{lo}, {hi}]"
            )));
        }
        if let Distribution::TruncatedNormal { mean, stddev, .. } = *self {
            if !mean.is_finite() {
                return Err(Error::Domain(format!("{name}: mean must be finite")));
            }
            if !(stddev > 0.0 && stddev.is_finite()) {
                return Err(Error::Domain(format!(
                    "{name}: stddev must be positive, got {stddev}"
                )));
            }
        }
        Ok(())
    }

    /// Draw one value. The truncated normal rejects out-of-bound draws and
    /// clamps the 64th draw if none landed inside.
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            Distribution::Uniform { lo, hi } => (lo + unit(rng) * (hi - lo)).clamp(lo, hi),
            Distribution::TruncatedNormal {
                mean,
                stddev,
                lo,
                hi,
            } => {
                let mut draw = mean;
                for _ in 0..64 {
                    draw = mean + stddev * standard_normal(rng);
                    if (lo..=hi).contains(&draw) {
                        return draw;
                    }
                }
                draw.clamp(lo, hi)
            }
        }
    }
}

/// Uniform in [0, 1) from the top 53 bits of one output word.
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * F64_FROM_53_BITS
}

/// Box-Muller transform; the first uniform is kept in (0, 1] so the log is finite.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = ((rng.next_u64() >> 11) + 1) as f64 * F64_FROM_53_BITS;
    let u2 = unit(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// How catchment parameters are sampled for the ensemble. Non-sampled
/// fields come from `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingSpec {
    pub cn_dist: Distribution,
    pub n_dist: Distribution,
    pub base: CatchmentParams,
}

impl SamplingSpec {
    pub fn new(cn_dist: Distribution, n_dist: Distribution, base: CatchmentParams) -> Result<Self> {
        let s = Self {
            cn_dist,
            n_dist,
            base,
        };
        s.validate()?;
        Ok(s)
    }

    /// Checks that the distribution bounds keep every sample inside the
    /// valid [`CatchmentParams`] ranges.
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        self.cn_dist.validate("cn_dist")?;
        self.n_dist.validate("n_dist")?;
        let (cn_lo, cn_hi) = self.cn_dist.bounds();
        if !(cn_lo > 0.0 && cn_hi <= 100.0) {
            return Err(Error::Domain(format!(
                "cn_dist bounds [{cn_lo}, {cn_hi}] leave the (0, 100] range"
            )));
        }
        let (n_lo, _) = self.n_dist.bounds();
        if n_lo <= 0.0 {
            return Err(Error::Domain(format!(
                "n_dist lower bound must be positive, got {n_lo}"
            )));
        }
        Ok(())
    }
}

/// Counter-based generator: the stream depends only on (seed, index).
fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Sample the parameters for iteration `index`. Deterministic in
/// `(seed, index)`; the draw order is CN first, then Manning's N.
pub fn sample_params(spec: &SamplingSpec, seed: u64, index: u64) -> Result<CatchmentParams> {
    spec.validate()?;
    let mut rng = rng_for(seed, index);
    let cn = spec.cn_dist.sample(&mut rng);
    let manning_n = spec.n_dist.sample(&mut rng);
    CatchmentParams::new(
        cn,
        manning_n,
        spec.base.area_km2,
        spec.base.routing_gain,
        spec.base.k_base_s,
    )
}

/// A completed ensemble: `iterations` hydrographs on a shared time grid,
/// stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub iterations: usize,
    pub timesteps: usize,
    pub start: DateTime<Utc>,
    pub step_s: f64,
    /// Row-major matrix, `iterations * timesteps` discharge values.
    pub values: Vec<f64>,
    pub seed: u64,
}

impl EnsembleResult {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.timesteps..(i + 1) * self.timesteps]
    }

    /// The ensemble restricted to its first `k` rows. Identical to running
    /// `run_ensemble` with `iterations = k` and the same seed.
    pub fn prefix(&self, k: usize) -> Result<EnsembleResult> {
        if k == 0 || k > self.iterations {
            return Err(Error::Domain(format!(
                "prefix length {k} outside 1..={}",
                self.iterations
            )));
        }
        Ok(EnsembleResult {
            iterations: k,
            timesteps: self.timesteps,
            start: self.start,
            step_s: self.step_s,
            values: self.values[..k * self.timesteps].to_vec(),
            seed: self.seed,
        })
    }
}

/// Run `iterations` sampled rainfall-runoff simulations.
///
/// Row `i` is `simulate_rr(rainfall, sample_params(spec, seed, i))`. Rows
/// are assembled in index order, so the result does not depend on
/// `workers` or on scheduling.
pub fn run_ensemble(
    rainfall: &TimeSeries,
    spec: &SamplingSpec,
    iterations: usize,
    seed: u64,
    workers: usize,
) -> Result<EnsembleResult> {
    rainfall.validate()?;
    spec.validate()?;
    if iterations == 0 {
        return Err(Error::Domain("iterations must be at least 1".into()));
    }
    if workers == 0 {
        return Err(Error::Domain("workers must be at least 1".into()));
    }

    let run_one = |i: usize| -> Result<Hydrograph> {
        let params = sample_params(spec, seed, i as u64)?;
        simulate_rr(rainfall, &params)
    };

    let rows: Vec<Result<Hydrograph>> = if workers == 1 {
        (0..iterations).map(run_one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::ThreadPool(e.to_string()))?;
        pool.install(|| (0..iterations).into_par_iter().map(run_one).collect())
    };

    let timesteps = rainfall.len();
    let mut values = Vec::with_capacity(iterations * timesteps);
    for (index, row) in rows.into_iter().enumerate() {
        let h = row.map_err(|e| Error::Iteration {
            index,
            source: Box::new(e),
        })?;
        values.extend_from_slice(&h.values);
    }
    Ok(EnsembleResult {
        iterations,
        timesteps,
        start: rainfall.start,
        step_s: rainfall.step_s,
        values,
        seed,
    })
}

/// One empirical quantile of the ensemble, per timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileBand {
    pub q: f64,
    pub series: Hydrograph,
}

/// Per-timestep empirical quantiles with linear interpolation between
/// order statistics: h = (n-1)q, value = x[⌊h⌋] + frac(h)(x[⌊h⌋+1] - x[⌊h⌋]).
pub fn quantiles(ensemble: &EnsembleResult, qs: &[f64]) -> Result<Vec<QuantileBand>> {
    for &q in qs {
        if !(0.0..=1.0).contains(&q) || !q.is_finite() {
            return Err(Error::QuantileOutOfRange(q));
        }
    }
    let n = ensemble.iterations;
    let mut bands: Vec<Vec<f64>> = vec![Vec::with_capacity(ensemble.timesteps); qs.len()];
    let mut column = vec![0.0_f64; n];
    for t in 0..ensemble.timesteps {
        for (i, slot) in column.iter_mut().enumerate() {
            *slot = ensemble.values[i * ensemble.timesteps + t];
        }
        column.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite by invariant"));
        for (bi, &q) in qs.iter().enumerate() {
            let h = (n - 1) as f64 * q;
            let lo = h.floor() as usize;
            let frac = h - lo as f64;
            let v = if lo + 1 < n {
                column[lo] + frac * (column[lo + 1] - column[lo])
            } else {
                column[lo]
            };
            bands[bi].push(v);
        }
    }
    qs.iter()
        .zip(bands)
        .map(|(&q, values)| {
            Ok(QuantileBand {
                q,
                series: Hydrograph::new(ensemble.start, ensemble.step_s, values)?,
            })
        })
        .collect()
}

/// Precision of the ensemble: |1 - E| between the deterministic run and
/// the ensemble median band. Lower means higher precision.
pub fn precision_metric(deterministic: &Hydrograph, ensemble: &EnsembleResult) -> Result<f64> {
    if deterministic.len() != ensemble.timesteps {
        return Err(Error::LengthMismatch {
            left: deterministic.len(),
            right: ensemble.timesteps,
        });
    }
    let median = &quantiles(ensemble, &[0.5])?[0];
    let e = nash_sutcliffe(deterministic, &median.series)?;
    Ok((1.0 - e).abs())
}

/// One point of a precision-vs-iterations trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iterations: usize,
    pub precision: f64,
}

/// Precision evaluated at increasing iteration counts on nested prefixes
/// of one seeded ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionTrace {
    pub points: Vec<TracePoint>,
}

/// Evaluate the precision metric at each checkpoint.
///
/// Checkpoints share one seed, so the ensemble at checkpoint k is exactly
/// the first k rows of the largest one; each trace point equals
/// `precision_metric` of an independent `run_ensemble` at that count.
pub fn precision_trace(
    rainfall: &TimeSeries,
    spec: &SamplingSpec,
    checkpoints: &[usize],
    seed: u64,
    workers: usize,
) -> Result<PrecisionTrace> {
    if checkpoints.is_empty() {
        return Err(Error::Domain("checkpoints must be non-empty".into()));
    }
    if checkpoints[0] == 0 || !checkpoints.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Domain(
            "checkpoints must be strictly increasing and at least 1".into(),
        ));
    }
    let deterministic = simulate_rr(rainfall, &spec.base)?;
    let full = run_ensemble(rainfall, spec, *checkpoints.last().unwrap(), seed, workers)?;
    let mut points = Vec::with_capacity(checkpoints.len());
    for &k in checkpoints {
        let precision = precision_metric(&deterministic, &full.prefix(k)?)?;
        points.push(TracePoint {
            iterations: k,
            precision,
        });
    }
    Ok(PrecisionTrace { points })
}
