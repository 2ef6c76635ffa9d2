//! CSV ingestion and emission.
//!
//! Input series are strict: exact headers, RFC 3339 timestamps, uniform
//! spacing, finite non-negative values. Every rejection names the
//! offending line.

use chrono::{DateTime, SecondsFormat, Utc};

use floodsim_core::{
    BatchLog, Hydrograph, ParetoFront, PrecisionTrace, QuantileBand, TimeSeries, TradeoffPoint,
};

use crate::CliError;

pub const RAINFALL_HEADER: &str = "timestamp,precip_mm";
pub const DISCHARGE_HEADER: &str = "timestamp,discharge_m3s";
pub const TRADEOFF_HEADER: &str = "iterations,cores,freq_mhz,precision,time_s,energy_j,pareto";
pub const BATCHLOG_HEADER: &str = "batch,scenario,awm_id,precision,time_s,energy_j,qos_ok";

fn parse_err(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Parse(format!("line {line}: {msg}"))
}

fn parse_series(
    text: &str,
    header: &str,
    value_name: &str,
) -> Result<(DateTime<Utc>, f64, Vec<f64>), CliError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        None => {
            return Err(parse_err(
                1,
                format!("empty file, expected header '{header}'"),
            ))
        }
        Some((_, first)) if first.trim_end_matches('\r') != header => {
            return Err(parse_err(
                1,
                format!("expected header '{header}', got '{first}'"),
            ));
        }
        Some(_) => {}
    }

    let mut timestamps: Vec<DateTime<Utc>> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let row = raw.trim_end_matches('\r');
        if row.is_empty() {
            continue;
        }
        let mut fields = row.split(',');
        let (ts, value) = match (fields.next(), fields.next(), fields.next()) {
            (Some(ts), Some(v), None) => (ts, v),
            _ => return Err(parse_err(line_no, "expected 2 comma-separated fields")),
        };
        let ts = DateTime::parse_from_rfc3339(ts.trim())
            .map_err(|e| parse_err(line_no, format!("invalid timestamp '{ts}': {e}")))?
            .with_timezone(&Utc);
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| parse_err(line_no, format!("invalid {value_name} '{value}'")))?;
        if !v.is_finite() {
            return Err(parse_err(
                line_no,
                format!("invalid {value_name} '{value}'"),
            ));
        }
        if v < 0.0 {
            return Err(parse_err(line_no, format!("negative {value_name} {v}")));
        }
        timestamps.push(ts);
        values.push(v);
    }

    if values.len() < 2 {
        return Err(CliError::Parse(
            "need at least two data rows to infer the step".into(),
        ));
    }
    let step = timestamps[1] - timestamps[0];
    if step <= chrono::Duration::zero() {
        return Err(parse_err(3, "timestamps must be strictly increasing"));
    }
    for (i, pair) in timestamps.windows(2).enumerate().skip(1) {
        if pair[1] - pair[0] != step {
            return Err(parse_err(
                i + 3,
                format!(
                    "non-uniform step: expected {}s, got {}s",
                    step.num_milliseconds() as f64 / 1000.0,
                    (pair[1] - pair[0]).num_milliseconds() as f64 / 1000.0
                ),
            ));
        }
    }
    let step_s = step.num_milliseconds() as f64 / 1000.0;
    Ok((timestamps[0], step_s, values))
}

/// Parse a rainfall CSV (`timestamp,precip_mm`), inferring the step from
/// the (required uniform) timestamp spacing.
pub fn parse_rainfall_csv(text: &str) -> Result<TimeSeries, CliError> {
    let (start, step_s, values) = parse_series(text, RAINFALL_HEADER, "precip_mm")?;
    TimeSeries::new(start, step_s, values).map_err(|e| CliError::Parse(e.to_string()))
}

/// Parse an observed-discharge CSV (`timestamp,discharge_m3s`).
pub fn parse_discharge_csv(text: &str) -> Result<Hydrograph, CliError> {
    let (start, step_s, values) = parse_series(text, DISCHARGE_HEADER, "discharge_m3s")?;
    Hydrograph::new(start, step_s, values).map_err(|e| CliError::Parse(e.to_string()))
}

fn rfc3339(ts: DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

pub fn hydrograph_csv(h: &Hydrograph) -> String {
    let mut out = String::from(DISCHARGE_HEADER);
    out.push('\n');
    for (i, v) in h.values.iter().enumerate() {
        out.push_str(&format!("{},{}\n", rfc3339(h.timestamp(i)), v));
    }
    out
}

/// One timestamp column plus one column per quantile band.
pub fn bands_csv(bands: &[QuantileBand]) -> String {
    let mut out = String::from("timestamp");
    for band in bands {
        out.push_str(&format!(",q{}", band.q));
    }
    out.push('\n');
    let series = &bands[0].series;
    for i in 0..series.len() {
        out.push_str(&rfc3339(series.timestamp(i)));
        for band in bands {
            out.push_str(&format!(",{}", band.series.values[i]));
        }
        out.push('\n');
    }
    out
}

pub fn trace_csv(trace: &PrecisionTrace) -> String {
    let mut out = String::from("iterations,precision\n");
    for p in &trace.points {
        out.push_str(&format!("{},{}\n", p.iterations, p.precision));
    }
    out
}

/// Nine significant digits, scientific notation.
fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

/// Trade-off table with a 0/1 Pareto-membership column.
pub fn tradeoff_csv(points: &[TradeoffPoint], front: &ParetoFront) -> String {
    let mut out = String::from(TRADEOFF_HEADER);
    out.push('\n');
    for p in points {
        let on_front = front.points.iter().any(|fp| fp.config == p.config);
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.config.iterations,
            p.config.cores,
            p.config.freq_mhz,
            sig9(p.precision),
            sig9(p.time_s),
            sig9(p.energy_j),
            u8::from(on_front),
        ));
    }
    out
}

pub fn batchlog_csv(log: &BatchLog) -> String {
    let mut out = String::from(BATCHLOG_HEADER);
    out.push('\n');
    for r in &log.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.batch,
            r.scenario,
            r.awm_id,
            r.precision,
            r.time_s,
            r.energy_j,
            u8::from(r.qos_ok),
        ));
    }
    out
}
