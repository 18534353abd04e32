//! Result export: summary JSON, trace and ledger CSVs.

use std::fs;
use std::path::Path;

use crate::emissions::EmissionLedger;
use crate::engine::{ComparisonRow, SimulationResult};
use crate::error::{Result, SimError};
use crate::grid::LoadTrace;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SimError + '_ {
    move |e| SimError::Io {
        path: path.display().to_string(),
        source: e,
    }
}

pub fn write_summary_json(result: &SimulationResult, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(result)
        .map_err(|e| SimError::validation(e.to_string()))?;
    fs::write(path, json + "\n").map_err(io_err(path))
}

/// `timestamp,baseline_kw,charging_kw,total_kw,capacity_kw,overload_kw`
pub fn write_trace_csv(trace: &LoadTrace, capacity_kw: f64, path: &Path) -> Result<()> {
    let mut out = String::from("timestamp,baseline_kw,charging_kw,total_kw,capacity_kw,overload_kw\n");
    for i in 0..trace.len() {
        let total = trace.total_at(i);
        let overload = (total - capacity_kw).max(0.0);
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            trace.timestamp_at(i).format("%Y-%m-%dT%H:%M:%S"),
            trace.baseline_kw[i],
            trace.charging_kw[i],
            total,
            capacity_kw,
            overload
        ));
    }
    fs::write(path, out).map_err(io_err(path))
}

/// Reads a trace CSV back, for round-trip checks and post-processing.
pub fn read_trace_csv(path: &Path) -> Result<LoadTrace> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| SimError::Parse {
        path: path.display().to_string(),
        line: 0,
        message: e.to_string(),
    })?;
    let mut rows: Vec<(String, f64, f64)> = Vec::new();
    for (idx, row) in reader
        .deserialize::<(String, f64, f64, f64, f64, f64)>()
        .enumerate()
    {
        let (ts, baseline, charging, _, _, _) = row.map_err(|e| SimError::Parse {
            path: path.display().to_string(),
            line: idx as u64 + 2,
            message: e.to_string(),
        })?;
        rows.push((ts, baseline, charging));
    }
    if rows.is_empty() {
        return Err(SimError::validation("empty trace csv"));
    }
    let start = chrono::NaiveDateTime::parse_from_str(&rows[0].0, "%Y-%m-%dT%H:%M:%S")
        .map_err(|e| SimError::validation(e.to_string()))?;
    Ok(LoadTrace {
        start,
        baseline_kw: rows.iter().map(|r| r.1).collect(),
        charging_kw: rows.iter().map(|r| r.2).collect(),
    })
}

/// `ev_id,timestamp,energy_kwh,intensity_g_per_kwh,emitted_kg`
pub fn write_ledger_csv(ledger: &EmissionLedger, path: &Path) -> Result<()> {
    let mut out = String::from("ev_id,timestamp,energy_kwh,intensity_g_per_kwh,emitted_kg\n");
    for r in &ledger.records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.ev_id,
            r.timestamp.format("%Y-%m-%dT%H:%M:%S"),
            r.energy_kwh,
            r.intensity_g_per_kwh,
            r.emitted_kg
        ));
    }
    fs::write(path, out).map_err(io_err(path))
}

pub fn read_ledger_csv(path: &Path) -> Result<EmissionLedger> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| SimError::Parse {
        path: path.display().to_string(),
        line: 0,
        message: e.to_string(),
    })?;
    let mut ledger = EmissionLedger::default();
    for (idx, row) in reader
        .deserialize::<(usize, String, f64, f64, f64)>()
        .enumerate()
    {
        let (ev_id, ts, energy, intensity, emitted) = row.map_err(|e| SimError::Parse {
            path: path.display().to_string(),
            line: idx as u64 + 2,
            message: e.to_string(),
        })?;
        let timestamp = chrono::NaiveDateTime::parse_from_str(&ts, "%Y-%m-%dT%H:%M:%S")
            .map_err(|e| SimError::validation(e.to_string()))?;
        ledger.records.push(crate::emissions::EmissionRecord {
            ev_id,
            timestamp,
            energy_kwh: energy,
            intensity_g_per_kwh: intensity,
            emitted_kg: emitted,
        });
    }
    Ok(ledger)
}

pub fn write_comparison_csv(rows: &[ComparisonRow], path: &Path) -> Result<()> {
    let mut out = String::from(
        "label,first_overload,overloads_following_year,days_with_overload,evs_at_first_overload,avg_emissions_2031_kg\n",
    );
    let fmt_opt = |v: Option<String>| v.unwrap_or_default();
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.label,
            fmt_opt(r.first_overload.map(|t| t.format("%Y-%m-%dT%H:%M:%S").to_string())),
            fmt_opt(r.overloads_following_year.map(|v| v.to_string())),
            fmt_opt(r.days_with_overload.map(|v| v.to_string())),
            fmt_opt(r.evs_at_first_overload.map(|v| v.to_string())),
            fmt_opt(r.avg_emissions_2031_kg.map(|v| v.to_string())),
        ));
    }
    fs::write(path, out).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeutil;

    #[test]
    fn trace_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        let mut trace = LoadTrace::new(timeutil::year_start(2020));
        for i in 0..48 {
            trace.push(40.0 + i as f64 * 0.125, (i % 7) as f64 * 1.5);
        }
        write_trace_csv(&trace, 400.0, &path).unwrap();
        let back = read_trace_csv(&path).unwrap();
        assert_eq!(back.start, trace.start);
        for i in 0..trace.len() {
            assert!((back.baseline_kw[i] - trace.baseline_kw[i]).abs() < 1e-9);
            assert!((back.charging_kw[i] - trace.charging_kw[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn ledger_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.csv");
        let mut ledger = EmissionLedger::default();
        ledger.record(0, timeutil::year_start(2031), 4.53, 87.5);
        ledger.record(3, timeutil::add_hours(timeutil::year_start(2031), 17), 11.0, 92.25);
        write_ledger_csv(&ledger, &path).unwrap();
        let back = read_ledger_csv(&path).unwrap();
        assert_eq!(back.records.len(), 2);
        for (a, b) in back.records.iter().zip(&ledger.records) {
            assert_eq!(a.ev_id, b.ev_id);
            assert_eq!(a.timestamp, b.timestamp);
            assert!((a.energy_kwh - b.energy_kwh).abs() < 1e-9);
            assert!((a.emitted_kg - b.emitted_kg).abs() < 1e-9);
        }
    }
}
