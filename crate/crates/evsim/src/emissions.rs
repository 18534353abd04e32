//! CO2-eq intensity ingestion, hourly averaging, yearly repetition with
//! exponential decay, the per-EV charging emission ledger, and fleet-level
//! climate-goal arithmetic.

use std::path::Path;

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::timeutil::{self, Timestamp, HOURS_PER_YEAR};

/// Decay coefficient per year for the grid's carbon intensity.
pub const DECAY_RATE_PER_YEAR: f64 = 0.203;

/// Hourly CO2-eq intensity (g/kWh) covering whole calendar years.
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionSeries {
    pub start_year: i32,
    pub span_years: u32,
    pub hourly_g_per_kwh: Vec<f64>,
}

impl EmissionSeries {
    pub fn from_hourly(start_year: i32, hourly: Vec<f64>) -> Result<Self> {
        if hourly.is_empty() {
            return Err(SimError::validation("emission series is empty"));
        }
        if hourly.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(SimError::validation("intensities must be finite and >= 0"));
        }
        let mut span_years = 0;
        let mut hours = 0usize;
        while hours < hourly.len() {
            hours += timeutil::hours_in_year(start_year + span_years as i32) as usize;
            span_years += 1;
        }
        if hours != hourly.len() {
            return Err(SimError::validation(format!(
                "series has {} hours, which is not a whole number of calendar years from {}",
                hourly.len(),
                start_year
            )));
        }
        Ok(EmissionSeries {
            start_year,
            span_years,
            hourly_g_per_kwh: hourly,
        })
    }

    /// Reads `timestamp,co2_g_per_kwh` CSV at 5-minute or hourly resolution,
    /// auto-detected from the spacing of the first two rows. Sub-hourly data
    /// is averaged per hour.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let display = path.display().to_string();
        let mut reader = csv::Reader::from_path(path).map_err(|e| SimError::Parse {
            path: display.clone(),
            line: 0,
            message: e.to_string(),
        })?;
        let mut samples: Vec<(Timestamp, f64)> = Vec::new();
        for (idx, row) in reader.deserialize::<(String, f64)>().enumerate() {
            let (ts, value) = row.map_err(|e| SimError::Parse {
                path: display.clone(),
                line: idx as u64 + 2,
                message: e.to_string(),
            })?;
            let ts = parse_timestamp(&ts).ok_or_else(|| SimError::Parse {
                path: display.clone(),
                line: idx as u64 + 2,
                message: format!("unparseable timestamp {ts:?}"),
            })?;
            samples.push((ts, value));
        }
        if samples.len() < 2 {
            return Err(SimError::validation("emission series needs >= 2 samples"));
        }
        let spacing = samples[1].0 - samples[0].0;
        let hourly = if spacing < chrono::Duration::hours(1) {
            to_hourly(&samples)?
        } else {
            samples.iter().map(|&(_, v)| v).collect()
        };
        EmissionSeries::from_hourly(samples[0].0.year(), hourly)
    }
}

fn parse_timestamp(s: &str) -> Option<Timestamp> {
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M"] {
        if let Ok(t) = chrono::NaiveDateTime::parse_from_str(s, fmt) {
            return Some(t);
        }
    }
    None
}

/// Averages sub-hourly samples into hourly values. Samples must be in
/// chronological order; each hour's value is the mean of its samples, and
/// partial hours use whatever samples exist.
pub fn to_hourly(samples: &[(Timestamp, f64)]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(SimError::validation("no samples to average"));
    }
    let start = samples[0].0.date().and_hms_opt(samples[0].0.hour(), 0, 0).unwrap();
    let mut sums: Vec<(f64, u32)> = Vec::new();
    for &(ts, v) in samples {
        let hour_idx = timeutil::hours_between(start, ts);
        if hour_idx < 0 {
            return Err(SimError::validation("samples out of order"));
        }
        let hour_idx = hour_idx as usize;
        if hour_idx >= sums.len() {
            sums.resize(hour_idx + 1, (0.0, 0));
        }
        sums[hour_idx].0 += v;
        sums[hour_idx].1 += 1;
    }
    sums.iter()
        .map(|&(sum, n)| {
            if n == 0 {
                Err(SimError::validation("gap: hour with no samples"))
            } else {
                Ok(sum / n as f64)
            }
        })
        .collect()
}

use chrono::Timelike;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DecayMode {
    /// e^(-0.203 * fractional elapsed years), applied continuously.
    #[default]
    Continuous,
    /// Decay steps once per whole elapsed calendar year.
    Stepwise,
    /// No decay; the source data repeats unchanged (testing aid).
    Disabled,
}

/// Intensity reduction factor after `elapsed_years`.
pub fn decay_factor(elapsed_years: f64) -> f64 {
    (-DECAY_RATE_PER_YEAR * elapsed_years).exp()
}

/// Intensity at a simulated instant: the source value at the cyclically
/// mapped month/day/hour, scaled by the decay factor for the time elapsed
/// since simulation start.
pub fn intensity_at(
    series: &EmissionSeries,
    sim_time: Timestamp,
    sim_start: Timestamp,
    mode: DecayMode,
) -> f64 {
    let cycle = (sim_time.year() - sim_start.year()).rem_euclid(series.span_years as i32);
    let source_year = series.start_year + cycle;
    let mut idx = 0usize;
    for y in series.start_year..source_year {
        idx += timeutil::hours_in_year(y) as usize;
    }
    idx += timeutil::hour_offset_in_year(sim_time, source_year);
    let base = series.hourly_g_per_kwh[idx];
    let factor = match mode {
        DecayMode::Disabled => 1.0,
        DecayMode::Continuous => {
            let hours = timeutil::hours_between(sim_start, sim_time) as f64;
            decay_factor(hours / HOURS_PER_YEAR)
        }
        DecayMode::Stepwise => decay_factor((sim_time.year() - sim_start.year()) as f64),
    };
    base * factor
}

/// One charging hour's emission record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionRecord {
    pub ev_id: usize,
    pub timestamp: Timestamp,
    pub energy_kwh: f64,
    pub intensity_g_per_kwh: f64,
    pub emitted_kg: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmissionLedger {
    pub records: Vec<EmissionRecord>,
}

impl EmissionLedger {
    /// Appends a record; `intensity` is already decay-scaled.
    pub fn record(&mut self, ev_id: usize, timestamp: Timestamp, energy_kwh: f64, intensity: f64) {
        self.records.push(EmissionRecord {
            ev_id,
            timestamp,
            energy_kwh,
            intensity_g_per_kwh: intensity,
            emitted_kg: energy_kwh * intensity / 1000.0,
        });
    }

    pub fn total_emitted_kg(&self) -> f64 {
        self.records.iter().map(|r| r.emitted_kg).sum()
    }

    pub fn total_energy_kwh(&self) -> f64 {
        self.records.iter().map(|r| r.energy_kwh).sum()
    }

    pub fn emitted_in_year(&self, year: i32) -> f64 {
        self.records
            .iter()
            .filter(|r| r.timestamp.year() == year)
            .map(|r| r.emitted_kg)
            .sum()
    }

    /// Total emitted in a calendar year divided by the EV count present.
    pub fn annual_per_ev_average(&self, year: i32, evs_present: usize) -> Result<f64> {
        if evs_present == 0 {
            return Err(SimError::domain("no EVs present in year"));
        }
        Ok(self.emitted_in_year(year) / evs_present as f64)
    }
}

/// Inputs for the fleet-wide annual emission projection.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FleetProjectionInputs {
    pub n_ev: u64,
    pub ev_annual_kg: f64,
    pub fleet_size: u64,
    pub ice_annual_kg: f64,
    pub emission_cap_kg: f64,
}

impl FleetProjectionInputs {
    pub fn validate(&self) -> Result<()> {
        if self.n_ev > self.fleet_size {
            return Err(SimError::validation("EV count exceeds fleet size"));
        }
        if self.ev_annual_kg < 0.0 || self.ice_annual_kg <= self.ev_annual_kg {
            return Err(SimError::validation(
                "need ice_annual_kg > ev_annual_kg >= 0",
            ));
        }
        Ok(())
    }
}

pub const KG_PER_MEGATON: f64 = 1e9;

/// Annual fleet emission in kg: EVs at their rate, the rest at the ICE rate.
pub fn fleet_projection(inputs: &FleetProjectionInputs) -> f64 {
    inputs.n_ev as f64 * inputs.ev_annual_kg
        + (inputs.fleet_size - inputs.n_ev) as f64 * inputs.ice_annual_kg
}

/// Minimum EV count for the fleet emission to stay within the cap.
pub fn required_evs_for_cap(inputs: &FleetProjectionInputs) -> Result<u64> {
    inputs.validate()?;
    let all_ice = inputs.fleet_size as f64 * inputs.ice_annual_kg;
    if all_ice <= inputs.emission_cap_kg {
        return Ok(0);
    }
    let all_ev = inputs.fleet_size as f64 * inputs.ev_annual_kg;
    if all_ev > inputs.emission_cap_kg {
        return Err(SimError::domain(
            "cap unreachable even with an all-EV fleet",
        ));
    }
    let needed =
        (all_ice - inputs.emission_cap_kg) / (inputs.ice_annual_kg - inputs.ev_annual_kg);
    Ok((needed.ceil() as u64).min(inputs.fleet_size))
}
