//! Ingestion and validation of per-household hourly consumption data.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use chrono::{Datelike, Timelike};

use crate::error::{Result, SimError};
use crate::timeutil::{self, Timestamp};

/// One household's complete hourly year of consumption, kWh per hour.
#[derive(Debug, Clone, PartialEq)]
pub struct Household {
    pub id: String,
    pub hourly_kwh: Vec<f64>,
}

/// Per-household hourly series for one calendar year.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsumptionDataset {
    pub source_year: i32,
    pub households: Vec<Household>,
}

impl ConsumptionDataset {
    /// Reads `household_id,timestamp,kwh` CSV (plain or gzip by extension).
    /// Every household must cover every hour of one shared calendar year
    /// exactly once, with no negative values.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let display = path.display().to_string();
        let file = File::open(path).map_err(|e| SimError::Io {
            path: display.clone(),
            source: e,
        })?;
        let reader: Box<dyn Read> = if path.extension().is_some_and(|e| e == "gz") {
            Box::new(flate2::read::GzDecoder::new(BufReader::new(file)))
        } else {
            Box::new(BufReader::new(file))
        };
        let mut csv_reader = csv::Reader::from_reader(reader);
        let mut per_household: BTreeMap<String, BTreeMap<i64, f64>> = BTreeMap::new();
        let mut source_year: Option<i32> = None;
        for (idx, row) in csv_reader.deserialize::<(String, String, f64)>().enumerate() {
            let line = idx as u64 + 2;
            let (id, ts_str, kwh) = row.map_err(|e| SimError::Parse {
                path: display.clone(),
                line,
                message: e.to_string(),
            })?;
            let ts = parse_hour(&ts_str).ok_or_else(|| SimError::Parse {
                path: display.clone(),
                line,
                message: format!("unparseable timestamp {ts_str:?}"),
            })?;
            if kwh < 0.0 || !kwh.is_finite() {
                return Err(SimError::validation(format!(
                    "household {id} at {ts}: negative or non-finite value {kwh}"
                )));
            }
            let year = *source_year.get_or_insert(ts.year());
            if ts.year() != year {
                return Err(SimError::validation(format!(
                    "household {id} at {ts}: data spans more than one calendar year"
                )));
            }
            let offset = timeutil::hours_between(timeutil::year_start(year), ts);
            if per_household
                .entry(id.clone())
                .or_default()
                .insert(offset, kwh)
                .is_some()
            {
                return Err(SimError::validation(format!(
                    "household {id}: duplicate timestamp {ts}"
                )));
            }
        }
        let source_year =
            source_year.ok_or_else(|| SimError::validation("consumption file has no rows"))?;
        let expected_hours = timeutil::hours_in_year(source_year) as i64;
        let mut households = Vec::with_capacity(per_household.len());
        for (id, hours) in per_household {
            for h in 0..expected_hours {
                if !hours.contains_key(&h) {
                    let ts = timeutil::add_hours(timeutil::year_start(source_year), h);
                    return Err(SimError::validation(format!(
                        "household {id}: missing hour {ts}"
                    )));
                }
            }
            households.push(Household {
                id,
                hourly_kwh: hours.into_values().collect(),
            });
        }
        Ok(ConsumptionDataset {
            source_year,
            households,
        })
    }

    pub fn household_count(&self) -> usize {
        self.households.len()
    }

    /// Baseline load (kW, hourly average) of one household at a simulated
    /// instant, repeating the source year. Feb 29 reuses Feb 28.
    pub fn load_at(&self, household: usize, sim_time: Timestamp) -> f64 {
        let offset = timeutil::hour_offset_in_year(sim_time, self.source_year);
        self.households[household].hourly_kwh[offset]
    }

    /// The 24 hourly loads of one household for the source-year day that a
    /// simulated date maps onto.
    pub fn day_profile(&self, household: usize, sim_day: chrono::NaiveDate) -> [f64; 24] {
        let day_start = sim_day.and_hms_opt(0, 0, 0).unwrap();
        let offset = timeutil::hour_offset_in_year(day_start, self.source_year);
        let series = &self.households[household].hourly_kwh;
        let mut loads = [0.0; 24];
        loads.copy_from_slice(&series[offset..offset + 24]);
        loads
    }

    pub fn aggregate_total_kwh(&self) -> f64 {
        self.households
            .iter()
            .map(|h| h.hourly_kwh.iter().sum::<f64>())
            .sum()
    }
}

fn parse_hour(s: &str) -> Option<Timestamp> {
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M"] {
        if let Ok(t) = chrono::NaiveDateTime::parse_from_str(s, fmt) {
            if t.minute() == 0 && t.second() == 0 {
                return Some(t);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_year(path: &Path, ids: &[&str], value: impl Fn(&str, i64) -> f64, skip: Option<(&str, i64)>) {
        let mut f = File::create(path).unwrap();
        writeln!(f, "household_id,timestamp,kwh").unwrap();
        for id in ids {
            for h in 0..8760i64 {
                if skip == Some((id, h)) {
                    continue;
                }
                let ts = timeutil::add_hours(timeutil::year_start(2019), h);
                writeln!(f, "{id},{},{}", ts.format("%Y-%m-%dT%H:%M:%S"), value(id, h)).unwrap();
            }
        }
    }

    #[test]
    fn well_formed_file_loads() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("consumption.csv");
        write_year(&path, &["a", "b"], |_, h| 0.25 + (h % 24) as f64 * 0.01, None);
        let ds = ConsumptionDataset::from_csv(&path).unwrap();
        assert_eq!(ds.household_count(), 2);
        assert_eq!(ds.source_year, 2019);
        // Column-sum oracle.
        let expected: f64 = 2.0 * (0..8760).map(|h| 0.25 + (h % 24) as f64 * 0.01).sum::<f64>();
        assert!((ds.aggregate_total_kwh() - expected).abs() < 1e-6);
    }

    #[test]
    fn missing_hour_names_household_and_hour() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("consumption.csv");
        write_year(&path, &["a", "b"], |_, _| 0.3, Some(("b", 3000)));
        let err = ConsumptionDataset::from_csv(&path).unwrap_err().to_string();
        assert!(err.contains("household b"), "{err}");
        assert!(err.contains("missing hour"), "{err}");
    }

    #[test]
    fn negative_value_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        let mut f = File::create(&path).unwrap();
        writeln!(f, "household_id,timestamp,kwh").unwrap();
        writeln!(f, "a,2019-01-01T00:00:00,-1.0").unwrap();
        drop(f);
        let err = ConsumptionDataset::from_csv(&path).unwrap_err().to_string();
        assert!(err.contains("negative"), "{err}");
    }

    #[test]
    fn duplicate_timestamp_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dup.csv");
        let mut f = File::create(&path).unwrap();
        writeln!(f, "household_id,timestamp,kwh").unwrap();
        writeln!(f, "a,2019-01-01T00:00:00,0.1").unwrap();
        writeln!(f, "a,2019-01-01T00:00:00,0.2").unwrap();
        drop(f);
        let err = ConsumptionDataset::from_csv(&path).unwrap_err().to_string();
        assert!(err.contains("duplicate"), "{err}");
    }

    #[test]
    fn leap_day_reads_feb_28() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        write_year(&path, &["a"], |_, h| h as f64, None);
        let ds = ConsumptionDataset::from_csv(&path).unwrap();
        let feb28 = chrono::NaiveDate::from_ymd_opt(2024, 2, 28).unwrap();
        let feb29 = chrono::NaiveDate::from_ymd_opt(2024, 2, 29).unwrap();
        assert_eq!(ds.day_profile(0, feb28), ds.day_profile(0, feb29));
    }
}
