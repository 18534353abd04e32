//! Transformer-level load aggregation, overload detection, and DSO metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::timeutil::{self, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub transformer_capacity_kw: f64,
    pub household_count: usize,
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.transformer_capacity_kw <= 0.0 || self.household_count == 0 {
            return Err(SimError::validation(
                "transformer capacity and household count must be > 0",
            ));
        }
        Ok(())
    }
}

/// Hourly aggregate load at the transformer with component breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadTrace {
    pub start: Timestamp,
    pub baseline_kw: Vec<f64>,
    pub charging_kw: Vec<f64>,
}

impl Default for LoadTrace {
    fn default() -> Self {
        LoadTrace::new(timeutil::year_start(1970))
    }
}

impl LoadTrace {
    pub fn new(start: Timestamp) -> Self {
        LoadTrace {
            start,
            baseline_kw: Vec::new(),
            charging_kw: Vec::new(),
        }
    }

    pub fn push(&mut self, baseline: f64, charging: f64) {
        self.baseline_kw.push(baseline);
        self.charging_kw.push(charging);
    }

    pub fn len(&self) -> usize {
        self.baseline_kw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.baseline_kw.is_empty()
    }

    pub fn total_at(&self, idx: usize) -> f64 {
        self.baseline_kw[idx] + self.charging_kw[idx]
    }

    pub fn timestamp_at(&self, idx: usize) -> Timestamp {
        timeutil::add_hours(self.start, idx as i64)
    }

    pub fn index_of(&self, t: Timestamp) -> Option<usize> {
        let h = timeutil::hours_between(self.start, t);
        (0..self.len() as i64).contains(&h).then_some(h as usize)
    }

    pub fn totals(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.total_at(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverloadEvent {
    pub timestamp: Timestamp,
    /// kW above transformer capacity.
    pub magnitude_kw: f64,
    pub simultaneous_charging_evs: usize,
    pub total_charging_load_kw: f64,
}

/// One event per hour whose aggregate load strictly exceeds capacity.
/// `charging_evs_at` supplies the simultaneous-charging count per hour.
pub fn detect_overloads(
    trace: &LoadTrace,
    capacity_kw: f64,
    charging_evs_at: impl Fn(usize) -> usize,
) -> Vec<OverloadEvent> {
    (0..trace.len())
        .filter_map(|i| {
            let total = trace.total_at(i);
            (total > capacity_kw).then(|| OverloadEvent {
                timestamp: trace.timestamp_at(i),
                magnitude_kw: total - capacity_kw,
                simultaneous_charging_evs: charging_evs_at(i),
                total_charging_load_kw: trace.charging_kw[i],
            })
        })
        .collect()
}

/// Mean over peak of the aggregate load across `period` (indices into the
/// trace). In (0, 1]; errors when the peak is zero.
pub fn load_factor(totals: &[f64]) -> Result<f64> {
    if totals.is_empty() {
        return Err(SimError::domain("load factor over empty period"));
    }
    let max = totals.iter().cloned().fold(f64::MIN, f64::max);
    if max <= 0.0 {
        return Err(SimError::domain("load factor undefined for zero peak"));
    }
    let mean = totals.iter().sum::<f64>() / totals.len() as f64;
    Ok(mean / max)
}

pub struct CoincidenceResult {
    pub factor: f64,
    /// Consumers dropped because their individual peak was zero.
    pub excluded_consumers: usize,
}

/// Peak of the summed trace divided by the sum of individual peaks.
/// Consumers whose own peak is zero are excluded with a diagnostic count.
pub fn coincidence_factor(per_consumer: &[Vec<f64>]) -> Result<CoincidenceResult> {
    if per_consumer.is_empty() {
        return Err(SimError::domain("coincidence factor needs >= 1 consumer"));
    }
    let len = per_consumer[0].len();
    if per_consumer.iter().any(|t| t.len() != len) || len == 0 {
        return Err(SimError::domain("consumer traces must share a non-empty period"));
    }
    let mut individual_peak_sum = 0.0;
    let mut excluded = 0usize;
    for trace in per_consumer {
        let peak = trace.iter().cloned().fold(f64::MIN, f64::max);
        if peak > 0.0 {
            individual_peak_sum += peak;
        } else {
            excluded += 1;
        }
    }
    if individual_peak_sum <= 0.0 {
        return Err(SimError::domain("all consumers have zero peak"));
    }
    let aggregate_peak = (0..len)
        .map(|i| per_consumer.iter().map(|t| t[i]).sum::<f64>())
        .fold(f64::MIN, f64::max);
    Ok(CoincidenceResult {
        factor: aggregate_peak / individual_peak_sum,
        excluded_consumers: excluded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverloadStats {
    /// Overloads in the window (first, first + 1 year]; excludes the first.
    pub count_following_year: usize,
    /// Distinct calendar days among those overloads.
    pub days_with_overload: usize,
}

pub fn overload_stats(events: &[OverloadEvent], first_overload: Timestamp) -> OverloadStats {
    let window_end = timeutil::plus_one_year(first_overload);
    let mut days: Vec<chrono::NaiveDate> = events
        .iter()
        .filter(|e| e.timestamp > first_overload && e.timestamp <= window_end)
        .map(|e| e.timestamp.date())
        .collect();
    let count = days.len();
    days.sort_unstable();
    days.dedup();
    OverloadStats {
        count_following_year: count,
        days_with_overload: days.len(),
    }
}
